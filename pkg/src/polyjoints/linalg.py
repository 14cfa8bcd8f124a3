"""Exact Gaussian elimination over F_p and Q.

The pure-Python path is the reference implementation.  Large matrices are
handed to FLINT (python-flint) when it is importable; since the reduced row
echelon form is unique, both paths return the same canonical nullspace basis.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .algebra.field import Field, Scalar

try:  # pragma: no cover - exercised implicitly
    import flint
except ImportError:  # pragma: no cover
    flint = None

FLINT_THRESHOLD = 400  # rows * cols above which "auto" uses FLINT
CERT_PRIME = 2147483647  # 2^31 - 1, used for modular full-rank certificates


def rref(matrix: Sequence[Sequence[Scalar]], field: Field, ncols: int | None = None):
    """Reduced row echelon form; returns (nonzero rows, pivot columns).

    Pivot choice is deterministic: the first row (from the top) with a
    nonzero entry in the current column.
    """
    rows = [[field(x) for x in r] for r in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    p = field.p
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = field.inv(rows[r][c])
        if p is None:
            rows[r] = [x * inv for x in rows[r]]
        else:
            rows[r] = [x * inv % p for x in rows[r]]
        piv = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                if p is None:
                    rows[i] = [x - f * y for x, y in zip(rows[i], piv)]
                else:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _integer_rows(matrix, field: Field):
    if field.p is not None:
        return [[int(x) % field.p for x in r] for r in matrix]
    out = []
    for r in matrix:
        if all(type(x) is int for x in r):
            out.append(list(r))
            continue
        den = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        out.append([int(Fraction(x) * den) for x in r])
    return out


class _Echelon:
    """Uniform read access to an RREF computed by either backend."""

    def __init__(self, matrix, field: Field, ncols: int, use_flint: bool):
        self.field, self.ncols = field, ncols
        if not matrix:
            self.rows, self.pivots, self._R = [], [], None
            return
        if not use_flint:
            self.rows, self.pivots = rref(matrix, field, ncols)
            self._R = None
            return
        rows = _integer_rows(matrix, field)
        if field.p is not None:
            R, rk = flint.nmod_mat(len(rows), ncols, [x for r in rows for x in r], field.p).rref()
            self._den = 1
        else:
            R, den, rk = flint.fmpz_mat(rows).rref()
            self._den = int(den)
        self._R = R
        self.rows = None
        piv, j = [], 0
        for i in range(rk):
            while int(R[i, j]) == 0:
                j += 1
            piv.append(j)
            j += 1
        self.pivots = piv

    def entry(self, i: int, j: int) -> Scalar:
        if self._R is None:
            return self.rows[i][j]
        v = int(self._R[i, j])
        return v if self.field.p is not None else Fraction(v, self._den)

    def basis(self, limit: int | None = None) -> list[tuple]:
        F = self.field
        pivset = set(self.pivots)
        out = []
        for f in range(self.ncols):
            if f in pivset:
                continue
            if limit is not None and len(out) >= limit:
                break
            v = [F.zero] * self.ncols
            v[f] = F.one
            for i, pc in enumerate(self.pivots):
                if pc < f:
                    v[pc] = F.neg(self.entry(i, f))
            out.append(tuple(v))
        return out


def _use_flint(nrows: int, ncols: int, backend: str) -> bool:
    if backend == "python":
        return False
    if backend == "flint":
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        return True
    if backend != "auto":
        raise ValueError(f"unknown backend {backend!r}")
    return flint is not None and nrows * ncols > FLINT_THRESHOLD and nrows > 0


def nullspace(matrix: Sequence[Sequence[Scalar]], field: Field, ncols: int | None = None,
              backend: str = "auto", limit: int | None = None) -> list[tuple]:
    """Canonical basis of the right nullspace (one vector per free column).

    ``limit`` truncates to the first basis vectors, which saves reading the
    whole echelon form when only one kernel element is wanted.
    """
    if ncols is None:
        if not matrix:
            raise ValueError("ncols is required for a matrix without rows")
        ncols = len(matrix[0])
    ech = _Echelon(matrix, field, ncols, bool(matrix) and _use_flint(len(matrix), ncols, backend))
    return ech.basis(limit)


def kernel(matrix: Sequence[Sequence[Scalar]], field: Field, ncols: int,
           backend: str = "auto", limit: int | None = None) -> tuple[list[tuple], int]:
    """(canonical nullspace basis, rank) from a single elimination."""
    ech = _Echelon(matrix, field, ncols, bool(matrix) and _use_flint(len(matrix), ncols, backend))
    return ech.basis(limit), len(ech.pivots)


def rank(matrix: Sequence[Sequence[Scalar]], field: Field, backend: str = "auto") -> int:
    if not matrix:
        return 0
    ncols = len(matrix[0])
    if _use_flint(len(matrix), ncols, backend):
        rows = _integer_rows(matrix, field)
        if field.p is not None:
            return flint.nmod_mat(len(rows), ncols, [x for r in rows for x in r], field.p).rank()
        return flint.fmpz_mat(rows).rank()
    return len(rref(matrix, field, ncols)[1])


def rank_mod(flat: Sequence[int], nrows: int, ncols: int, p: int) -> int:
    """Rank over F_p of a row-major matrix of residues."""
    if nrows == 0 or ncols == 0:
        return 0
    if flint is not None:
        return flint.nmod_mat(nrows, ncols, list(flat), p).rank()
    rows = [list(flat[i * ncols:(i + 1) * ncols]) for i in range(nrows)]
    return len(rref(rows, Field.prime(p), ncols)[1])
