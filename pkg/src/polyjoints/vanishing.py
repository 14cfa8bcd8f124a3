"""Low-degree polynomials vanishing on finite point sets.

Columns of the evaluation matrix are the monomials of degree <= d in graded
lexicographic order (ascending), so the degree-d matrix is a column prefix of
any higher-degree one.  ``EvaluationTable`` exploits this and answers
"is there a nonzero polynomial of degree <= d vanishing on these rows?" for
arbitrary row subsets, which is what peeling needs.

Over Q, full column rank is first tested modulo the prime 2^31 - 1: full rank
mod a prime implies full rank over Q for P-integral matrices.  Only when that
test is inconclusive is the exact integer rank computed.

For the Dvir construction only the first m + 1 columns are eliminated: that
block already has a kernel, and its kernel vectors padded with zeros lie in
the kernel of the whole matrix.  Fraction-free elimination of the wide matrix
is orders of magnitude slower over Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, lcm
from typing import Sequence

import numpy as np

from .algebra.field import Field
from .algebra.poly import MultiPoly
from .linalg import CERT_PRIME, flint, kernel, nullspace, rank, rank_mod
from .numeric import iroot

__all__ = [
    "VanishingResult", "EvaluationTable", "monomials", "dvir_degree", "evaluation_matrix",
    "dvir_polynomial", "minimal_vanishing_degree", "has_vanishing", "nullspace",
    "MAX_POINTS", "MAX_CELLS",
]

# Dense elimination limits.  MAX_CELLS bounds rows * columns of any matrix we
# eliminate.  Over Q the Dvir degree makes entries grow like x^(m^(1/n)), so
# the Dvir construction additionally caps the number of points.
MAX_CELLS = 12_000_000
MAX_POINTS = {"fp": 5000, "rat": 2000}
DIXON_CELLS = 40_000  # over Q, blocks larger than this use the rank-profile solve


@dataclass(frozen=True)
class VanishingResult:
    poly: MultiPoly
    degree_bound_used: int
    nullspace_dim: int


def monomials(n: int, d: int) -> list[tuple]:
    """Exponent vectors of total degree <= d, grlex ascending."""
    out = []
    for deg in range(d + 1):
        layer: list = []
        _compositions(n, deg, [], layer)
        out.extend(sorted(layer))
    return out


def _compositions(n, deg, prefix, acc):
    if n == 1:
        acc.append(tuple(prefix + [deg]))
        return
    for a in range(deg + 1):
        _compositions(n - 1, deg - a, prefix + [a], acc)


def dvir_degree(m: int, n: int) -> int:
    """floor((n! m)^(1/n)) + 1, by exact integer root."""
    return iroot(factorial(n) * m, n) + 1


def _check_points(m: int, field: Field):
    cap = MAX_POINTS["fp" if field.p is not None else "rat"]
    if m > cap:
        raise ValueError(f"{m} points exceeds the dense-elimination cap of {cap} for {field.tag}")


def _check_cells(rows: int, cols: int):
    if rows * cols > MAX_CELLS:
        raise ValueError(f"a {rows} x {cols} evaluation matrix exceeds the cap of {MAX_CELLS} entries")


class EvaluationTable:
    """Monomial evaluations of a fixed point list, extended on demand.

    ``_mod`` holds the table modulo q (q = p over small F_p, q = 2^31 - 1 over
    Q) as an int64 array; over small F_p it is the exact table.  Exact integer
    rows (Q, or huge p) are built lazily since most queries never need them.
    """

    def __init__(self, points: Sequence[Sequence], field: Field, n: int | None = None):
        self.field = field
        self.points = [tuple(field(x) for x in pt) for pt in points]
        if n is None:
            if not self.points:
                raise ValueError("n is required for an empty point list")
            n = len(self.points[0])
        if any(len(pt) != n for pt in self.points):
            raise ValueError("point of the wrong dimension")
        self.n = n
        self.m = len(self.points)
        self.degree = -1
        self.monos: list[tuple] = []
        p = field.p
        if p is None:
            self._scale = [lcm(*(x.denominator for x in pt)) if pt else 1 for pt in self.points]
            self._ipts = [tuple(int(x * D) for x in pt) for pt, D in zip(self.points, self._scale)]
            self._q = CERT_PRIME
            self._mod_ok = all(D % CERT_PRIME for D in self._scale)
        else:
            self._ipts = [tuple(int(x) for x in pt) for pt in self.points]
            self._q = p
            self._mod_ok = p < (1 << 31)
        self._mod = np.zeros((self.m, 0), dtype=np.int64) if self._mod_ok else None
        self._exact: list[list[int]] | None = None
        self._verified = None  # (poly, rows, d) of the last exact check
        self._exact_cols = 0

    @property
    def exact_is_mod(self) -> bool:
        return self.field.p is not None and self._mod_ok

    def ncols(self, d: int) -> int:
        return comb(d + self.n, self.n)

    def ensure(self, d: int):
        if d <= self.degree:
            return
        new = monomials(self.n, d)[len(self.monos):]
        self.monos.extend(new)
        self.degree = d
        if self._mod is not None:
            self._mod = np.concatenate([self._mod, self._mod_columns(new)], axis=1)

    def _mod_columns(self, new):
        q, m = self._q, self.m
        if self.field.p is None:
            X = [[x.numerator * pow(x.denominator, -1, q) % q for x in pt] for pt in self.points]
        else:
            X = self._ipts
        X = np.array(X, dtype=np.int64).reshape(m, self.n)
        maxa = max((max(e) for e in new), default=0)
        pw = [np.ones((m, self.n), dtype=np.int64)]
        for _ in range(maxa):
            pw.append(pw[-1] * X % q)
        cols = np.empty((m, len(new)), dtype=np.int64)
        for c, e in enumerate(new):
            v = np.ones(m, dtype=np.int64)
            for j, a in enumerate(e):
                if a:
                    v = v * pw[a][:, j] % q
            cols[:, c] = v
        return cols

    def _ensure_exact(self, k: int):
        if self._exact is None:
            self._exact = [[] for _ in range(self.m)]
        if k <= self._exact_cols:
            return
        p = self.field.p
        new = self.monos[self._exact_cols:k]
        for row, pt in zip(self._exact, self._ipts):
            for e in new:
                v = 1
                for x, a in zip(pt, e):
                    if a:
                        v = v * pow(x, a, p) % p if p is not None else v * x**a
                row.append(v)
        self._exact_cols = k

    def rows(self, idx: Sequence[int], d: int, k: int | None = None) -> list[list[int]]:
        """Exact integer rows for degree d, optionally only the first k columns.

        Over Q row i is scaled by D_i^d where D_i is the common denominator of
        point i; row scaling changes neither rank nor kernel.
        """
        self.ensure(d)
        if k is None:
            k = self.ncols(d)
        if self.exact_is_mod:
            return self._mod[list(idx), :k].tolist()
        self._ensure_exact(k)
        if self.field.p is None:
            degs = [sum(e) for e in self.monos[:k]]
            out = []
            for i in idx:
                D = self._scale[i]
                row = self._exact[i][:k]
                out.append(row if D == 1 else [v * D ** (d - t) for v, t in zip(row, degs)])
            return out
        return [self._exact[i][:k] for i in idx]

    def mod_rank(self, idx: Sequence[int], k: int) -> int | None:
        """Rank mod q of the chosen rows, first k columns (None when unavailable)."""
        if self._mod is None:
            return None
        idx = list(idx)
        sub = self._mod[idx, :k]
        return rank_mod(sub.ravel().tolist(), len(idx), k, self._q)

    def rank(self, idx: Sequence[int], d: int) -> int:
        idx = list(idx)
        k = self.ncols(d)
        _check_cells(len(idx), k)
        self.ensure(d)
        r = self.mod_rank(idx, k)
        if r is not None and (self.exact_is_mod or r == min(len(idx), k)):
            return r
        return rank(self.rows(idx, d), self.field)

    def has_vanishing(self, idx: Sequence[int], d: int) -> bool:
        """True iff some nonzero polynomial of degree <= d vanishes at the chosen points."""
        if d < 0:
            return False
        idx = list(idx)
        k = self.ncols(d)
        if len(idx) < k:
            return True
        return self.rank(idx, d) < k

    def polynomial(self, idx: Sequence[int], d: int, columns: int | None = None):
        """First canonical kernel vector of the (first ``columns``) degree-d block.

        Returns (polynomial or None, rank of that block).
        """
        idx = list(idx)
        self.ensure(d)
        k = self.ncols(d) if columns is None else columns
        _check_cells(len(idx), k)
        if self.field.p is None and flint is not None and self._mod is not None and len(idx) * k > DIXON_CELLS:
            got = self._dixon_kernel_vector(idx, d, k)
            if got is not None:
                return got
        M = self.rows(idx, d, k)
        basis, rk = kernel(M, self.field, k, limit=1)
        if not basis:
            return None, rk
        terms = {e: c for e, c in zip(self.monos[:k], basis[0]) if c != 0}
        return MultiPoly(self.field, self.n, terms), rk

    def _dixon_kernel_vector(self, idx: list[int], d: int, k: int):
        """Kernel vector over Q from one square solve instead of a full echelon form.

        Row and column rank profiles are read off mod q; the chosen r x r block
        is nonsingular mod q, hence over Q, and Dixon lifting solves it exactly.
        Returns None when the mod-q rank profile is unusable (full column rank
        mod q, or the vector fails exact verification because q lost rank); the
        caller then falls back to exact elimination.
        """
        q = self._q
        sub = self._mod[idx, :k]
        A = flint.nmod_mat(len(idx), k, sub.ravel().tolist(), q)
        cols = _pivots(A)
        r = len(cols)
        if r == k:
            return None
        pivset = set(cols)
        free = next(j for j in range(k) if j not in pivset)
        Asub = flint.nmod_mat(len(idx), r, sub[:, cols].ravel().tolist(), q)
        rows = [idx[i] for i in _pivots(Asub.transpose())]
        exact = self._exact_rows(rows, d, cols + [free])
        M = flint.fmpz_mat([e[:-1] for e in exact])
        b = flint.fmpz_mat([[-e[-1]] for e in exact])
        X = flint.fmpq_mat(M).solve(flint.fmpq_mat(b), algorithm="dixon")
        # integer kernel vector: den at the free column, numerators at the pivots
        num, den = X.numer_denom()
        coeffs = [0] * k
        coeffs[free] = int(den)
        for i, c in enumerate(cols):
            coeffs[c] = int(num[i, 0])
        if not self._vanishes_exact(coeffs, idx, d):
            return None
        poly = MultiPoly(self.field, self.n, {e: c for e, c in zip(self.monos, coeffs) if c})
        self._verified = (poly, tuple(idx), d)
        return poly, r

    def _exact_rows(self, ids: Sequence[int], d: int, cols: Sequence[int]) -> list[list[int]]:
        """Exact (denominator-scaled) monomial values for selected rows and columns over Q."""
        exps = [self.monos[c] for c in cols]
        top = max((max(e) for e in exps), default=0)
        out = []
        for i in ids:
            pt, D = self._ipts[i], self._scale[i]
            pw = []
            for x in pt:
                row = [1]
                for _ in range(top):
                    row.append(row[-1] * x)
                pw.append(row)
            if D == 1:
                vals = []
                for e in exps:
                    v = 1
                    for j, a in enumerate(e):
                        if a:
                            v *= pw[j][a]
                    vals.append(v)
            else:
                Dp = [1]
                for _ in range(d):
                    Dp.append(Dp[-1] * D)
                vals = []
                for e in exps:
                    v = Dp[d - sum(e)]
                    for j, a in enumerate(e):
                        if a:
                            v *= pw[j][a]
                    vals.append(v)
            out.append(vals)
        return out

    def _vanishes_exact(self, coeffs: list[int], idx: Sequence[int], d: int) -> bool:
        """Integer coefficient vector against the exact rows, multiplied out in FLINT."""
        kk = max(i for i, c in enumerate(coeffs) if c) + 1
        rows = self._exact_rows(idx, d, range(kk))
        return (flint.fmpz_mat(rows) * flint.fmpz_mat([[c] for c in coeffs[:kk]])).is_zero()

    def check_vanishes(self, poly: MultiPoly, idx: Sequence[int], d: int):
        """Raise unless ``poly`` (degree <= d) is nonzero and zero at every chosen point."""
        if poly is None or poly.is_zero():
            raise ArithmeticError("kernel vector produced the zero polynomial")
        v = self._verified
        if v is not None and v[0] is poly and v[2] == d and v[1] == tuple(idx):
            return
        k = self.ncols(d)
        coeffs = [poly.coefficient(e) for e in self.monos[:k]]
        p = self.field.p
        if p is None:
            den = lcm(*(c.denominator for c in coeffs))
            coeffs = [int(c * den) for c in coeffs]
        if self.exact_is_mod and p < (1 << 20):
            vals = self._mod[list(idx), :k] @ np.array(coeffs, dtype=np.int64) % p
            ok = not np.any(vals)
        elif p is None and flint is not None:
            ok = self._vanishes_exact(coeffs, idx, d)
        else:
            ok = True
            for row in self.rows(idx, d):
                s = sum(a * c for a, c in zip(row, coeffs))
                if (s % p if p is not None else s) != 0:
                    ok = False
                    break
        if not ok:
            raise ArithmeticError("vanishing polynomial failed its evaluation check")


def _pivots(A) -> list[int]:
    """Pivot columns of an nmod_mat."""
    R, r = A.rref()
    out, j = [], 0
    for i in range(r):
        while int(R[i, j]) == 0:
            j += 1
        out.append(j)
        j += 1
    return out


def evaluation_matrix(points: Sequence[Sequence], field: Field, d: int, n: int | None = None):
    """Exact m x C(d+n, n) matrix of monomial values (rows rescaled over Q) and its column monomials."""
    tab = EvaluationTable(points, field, n)
    return tab.rows(range(tab.m), d), tab.monos[:tab.ncols(d)]


def has_vanishing(points, field: Field, d: int, n: int | None = None) -> bool:
    tab = EvaluationTable(points, field, n)
    return tab.has_vanishing(range(tab.m), d)


def dvir_polynomial(points: Sequence[Sequence], field: Field, n: int | None = None) -> VanishingResult:
    """Nonzero polynomial of degree <= floor((n! m)^(1/n)) + 1 vanishing on the points."""
    if n is None:
        if not points:
            raise ValueError("n is required for an empty point list")
        n = len(points[0])
    m = len(points)
    if m == 0:
        return VanishingResult(MultiPoly.constant(field, n, 1), 0, 1)
    _check_points(m, field)
    d = dvir_degree(m, n)
    C = comb(d + n, n)
    if C <= m:  # cannot happen: C(d+n, n) > d^n / n! > m
        raise AssertionError("dimension count failed")
    tab = EvaluationTable(points, field, n)
    idx = range(m)
    tab.ensure(d)
    if tab.exact_is_mod:
        poly, rk = tab.polynomial(idx, d)
    else:
        poly, _ = tab.polynomial(idx, d, columns=min(C, m + 1))
        rk = tab.rank(idx, d)
    tab.check_vanishes(poly, idx, d)
    return VanishingResult(poly, d, C - rk)


def minimal_vanishing_degree(points: Sequence[Sequence], field: Field, n: int | None = None):
    """(d_min, poly): the least d admitting a nonzero vanishing polynomial, found by d = 0, 1, ..."""
    if not points:
        raise ValueError("minimal degree needs a nonempty point set")
    tab = EvaluationTable(points, field, n)
    idx = list(range(tab.m))
    d = min_degree_of(tab, idx)
    poly, _ = tab.polynomial(idx, d)
    tab.check_vanishes(poly, idx, d)
    if poly.degree != d:
        raise AssertionError("minimal-degree kernel vector has the wrong degree")
    return d, poly


def min_degree_of(tab: EvaluationTable, idx: Sequence[int], start: int = 0) -> int:
    d = start
    while not tab.has_vanishing(idx, d):
        d += 1
    return d
