"""Deterministic generators for extremal and counterexample arrangements.

Random arrangements use numpy's ``Generator(PCG64(seed))``, whose stream is
fixed across platforms, so a seed pins the arrangement byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .algebra.field import Field
from .geometry import Arrangement, Line, canonicalize_line


def _check_small_ints(field: Field, top: int, what: str):
    if field.p is not None and top > field.p:
        raise ValueError(f"{what} needs {top} distinct field elements but p = {field.p}")


def gen_star(L: int, n: int, field: Field) -> Arrangement:
    """L lines through the origin with moment-curve directions (1, t, ..., t^(n-1)).

    Any n of these directions form a Vandermonde matrix with distinct nodes,
    hence span F^n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if L < n:
        raise ValueError("a star needs L >= n")
    _check_small_ints(field, L, "gen_star")
    origin = (field.zero,) * n
    lines = [canonicalize_line(origin, [field.pow(field(t), k) for k in range(n)], field) for t in range(L)]
    return Arrangement(field, n, lines)


def gen_grid(N: int, n: int, field: Field) -> Arrangement:
    """All axis-parallel lines through {0..N-1}^n, grouped by axis."""
    if N < 1:
        raise ValueError("grid side must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_small_ints(field, N, "gen_grid")
    lines = []
    for k in range(n):
        d = tuple(field.one if j == k else field.zero for j in range(n))
        for rest in itertools.product(range(N), repeat=n - 1):
            base = list(rest[:k]) + [0] + list(rest[k:])
            lines.append(Line(tuple(field(c) for c in base), d))
    return Arrangement(field, n, lines)


def gen_coplanar_lattice(L: int):
    """Three line families in the plane z = 0 over Q covering {1..L}^2.

    Family 1 is the L lines x = i, family 2 the L lines y = j, and family 3
    the 2L - 1 diagonals y = x + c through the lattice.
    """
    if L < 1:
        raise ValueError("L must be positive")
    F = Field.rational()
    z = F.zero
    one = F.one
    v = [Line((F(i), z, z), (z, one, z)) for i in range(1, L + 1)]
    h = [Line((z, F(j), z), (one, z, z)) for j in range(1, L + 1)]
    g = [Line((z, F(c), z), (one, one, z)) for c in range(-(L - 1), L)]
    return Arrangement(F, 3, v), Arrangement(F, 3, h), Arrangement(F, 3, g)


def union(arrs) -> Arrangement:
    """One arrangement holding the lines of all inputs (repeated lines become weights)."""
    arrs = list(arrs)
    F, n = arrs[0].field, arrs[0].n
    lines, weights = [], []
    for a in arrs:
        if a.field != F or a.n != n:
            raise ValueError("cannot merge arrangements over different spaces")
        lines.extend(a.lines)
        weights.extend(a.weight(i) for i in range(a.L))
    w = None if all(x == 1 for x in weights) and len(set(lines)) == len(lines) else weights
    return Arrangement(F, n, lines, w)


def gen_grid_multijoint(N: int):
    """gen_grid(N, 3) over Q split into its three axis families."""
    arr = gen_grid(N, 3, Field.rational())
    m = N * N
    return tuple(Arrangement(arr.field, 3, arr.lines[k * m:(k + 1) * m]) for k in range(3))


def line_count(p: int, n: int) -> int:
    """Number of lines in F_p^n."""
    return p ** (n - 1) * (p**n - 1) // (p - 1)


def line_from_index(idx: int, p: int, n: int, field: Field) -> Line:
    """Bijection from range(line_count(p, n)) onto canonical lines.

    Directions are ordered by pivot position; the free coordinates of the
    direction and of the base are read off as base-p digits.
    """
    for k in range(n):
        ndir = p ** (n - 1 - k)
        block = ndir * p ** (n - 1)
        if idx < block:
            break
        idx -= block
    else:
        raise IndexError("line index out of range")
    di, bi = divmod(idx, p ** (n - 1))
    d = [0] * n
    d[k] = 1
    for j in range(n - 1, k, -1):
        di, d[j] = divmod(di, p)
    b = []
    for _ in range(n - 1):
        bi, r = divmod(bi, p)
        b.append(r)
    base = b[:k] + [0] + b[k:]
    return Line(tuple(field(c) for c in base), tuple(field(c) for c in d))


def gen_random(L: int, n: int, field: Field, seed: int) -> Arrangement:
    """L distinct uniformly random lines of F_p^n."""
    if field.p is None:
        raise ValueError("gen_random needs a prime field")
    p = field.p
    total = line_count(p, n)
    if L > total:
        raise ValueError(f"F_{p}^{n} has only {total} lines, asked for {L}")
    if L < 0:
        raise ValueError("L must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    if 2 * L > total:
        # dense regime: sample indices without replacement
        idx = rng.choice(total, size=L, replace=False)
        return Arrangement(field, n, [line_from_index(int(i), p, n, field) for i in idx])
    seen, lines = set(), []
    while len(lines) < L:
        d = [int(v) for v in rng.integers(0, p, size=n)]
        b = [int(v) for v in rng.integers(0, p, size=n)]
        if not any(d):
            continue
        ln = canonicalize_line(b, d, field)
        if ln not in seen:
            seen.add(ln)
            lines.append(ln)
    return Arrangement(field, n, lines)


def gen_random_rational(L: int, n: int, seed: int, box: int = 5) -> Arrangement:
    """L distinct random lines over Q with integer base/direction entries in [-box, box]."""
    F = Field.rational()
    rng = np.random.Generator(np.random.PCG64(seed))
    seen, lines = set(), []
    while len(lines) < L:
        d = [int(v) for v in rng.integers(-box, box + 1, size=n)]
        b = [int(v) for v in rng.integers(-box, box + 1, size=n)]
        if not any(d):
            continue
        ln = canonicalize_line(b, d, F)
        if ln not in seen:
            seen.add(ln)
            lines.append(ln)
    return Arrangement(F, n, lines)


def gen_uniform_points(S: int, n: int, seed: int, bits: int = 20) -> list[tuple]:
    """S seeded points of [0, 1)^n over Q with denominator 2^bits."""
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.integers(0, 1 << bits, size=(S, n))
    return [tuple(Fraction(int(v), 1 << bits) for v in row) for row in raw]


KINDS = ("star", "grid", "coplanar_lattice", "grid_multijoint", "random")


@dataclass
class GeneratorSpec:
    kind: str
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def build(self):
        """Arrangement, or a triple of them for the multijoint families."""
        P = self.params
        fld = P.get("field", Field.rational())
        if isinstance(fld, str):
            fld = Field.from_tag(fld)
        if self.kind == "star":
            return gen_star(int(P["L"]), int(P.get("n", 3)), fld)
        if self.kind == "grid":
            return gen_grid(int(P["N"]), int(P.get("n", 3)), fld)
        if self.kind == "coplanar_lattice":
            return gen_coplanar_lattice(int(P["L"]))
        if self.kind == "grid_multijoint":
            return gen_grid_multijoint(int(P["N"]))
        return gen_random(int(P["L"]), int(P.get("n", 3)), fld, int(P.get("seed", 0)))
