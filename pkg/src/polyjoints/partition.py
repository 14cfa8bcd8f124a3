"""Polynomial ham-sandwich bisection and iterated cell decomposition over Q.

Searches may use floating point internally; every polynomial that leaves
this module has rational coefficients and its sign counts were recomputed in
exact integer arithmetic.  Points on a zero set count toward neither side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb, lcm
from typing import Sequence

import numpy as np

from .algebra.calculus import restrict_to_line
from .algebra.field import Field
from .algebra.poly import MultiPoly
from .algebra.univariate import UniPoly, sample_between_roots
from .geometry import Line
from .vanishing import monomials

QQ = Field.rational()
ROUND_BITS = 32
RESTARTS = 64


class SearchFailed(RuntimeError):
    pass


class PartitionError(RuntimeError):
    pass


# -- exact sign evaluation --------------------------------------------------------


class PointBlock:
    """Rational points stored as integer numerators over a per-point denominator."""

    def __init__(self, points: Sequence[Sequence]):
        self.points = [tuple(Fraction(x) for x in p) for p in points]
        self.n = len(self.points[0]) if self.points else 0
        dens, nums = [], []
        for p in self.points:
            D = lcm(*(x.denominator for x in p)) if p else 1
            dens.append(D)
            nums.append([int(x * D) for x in p])
        self.D = np.array(dens, dtype=object)
        self.X = [np.array([r[j] for r in nums], dtype=object) for j in range(self.n)]

    def __len__(self):
        return len(self.points)

    def signs(self, poly: MultiPoly) -> np.ndarray:
        """Exact sign of poly at every point, as an int8 array."""
        m = len(self.points)
        if m == 0:
            return np.zeros(0, dtype=np.int8)
        if poly.is_zero():
            return np.zeros(m, dtype=np.int8)
        deg = poly.degree
        den = lcm(*(Fraction(c).denominator for c in poly.terms.values()))
        pw: list[dict] = [{0: 1} for _ in range(self.n)]
        Dp = {0: 1}

        def xp(j, a):
            if a not in pw[j]:
                pw[j][a] = xp(j, a - 1) * self.X[j]
            return pw[j][a]

        def dp(k):
            if k not in Dp:
                Dp[k] = dp(k - 1) * self.D
            return Dp[k]

        total = np.zeros(m, dtype=object)
        for e, c in poly.terms.items():
            term = int(c * den) * dp(deg - sum(e))
            for j, a in enumerate(e):
                if a:
                    term = term * xp(j, a)
            total = total + term
        return np.sign(total).astype(np.int8)


def side_counts(poly: MultiPoly, pts: PointBlock | Sequence) -> tuple[int, int, int]:
    """(#positive, #negative, #zero), exactly."""
    if not isinstance(pts, PointBlock):
        pts = PointBlock(pts)
    s = pts.signs(poly)
    return int(np.sum(s > 0)), int(np.sum(s < 0)), int(np.sum(s == 0))


def _bisects(poly: MultiPoly, blocks: Sequence[PointBlock], slacks: Sequence[int]) -> bool:
    for B, sl in zip(blocks, slacks):
        pos, neg, _ = side_counts(poly, B)
        half = (len(B) + 1) // 2 + sl
        if pos > half or neg > half:
            return False
    return True


# -- exact degree-one constructions ----------------------------------------------


def _median(vals):
    v = sorted(vals)
    m = len(v)
    return v[m // 2] if m % 2 else (v[m // 2 - 1] + v[m // 2]) / 2


def median_hyperplane(points: Sequence[Sequence], n: int, axis: int = 0) -> MultiPoly:
    """x_axis - median: at most ceil(m/2) points strictly on either side."""
    c = _median([Fraction(p[axis]) for p in points])
    return MultiPoly.var(QQ, n, axis) - MultiPoly.constant(QQ, n, c)


def _line_through(a, b, n: int, axes=(0, 1)) -> MultiPoly | None:
    """Polynomial of the line through planar points a, b in coordinates ``axes``."""
    i, j = axes
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx == 0 and dy == 0:
        return None
    X, Y = MultiPoly.var(QQ, n, i), MultiPoly.var(QQ, n, j)
    # normal (-dy, dx)
    return X * (-dy) + Y * dx + MultiPoly.constant(QQ, n, dy * a[0] - dx * a[1])


def _line_with_normal(a, u, n: int, axes=(0, 1)) -> MultiPoly:
    i, j = axes
    X, Y = MultiPoly.var(QQ, n, i), MultiPoly.var(QQ, n, j)
    return X * u[0] + Y * u[1] - MultiPoly.constant(QQ, n, u[0] * a[0] + u[1] * a[1])


def _middle(proj_idx: np.ndarray, m: int):
    return [int(proj_idx[m // 2])] if m % 2 else [int(proj_idx[m // 2 - 1]), int(proj_idx[m // 2])]


def ham_sandwich_line(A: Sequence, B: Sequence, n: int, axes=(0, 1), iters: int = 80) -> MultiPoly | None:
    """Exact line bisecting two planar sets (coordinates ``axes``), or None.

    The normal direction u(t) = (1 - t^2, 2t) sweeps a half-turn for t in
    [-1, 1] and g(t) = median(u.A) - median(u.B) changes sign across it.  Float
    bisection brackets a root; candidate lines through the median points (or
    midpoints of middle pairs) found near the root are then checked exactly.
    """
    i, j = axes
    PA = [(Fraction(p[i]), Fraction(p[j])) for p in A]
    PB = [(Fraction(p[i]), Fraction(p[j])) for p in B]
    fa = np.array([[float(x), float(y)] for x, y in PA]).reshape(-1, 2)
    fb = np.array([[float(x), float(y)] for x, y in PB]).reshape(-1, 2)

    def u(t):
        return np.array([1 - t * t, 2 * t])

    def g(t):
        return np.median(fa @ u(t)) - np.median(fb @ u(t))

    lo, hi = -1.0, 1.0
    glo = g(lo)
    probes = [lo, hi]
    for _ in range(iters):
        mid = (lo + hi) / 2
        gm = g(mid)
        probes.append(mid)
        if gm == 0:
            break
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    ts = probes[-6:] + [lo, hi]
    blocks = [PointBlock(A), PointBlock(B)]
    tried = set()

    def anchors(P, fP, t):
        order = np.argsort(fP @ u(t), kind="stable")
        mids = _middle(order, len(P))
        pts = [P[k] for k in mids]
        if len(pts) == 2:
            pts.append(((pts[0][0] + pts[1][0]) / 2, (pts[0][1] + pts[1][1]) / 2))
        return pts

    for t in ts:
        aa, bb = anchors(PA, fa, t), anchors(PB, fb, t)
        tq = Fraction(t).limit_denominator(1 << ROUND_BITS)
        uq = (1 - tq * tq, 2 * tq)
        cands = [_line_through(a, b, n, axes) for a in aa for b in bb]
        cands += [_line_with_normal(a, uq, n, axes) for a in aa + bb]
        for c in cands:
            if c is None or c in tried:
                continue
            tried.add(c)
            if _bisects(c, blocks, (0, 0)):
                return c
    return None


def pair_search_line(sets: Sequence[Sequence], n: int, axes=(0, 1)) -> MultiPoly | None:
    """Exhaustive exact search over lines through point pairs and axis-parallel medians."""
    blocks = [PointBlock(S) for S in sets]
    i, j = axes
    pts = list(dict.fromkeys((Fraction(p[i]), Fraction(p[j])) for S in sets for p in S))
    cands = [median_hyperplane(S, n, axis) for S in sets if S for axis in axes]
    for a_i in range(len(pts)):
        for b_i in range(a_i + 1, len(pts)):
            cands.append(_line_through(pts[a_i], pts[b_i], n, axes))
    for c in cands:
        if c is not None and _bisects(c, blocks, (0,) * len(blocks)):
            return c
    return None


# -- heuristic search -------------------------------------------------------------------


def _affine_normalizer(points: Sequence[Sequence], n: int):
    """Exact center and half-width per coordinate mapping the box onto [-1, 1]^n."""
    center, half = [], []
    for j in range(n):
        col = [Fraction(p[j]) for p in points]
        lo, hi = min(col), max(col)
        center.append((lo + hi) / 2)
        half.append((hi - lo) / 2 if hi > lo else Fraction(1))
    return center, half


def heuristic_bisect(sets: Sequence[Sequence], d: int, n: int, slacks: Sequence[int],
                     seed: int = 0, restarts: int = RESTARTS) -> MultiPoly:
    """Randomised Gauss-Newton search on a smoothed imbalance, verified exactly.

    Points are mapped to [-1, 1]^n and lifted to all monomials of degree <= d.
    The smoothed imbalance of set i is mean(tanh(beta * <c, phi(p)>)); a
    minimum-norm Newton step drives all of them to zero while beta is
    annealed upward.  Candidates are rounded to denominator 2^32 and accepted
    only if the exact recount meets the slack.
    """
    allpts = [p for S in sets for p in S]
    center, half = _affine_normalizer(allpts, n)
    monos = monomials(n, d)
    fcenter = np.array([float(c) for c in center])
    fhalf = np.array([float(h) for h in half])

    def lift(S):
        Y = (np.array([[float(x) for x in p] for p in S]).reshape(-1, n) - fcenter) / fhalf
        return np.stack([np.prod(Y ** np.array(e), axis=1) for e in monos], axis=1)

    Phis = [lift(S) for S in sets]
    sizes = np.array([len(S) for S in sets], dtype=float)
    limits = np.array([(len(S) + 1) // 2 + sl for S, sl in zip(sets, slacks)])
    blocks = [PointBlock(S) for S in sets]
    images = [(MultiPoly.var(QQ, n, j) - MultiPoly.constant(QQ, n, center[j])).scale(1 / half[j])
              for j in range(n)]
    rng = np.random.Generator(np.random.PCG64(seed))
    K = len(monos)

    def float_ok(c):
        for Phi, lim in zip(Phis, limits):
            z = Phi @ c
            if np.sum(z > 0) > lim or np.sum(z < 0) > lim:
                return False
        return True

    for _ in range(restarts):
        c = rng.standard_normal(K)
        c /= np.linalg.norm(c)
        for beta in (1.0, 3.0, 10.0, 30.0, 100.0, 300.0):
            for _ in range(12):
                s = np.empty(len(sets))
                J = np.empty((len(sets), K))
                for i, Phi in enumerate(Phis):
                    th = np.tanh(beta * (Phi @ c))
                    s[i] = th.mean()
                    J[i] = beta * ((1 - th * th)[:, None] * Phi).mean(axis=0)
                step = np.linalg.lstsq(J, -s, rcond=None)[0]
                c = c + step
                nrm = np.linalg.norm(c)
                if not np.isfinite(nrm) or nrm == 0:
                    break
                c /= nrm
            if not np.all(np.isfinite(c)):
                break
            if float_ok(c):
                q = [Fraction(round(float(x) * (1 << ROUND_BITS)), 1 << ROUND_BITS) for x in c]
                if not any(q):
                    continue
                local = MultiPoly(QQ, n, {e: v for e, v in zip(monos, q) if v})
                poly = local.substitute(images)
                if not poly.is_zero() and _bisects(poly, blocks, slacks):
                    return poly
    raise SearchFailed(f"no degree-{d} bisector of {len(sets)} sets within the slack after {restarts} restarts")


# -- public bisection ------------------------------------------------------------------


def default_slacks(sets: Sequence[Sequence], exact: bool) -> list[int]:
    return [0 if exact else math.ceil(len(S) / 20) for S in sets]


def ham_sandwich_bisect(sets: Sequence[Sequence], d: int, mode: str = "auto",
                        slack: int | None = None, seed: int = 0, restarts: int = RESTARTS) -> MultiPoly:
    """Nonzero polynomial of degree <= d whose zero set (nearly) bisects every set."""
    sets = [list(S) for S in sets]
    nonempty = [S for S in sets if S]
    if not nonempty:
        raise ValueError("need at least one nonempty point set")
    n = len(nonempty[0][0])
    if len(sets) > comb(d + n, n) - 1:
        raise ValueError(f"{len(sets)} sets exceed C(d+n, n) - 1 = {comb(d + n, n) - 1}")
    if mode not in ("auto", "exact-d1", "heuristic"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode in ("auto", "exact-d1") and d == 1:
        found = None
        if len(nonempty) == 1:
            found = median_hyperplane(nonempty[0], n)
        elif len(nonempty) == 2 and n >= 2:
            found = ham_sandwich_line(nonempty[0], nonempty[1], n)
            if found is None and sum(map(len, nonempty)) <= 400:
                found = pair_search_line(nonempty, n)
        if found is not None:
            sl = [0] * len(sets) if slack is None else [slack] * len(sets)
            if _bisects(found, [PointBlock(S) for S in sets], sl):
                return found
        if mode == "exact-d1" and n == 2 and len(nonempty) <= 2:
            pass  # degenerate input: fall through to the heuristic
    sl = default_slacks(sets, exact=False) if slack is None else [slack] * len(sets)
    return heuristic_bisect(sets, d, n, sl, seed=seed, restarts=restarts)


# -- cell decomposition --------------------------------------------------------------


@dataclass
class PartitionPolynomial:
    factors: list
    J: int
    total_degree: int

    def product(self, n: int) -> MultiPoly:
        out = MultiPoly.constant(QQ, n, 1)
        for f in self.factors:
            out = out * f
        return out


@dataclass
class PartitionResult:
    poly: PartitionPolynomial
    cells: dict
    on_zero_set: list
    S: int
    C: Fraction
    n: int
    step_degrees: list = dc_field(default_factory=list)

    @property
    def max_cell(self) -> int:
        return max((len(v) for v in self.cells.values()), default=0)

    @property
    def measured_C(self) -> Fraction:
        """max cell * 2^J / S: the smallest constant the run supports."""
        return Fraction(self.max_cell * 2**self.poly.J, self.S) if self.S else Fraction(0)

    def cell_bound_holds(self) -> bool:
        return self.max_cell * 2**self.poly.J <= self.C * self.S

    def coverage_ok(self) -> bool:
        return len(self.on_zero_set) + sum(len(v) for v in self.cells.values()) == self.S


def _step_degree(num_sets: int, n: int) -> int:
    D = 1
    while comb(D + n, n) - 1 < num_sets:
        D += 1
    return D


def gk_partition(points: Sequence[Sequence], d: int, C: Fraction | int = 4, mode: str = "heuristic",
                 seed: int = 0, restarts: int = RESTARTS) -> PartitionResult:
    """Iterated bisection until 2^J reaches d^n or the degree budget d is spent.

    Steps one and two are exact hyperplanes (a median in x1, then a two-set
    ham-sandwich line in (x1, x2)).  Later steps bisect all current cells at
    once with the least degree D satisfying C(D+n, n) - 1 >= #cells.  When
    that D no longer fits the budget, one last factor of the leftover degree
    bisects the largest cells it can handle, provided the cells it leaves
    alone still meet the bound.  In mode "exact-d1" only the two exact linear
    steps are taken.
    """
    if d <= 1:
        raise ValueError("partition degree must exceed 1")
    if mode not in ("heuristic", "exact-d1"):
        raise ValueError(f"unknown mode {mode!r}")
    pts = [tuple(Fraction(x) for x in p) for p in points]
    S = len(pts)
    n = len(pts[0]) if pts else 2
    cells: dict[str, list] = {"": list(range(S))}
    zero: list[int] = []
    factors, degs = [], []
    block = PointBlock(pts) if pts else None
    j = 0
    while cells and 2**j < d**n:
        sets = [[pts[k] for k in v] for v in cells.values()]
        D = 1 if j < 2 else _step_degree(len(sets), n)
        partial = False
        if sum(degs) + D > d:
            # spend what is left of the budget on the largest cells only
            D = d - sum(degs)
            if j < 2 or D < 1:
                break
            sets = sorted(sets, key=len, reverse=True)[:comb(D + n, n) - 1]
            partial = True
        if j >= 2 and mode == "exact-d1":
            break
        if j == 0:
            f = median_hyperplane(pts, n, 0)
        elif j == 1:
            f = _second_step(sets, n, seed)
        else:
            f = ham_sandwich_bisect(sets, D, mode="heuristic", seed=seed + j, restarts=restarts)
        s = block.signs(f)
        new: dict[str, list] = {}
        hit = []
        for key, members in cells.items():
            for k in members:
                if s[k] == 0:
                    hit.append(k)
                else:
                    new.setdefault(key + ("+" if s[k] > 0 else "-"), []).append(k)
        if partial and max(map(len, new.values()), default=0) * 2 ** (j + 1) > Fraction(C) * S:
            break  # the untouched cells would break the per-cell bound
        zero.extend(hit)
        cells = dict(sorted(new.items()))
        factors.append(f)
        degs.append(f.degree)
        j += 1
    res = PartitionResult(
        PartitionPolynomial(factors, j, sum(degs)),
        {k: [pts[i] for i in v] for k, v in cells.items()},
        [pts[i] for i in sorted(zero)], S, Fraction(C), n, degs)
    if not res.coverage_ok():
        raise PartitionError("coverage check failed")
    if not res.cell_bound_holds():
        raise PartitionError(f"largest cell {res.max_cell} exceeds C*S/2^J with C = {res.C}")
    return res


def _second_step(sets, n: int, seed: int) -> MultiPoly:
    nonempty = [S for S in sets if S]
    if len(nonempty) == 1:
        return median_hyperplane(nonempty[0], n, 1 if n > 1 else 0)
    found = ham_sandwich_line(nonempty[0], nonempty[1], n)
    if found is None and sum(map(len, nonempty)) <= 400:
        found = pair_search_line(nonempty, n)
    if found is None:
        found = ham_sandwich_bisect(nonempty, 1, mode="heuristic", seed=seed)
    return found


# -- line crossings -------------------------------------------------------------------


def line_cell_crossings(line: Line, result: PartitionResult) -> int:
    """Number of distinct sign vectors of the factors met along the line."""
    restr = []
    for f in result.poly.factors:
        r = restrict_to_line(f, line.base, line.dir)
        if r.is_zero():
            raise ValueError("the line lies in the zero set of a partition factor")
        restr.append(r)
    if not restr:
        return 1
    prod = UniPoly.constant(QQ, 1)
    for r in restr:
        prod = prod * r
    seen = set()
    for t in sample_between_roots(prod):
        seen.add(tuple(1 if r(t) > 0 else -1 for r in restr))
    return len(seen)
