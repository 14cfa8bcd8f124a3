"""Point-line incidences, rich points and the full finite-field census."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .algebra.field import Field
from .configs import line_count
from .geometry import Arrangement, Line, Point, canonicalize_line, concurrency_map
from .numeric import rational_power

CENSUS_POINT_CAP = 10**7
CENSUS_WORK_CAP = 2 * 10**8  # |lines| * p array entries
HASH_PRIME = 2**31 - 1


@dataclass(frozen=True)
class IncidenceReport:
    P: int
    L: int
    I: int
    st_rhs: Decimal
    ratio: Decimal

    def to_json(self) -> dict:
        return {"P": self.P, "L": self.L, "I": self.I, "st_rhs": str(self.st_rhs), "ratio": str(self.ratio)}


def st_rhs(P: int, L: int, places: int = 30) -> Decimal:
    """P^(2/3) L^(2/3) + P + L, floored to ``places`` digits."""
    return rational_power(P * L, Fraction(2, 3), places) + P + L


def make_report(P: int, L: int, I: int, places: int = 30) -> IncidenceReport:
    if I > P * L:
        raise AssertionError("more incidences than point-line pairs")
    rhs = st_rhs(P, L, places)
    with localcontext() as ctx:
        ctx.prec = places + 20
        ratio = (Decimal(I) / rhs).quantize(Decimal(1).scaleb(-places), rounding="ROUND_FLOOR") if rhs else Decimal(0)
    return IncidenceReport(P, L, I, rhs, ratio)


def _canonical(lines: Sequence[Line], field: Field) -> list[Line]:
    return [canonicalize_line(l.base, l.dir, field) for l in lines]


class _PointKeys:
    """Canonical-base keys of the lines through many points, one direction at a time.

    Over F_p the points live in an int64 array; over Q they are integer
    numerators over one common denominator D, so a key for direction d (with
    its own common denominator e) is the integer vector D e (x - x_k d).
    """

    def __init__(self, pts: Sequence[Point], field: Field):
        self.field = field
        self.p = field.p
        if self.p is not None:
            self.X = np.array(pts, dtype=object if self.p >= (1 << 31) else np.int64).reshape(len(pts), -1)
            self.D = 1
        else:
            self.D = lcm(*(x.denominator for pt in pts for x in pt)) if pts else 1
            self.X = np.array([[int(x * self.D) for x in pt] for pt in pts], dtype=object).reshape(len(pts), -1)

    def _scaled_dir(self, d: Point):
        if self.p is not None:
            return np.array(d, dtype=self.X.dtype), 1
        e = lcm(*(x.denominator for x in d))
        return np.array([int(x * e) for x in d], dtype=object), e

    def keys(self, d: Point) -> list:
        k = next(i for i, x in enumerate(d) if x != 0)
        v, e = self._scaled_dir(d)
        K = self.X * e - self.X[:, k:k + 1] * v[None, :]
        if self.p is not None:
            K = K % self.p
        return [tuple(r) for r in K.tolist()]

    def base_key(self, base: Point, d: Point):
        """The key a point would need to lie on the line (base, d); None if impossible."""
        if self.p is not None:
            return tuple(int(x) for x in base)
        _, e = self._scaled_dir(d)
        out = []
        for x in base:
            y = x * self.D * e
            if y.denominator != 1:
                return None
            out.append(int(y))
        return tuple(out)


def incidence_sums(points: Sequence[Point], lines: Sequence[Line], field: Field) -> tuple[int, int]:
    """(sum over points of lines through it, sum over lines of points on it).

    Lines and points are counted with multiplicity.  Both sums equal the
    number of incidences; they are accumulated separately as a check.
    """
    lines = _canonical(lines, field)
    pts = [tuple(field(x) for x in p) for p in points]
    if not pts or not lines:
        return 0, 0
    if field.p is None and all(x.denominator % HASH_PRIME for p in pts for x in p):
        return _hashed_sums(pts, lines, field)
    pk = _PointKeys(pts, field)
    by_dir: dict[Point, Counter] = {}
    for ln in lines:
        by_dir.setdefault(ln.dir, Counter())[ln.base] += 1
    per_point = np.zeros(len(pts), dtype=np.int64)
    per_line = 0
    for d, bases in by_dir.items():
        wanted = Counter()
        for b, m in bases.items():
            key = pk.base_key(b, d)
            if key is not None:
                wanted[key] += m
        keys = pk.keys(d)
        per_point += np.array([wanted.get(key, 0) for key in keys], dtype=np.int64)
        hits = Counter(keys)
        per_line += sum(hits.get(key, 0) * m for key, m in wanted.items())
    return int(per_point.sum()), per_line


def _hashed_sums(pts: list[Point], lines: list[Line], field: Field) -> tuple[int, int]:
    """Rational incidence sums through a mod-q fingerprint filter.

    A point lies on the line (b, d) iff x - x_k d = b, where k is the pivot of
    d.  Both sides are reduced mod q and folded into one int64 with random
    weights, so equal vectors always collide; every collision is then
    confirmed in exact arithmetic, which removes the rare false matches.
    """
    q = HASH_PRIME
    n = len(pts[0])
    X = np.array([[x.numerator % q * pow(x.denominator, -1, q) % q for x in p] for p in pts], dtype=np.int64)
    w = np.random.Generator(np.random.PCG64(n)).integers(1, q, size=n, dtype=np.int64)

    def fold(M):
        h = np.zeros(M.shape[0], dtype=np.int64)
        for j in range(n):
            h = (h + M[:, j] * w[j]) % q
        return h

    def red(x):
        x = Fraction(x)
        if x.denominator % q == 0:
            return None
        return x.numerator % q * pow(x.denominator, -1, q) % q

    by_dir: dict[Point, Counter] = {}
    for ln in lines:
        by_dir.setdefault(ln.dir, Counter())[ln.base] += 1
    per_point = np.zeros(len(pts), dtype=np.int64)
    per_line = 0
    for d, bases in by_dir.items():
        k = next(i for i, x in enumerate(d) if x != 0)
        dq = [red(x) for x in d]
        keyed: dict[int, list] = {}
        for b, m in bases.items():
            bq = [red(x) for x in b]
            if None in dq or None in bq:
                # q divides a denominator of the line itself: test it directly
                ln = Line(b, d)
                for i, pt in enumerate(pts):
                    if ln.contains(pt, field):
                        per_point[i] += m
                        per_line += m
                continue
            keyed.setdefault(int(fold(np.array([bq], dtype=np.int64))[0]), []).append((Line(b, d), m))
        if not keyed:
            continue
        h = fold((X - X[:, k:k + 1] * np.array(dq, dtype=np.int64)[None, :]) % q)
        wanted = np.array(sorted(keyed), dtype=np.int64)
        cand = np.nonzero(np.isin(h, wanted))[0]
        groups: dict[int, list] = {}
        for i in cand.tolist():
            groups.setdefault(int(h[i]), []).append(i)
            for ln, m in keyed[int(h[i])]:
                if ln.contains(pts[i], field):
                    per_point[i] += m
        for key, members in keyed.items():
            idx = groups.get(key, ())
            for ln, m in members:
                per_line += m * sum(1 for i in idx if ln.contains(pts[i], field))
    return int(per_point.sum()), per_line


def count_incidences(points: Sequence[Point], lines: Sequence[Line], field: Field) -> int:
    a, b = incidence_sums(points, lines, field)
    if a != b:
        raise AssertionError(f"incidence double count disagrees: {a} != {b}")
    return a


def count_incidences_naive(points: Sequence[Point], lines: Sequence[Line], field: Field) -> int:
    """Oracle: test every pair."""
    return sum(1 for ln in lines for pt in points if ln.contains(tuple(field(x) for x in pt), field))


def incidence_report(points: Sequence[Point], lines: Sequence[Line], field: Field) -> IncidenceReport:
    return make_report(len(points), len(lines), count_incidences(points, lines, field))


def rich_points(arr: Arrangement, k: int) -> list[Point]:
    """Points lying on at least k lines (weighted copies counted), sorted."""
    if k < 2:
        raise ValueError("k must be at least 2")
    out = []
    for pt, ids in concurrency_map(arr).items():
        if sum(arr.weight(i) for i in ids) >= k:
            out.append(pt)
    return out


def _census_lines(p: int, n: int):
    """All canonical lines of F_p^n as (dirs, bases) int64 arrays, pivot by pivot."""
    for k in range(n):
        free_d = n - 1 - k
        nd = p**free_d
        nb = p ** (n - 1)
        dirs = np.zeros((nd, n), dtype=np.int64)
        dirs[:, k] = 1
        idx = np.arange(nd)
        for j in range(n - 1, k, -1):
            idx, dirs[:, j] = np.divmod(idx, p)
        bases = np.zeros((nb, n), dtype=np.int64)
        idx = np.arange(nb)
        cols = [j for j in range(n) if j != k]
        for j in reversed(cols):
            idx, bases[:, j] = np.divmod(idx, p)
        yield dirs, bases


def ff_full_census(p: int, n: int) -> IncidenceReport:
    """Every point and every line of F_p^n, incidences counted both ways."""
    Field.prime(p)  # validates p
    if p**n > CENSUS_POINT_CAP:
        raise ValueError(f"p^n = {p**n} exceeds the census cap {CENSUS_POINT_CAP}")
    L = line_count(p, n)
    if L * p > CENSUS_WORK_CAP:
        raise ValueError(f"census needs {L * p} point evaluations, above the cap {CENSUS_WORK_CAP}")
    P = p**n
    place = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    t = np.arange(p, dtype=np.int64)
    through = np.zeros(P, dtype=np.int64)
    per_line_total = 0
    nlines = 0
    for dirs, bases in _census_lines(p, n):
        for d in dirs:
            # points base + t d for every base, as flat indices: (nb, p)
            pts = (bases[:, None, :] + t[None, :, None] * d[None, None, :]) % p
            flat = pts @ place
            through += np.bincount(flat.ravel(), minlength=P)
            srt = np.sort(flat, axis=1)
            per_line_total += int(np.sum(1 + np.count_nonzero(np.diff(srt, axis=1), axis=1)))
            nlines += len(bases)
    if nlines != L:
        raise AssertionError(f"enumerated {nlines} lines, expected {L}")
    I = int(through.sum())
    if I != per_line_total:
        raise AssertionError("census double count disagrees")
    return make_report(P, L, I)
