"""Joints, multijoints, exact multiplicities and dyadic buckets.

Multiplicities are counted on projective direction classes.  For n = 2 the
count is closed form (pairs of distinct directions).  For n = 3 small inputs
enumerate triples with vectorised determinants and large inputs use the
bucketed counter: every rank-deficient triple either repeats one direction
class three times or spans exactly one plane, so

    N = C(K,3) - sum_c C(m_c,3) - sum_P [C(T_P,3) - sum_{c in P} C(m_c,3)]

where m_c is the size of class c and T_P the number of lines whose class
lies in plane P.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import reduce
from math import comb, gcd, lcm
from typing import Sequence

import numpy as np

from .algebra.field import Field, Scalar
from .geometry import Arrangement, Point, concurrency_map, rank_of_directions
from .numeric import sum_of_powers

ENUMERATION_LIMIT = 10**7  # C(K, n) at or below this is enumerated directly
_SMALL = 1 << 20  # int64 determinant path needs entries below this


@dataclass(frozen=True)
class JointRecord:
    point: Point
    line_ids: tuple
    K: int
    N: int


@dataclass(frozen=True)
class MultijointRecord:
    point: Point
    line_ids: tuple  # three sorted tuples of collection-local ids
    N1: int
    N2: int
    N3: int
    Nprime: int

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.N1, self.N2, self.N3


# -- direction bookkeeping ------------------------------------------------------


def _integer_direction(d: Sequence[Scalar], field: Field) -> tuple:
    """Integer representative of the projective class (F_p: residues; Q: primitive)."""
    if field.p is not None:
        return tuple(int(x) for x in d)
    fr = [Fraction(x) for x in d]
    den = lcm(*(x.denominator for x in fr))
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, ints)
    ints = [v // g for v in ints]
    k = next(i for i, v in enumerate(ints) if v)
    if ints[k] < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def _det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _normalize(v, p):
    k = next((i for i, x in enumerate(v) if x), None)
    if k is None:
        return None
    if p is not None:
        inv = pow(v[k], -1, p)
        return tuple(x * inv % p for x in v)
    g = reduce(gcd, v)
    if v[k] < 0:
        g = -g
    return tuple(x // g for x in v)


def count_by_enumeration(dirs: Sequence[Sequence[Scalar]], n: int, field: Field) -> int:
    """Oracle: rank-test every unordered n-subset."""
    if len(dirs) < n:
        return 0
    ints = [_integer_direction(d, field) for d in dirs]
    p = field.p
    if n == 3:
        big = max((abs(x) for v in ints for x in v), default=0) >= _SMALL
        if p is not None and p >= _SMALL:
            big = True
        if not big:
            return _enumerate3_numpy(np.array(ints, dtype=np.int64), p)
        total = 0
        for a, b, c in itertools.combinations(ints, 3):
            det = _det3(a, b, c)
            total += (det % p != 0) if p is not None else (det != 0)
        return total
    return sum(1 for sub in itertools.combinations(dirs, n) if rank_of_directions(sub, field) == n)


def _enumerate3_numpy(D: np.ndarray, p) -> int:
    K = len(D)
    total = 0
    for i in range(K - 2):
        rest = D[i + 1:]
        C = np.cross(D[i], rest)  # rows: d_i x d_j for j > i
        if p is not None:
            C %= p
        M = C @ D.T  # M[j', k] = det(d_i, d_j, d_k)
        if p is not None:
            M %= p
        j = np.arange(i + 1, K)[:, None]
        k = np.arange(K)[None, :]
        total += int(np.count_nonzero((M != 0) & (k > j)))
    return total


def count_bucketed(dirs: Sequence[Sequence[Scalar]], field: Field) -> int:
    """Spanning-triple count for n = 3 by class and plane inclusion-exclusion."""
    K = len(dirs)
    if K < 3:
        return 0
    p = field.p
    classes = Counter(_normalize(_integer_direction(d, field), p) for d in dirs)
    reps = list(classes)
    mult = [classes[c] for c in reps]
    # plane key -> set of class indices
    planes: dict[tuple, set] = {}
    if p is None and max((abs(x) for v in reps for x in v), default=0) < _SMALL and len(reps) > 50:
        planes = _planes_numpy(np.array(reps, dtype=np.int64))
    else:
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                key = _normalize(tuple(x % p for x in _cross(reps[i], reps[j])) if p else
                                 _cross(reps[i], reps[j]), p)
                planes.setdefault(key, set()).update((i, j))
    bad = sum(comb(m, 3) for m in mult)
    for members in planes.values():
        T = sum(mult[c] for c in members)
        bad += comb(T, 3) - sum(comb(mult[c], 3) for c in members)
    return comb(K, 3) - bad


def _planes_numpy(R: np.ndarray) -> dict:
    """Plane memberships for primitive integer classes (vectorised cross products)."""
    m = len(R)
    keys, left, right = [], [], []
    for i in range(m - 1):
        C = np.cross(R[i], R[i + 1:])
        g = np.gcd.reduce(np.abs(C), axis=1)
        C //= g[:, None]
        first = np.where(C[:, 0] != 0, C[:, 0], np.where(C[:, 1] != 0, C[:, 1], C[:, 2]))
        C *= np.sign(first)[:, None]
        keys.append(C)
        left.append(np.full(len(C), i))
        right.append(np.arange(i + 1, m))
    keys = np.concatenate(keys)
    labels = np.unique(keys, axis=0, return_inverse=True)[1].ravel()
    pairs = np.concatenate([np.stack([labels, np.concatenate(left)], 1),
                            np.stack([labels, np.concatenate(right)], 1)])
    pairs = np.unique(pairs, axis=0)
    planes: dict = {}
    for lab, c in pairs.tolist():
        planes.setdefault(lab, set()).add(c)
    return planes


def multiplicity(dirs: Sequence[Sequence[Scalar]], n: int, field: Field, method: str = "auto") -> int:
    """Number of unordered n-subsets of ``dirs`` whose directions span F^n."""
    K = len(dirs)
    if K < n:
        return 0
    if n == 2:
        classes = Counter(_normalize(_integer_direction(d, field), field.p) for d in dirs)
        return comb(K, 2) - sum(comb(m, 2) for m in classes.values())
    if method == "auto":
        method = "bucketed" if n == 3 and comb(K, 3) > ENUMERATION_LIMIT else "enumerate"
    if method == "bucketed":
        if n != 3:
            raise ValueError("the bucketed counter is implemented for n = 3")
        return count_bucketed(dirs, field)
    if method == "enumerate":
        return count_by_enumeration(dirs, n, field)
    raise ValueError(f"unknown method {method!r}")


# -- joints ---------------------------------------------------------------------


def find_joints(arr: Arrangement) -> list[JointRecord]:
    F, n = arr.field, arr.n
    out = []
    for pt, ids in concurrency_map(arr).items():
        if len(ids) < n:
            continue
        ids = tuple(sorted(ids))
        dirs = [arr.lines[i].dir for i in ids]
        if rank_of_directions(_distinct(dirs), F) < n:
            continue
        out.append(JointRecord(pt, ids, len(ids), multiplicity(dirs, n, F)))
    return out


def _distinct(dirs):
    return list(dict.fromkeys(dirs))


def find_joints_naive(arr: Arrangement) -> dict[Point, int]:
    """Oracle: every n-subset of lines, intersected and rank-tested. Returns point -> N."""
    F, n = arr.field, arr.n
    out: Counter = Counter()
    for sub in itertools.combinations(range(arr.L), n):
        lines = [arr.lines[i] for i in sub]
        if rank_of_directions([l.dir for l in lines], F) < n:
            continue
        pt = _common_point(lines, F)
        if pt is not None:
            out[pt] += 1
    return dict(out)


def _common_point(lines, F: Field):
    from .geometry import line_intersection

    r = line_intersection(lines[0], lines[1], F)
    if r.kind != "point":
        return None
    return r.point if all(l.contains(r.point, F) for l in lines[2:]) else None


def dyadic_floor(x: int) -> int:
    if x < 1:
        raise ValueError("dyadic floor needs a positive integer")
    return 1 << (x.bit_length() - 1)


def bucket(joints: Sequence[JointRecord]) -> dict[tuple[int, int], list[JointRecord]]:
    """Group by (largest power of two <= N, largest power of two <= K)."""
    out: dict = {}
    for j in joints:
        out.setdefault((dyadic_floor(j.N), dyadic_floor(j.K)), []).append(j)
    return dict(sorted(out.items()))


def bucket_by_N(joints: Sequence[JointRecord]) -> dict[int, list[JointRecord]]:
    out: dict = {}
    for j in joints:
        out.setdefault(dyadic_floor(j.N), []).append(j)
    return dict(sorted(out.items()))


def weighted_sum(joints: Sequence[JointRecord], exponent, places: int = 50) -> Decimal:
    """sum N(x)^exponent, floored at 10^-places."""
    return sum_of_powers([j.N for j in joints], Fraction(exponent), places)


def histogram(joints: Sequence[JointRecord]) -> list[dict]:
    return [{"N_floor": k[0], "k_floor": k[1], "count": len(v), "N_max": max(j.N for j in v)}
            for k, v in bucket(joints).items()]


# -- multijoints ------------------------------------------------------------------


def _merge(arrs: Sequence[Arrangement]):
    """Distinct lines of several collections with per-collection weights and ids."""
    F = arrs[0].field
    for a in arrs:
        if a.field != F or a.n != arrs[0].n:
            raise ValueError("collections must share field and dimension")
    index: dict = {}
    lines, weight, ids = [], [], []
    for c, a in enumerate(arrs):
        for i, ln in enumerate(a.lines):
            k = index.get(ln)
            if k is None:
                k = index[ln] = len(lines)
                lines.append(ln)
                weight.append([0] * len(arrs))
                ids.append([[] for _ in arrs])
            weight[k][c] += a.weight(i)
            ids[k][c].append(i)
    merged = Arrangement(F, arrs[0].n, lines)
    return merged, weight, ids


def _collection_counts(pt_ids, weight, ids, ncoll):
    N = [0] * ncoll
    local = [[] for _ in range(ncoll)]
    for k in pt_ids:
        for c in range(ncoll):
            if weight[k][c]:
                N[c] += weight[k][c]
                local[c].extend(ids[k][c])
    return N, local


def find_multijoints(a1: Arrangement, a2: Arrangement, a3: Arrangement) -> list[MultijointRecord]:
    if any(a.n != 3 for a in (a1, a2, a3)):
        raise ValueError("multijoints are implemented for n = 3 only")
    merged, weight, ids = _merge((a1, a2, a3))
    F = merged.field
    p = F.p
    out = []
    for pt, pids in concurrency_map(merged).items():
        N, local = _collection_counts(pids, weight, ids, 3)
        if min(N) == 0:
            continue
        # per collection: weight per direction class
        per = []
        for c in range(3):
            w: Counter = Counter()
            for k in pids:
                if weight[k][c]:
                    w[_integer_direction(merged.lines[k].dir, F)] += weight[k][c]
            per.append(list(w.items()))
        Np = 0
        for (da, wa), (db, wb), (dc, wc) in itertools.product(*per):
            det = _det3(da, db, dc)
            if (det % p if p is not None else det) != 0:
                Np += wa * wb * wc
        if Np:
            out.append(MultijointRecord(pt, tuple(tuple(sorted(l)) for l in local), N[0], N[1], N[2], Np))
    return out


def _check_no_shared_line(weight, ncoll):
    for w in weight:
        if all(w[c] for c in range(ncoll)):
            raise ValueError("a line shared by every collection makes the sum infinite")


def coincidence_sum(a1: Arrangement, a2: Arrangement, a3: Arrangement, places: int = 50) -> Decimal:
    """sum over points met by every collection of (N1 N2 N3)^(1/2); no spanning requirement."""
    if any(a.n != 3 for a in (a1, a2, a3)):
        raise ValueError("coincidence sums are defined for n = 3")
    merged, weight, ids = _merge((a1, a2, a3))
    _check_no_shared_line(weight, 3)
    vals = []
    for pt, pids in concurrency_map(merged).items():
        N, _ = _collection_counts(pids, weight, ids, 3)
        if min(N) > 0:
            vals.append(N[0] * N[1] * N[2])
    return sum_of_powers(vals, Fraction(1, 2), places)


def coincidence_points(a1, a2, a3) -> int:
    merged, weight, ids = _merge((a1, a2, a3))
    _check_no_shared_line(weight, 3)
    return sum(1 for pids in concurrency_map(merged).values()
               if min(_collection_counts(pids, weight, ids, 3)[0]) > 0)


def pair_incidence_sum(a1: Arrangement, a2: Arrangement) -> int:
    """sum_x N1(x) N2(x) over all points; at most L1*L2 when no line is shared."""
    merged, weight, ids = _merge((a1, a2))
    _check_no_shared_line(weight, 2)
    total = 0
    for pids in concurrency_map(merged).values():
        N, _ = _collection_counts(pids, weight, ids, 2)
        total += N[0] * N[1]
    return total


def multijoint_sum(records: Sequence[MultijointRecord], exponent, places: int = 50) -> Decimal:
    """sum N'(x)^exponent over multijoints."""
    return sum_of_powers([r.Nprime for r in records], Fraction(exponent), places)
