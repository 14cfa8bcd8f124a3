"""Random subcollections of lines: exact hypergeometric tails, Monte Carlo, witnesses.

A uniformly random A-subset of L lines contains k of the K lines through a
fixed point with probability C(K,k) C(L-K,A-k) / C(L,A).  The point survives
as a candidate joint when at least n of its lines are drawn.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import Arrangement, Point, concurrency_map
from .joints import bucket_by_N, dyadic_floor, find_joints, multiplicity
from .numeric import rational_power

CHUNK = 1 << 16
CHUNK_CELLS = 1 << 24  # cap on samples * L random keys per chunk


def C(a: int, b: int) -> int:
    """Binomial coefficient, zero outside 0 <= b <= a."""
    return math.comb(a, b) if 0 <= b <= a else 0


@dataclass(frozen=True)
class TailQuery:
    L: int
    K: int
    A: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 <= self.K <= self.L:
            raise ValueError("need 0 <= K <= L")
        if self.A < 0:
            raise ValueError("sample size must be non-negative")
        if self.A > self.L:
            raise ValueError(f"sample size {self.A} exceeds L = {self.L}")


def term(L: int, K: int, A: int, k: int) -> Fraction:
    return Fraction(C(K, k) * C(L - K, A - k), C(L, A))


def exact_tail(q: TailQuery) -> Fraction:
    """Probability that fewer than n of the K marked lines are drawn (1 - P')."""
    return sum((term(q.L, q.K, q.A, k) for k in range(q.n)), Fraction(0))


def exact_capture(q: TailQuery) -> Fraction:
    """P', summed directly over k >= n (not as 1 - tail)."""
    return sum((term(q.L, q.K, q.A, k) for k in range(q.n, q.K + 1)), Fraction(0))


def symmetric_term(L: int, K: int, A: int, k: int) -> Fraction:
    """The same probability with the roles of marked and drawn swapped."""
    return Fraction(C(A, k) * C(L - A, K - k), C(L, K))


def _to_decimal(q: Fraction, places: int = 20) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = places + 30
        return (Decimal(q.numerator) / Decimal(q.denominator)).quantize(Decimal(1).scaleb(-places))


@dataclass(frozen=True)
class MCResult:
    hits: int
    samples: int
    estimate: Decimal
    stderr: Decimal

    def to_json(self) -> dict:
        return {"hits": self.hits, "samples": self.samples,
                "estimate": str(self.estimate), "stderr": str(self.stderr)}


def _count_hits(q: TailQuery, size: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    if q.A == 0:
        return 0
    # the A smallest of L iid uniform keys form a uniform A-subset
    keys = rng.random((size, q.L))
    if q.A < q.L:
        chosen = np.argpartition(keys, q.A - 1, axis=1)[:, :q.A]
    else:
        chosen = np.broadcast_to(np.arange(q.L), (size, q.L))
    marked = np.count_nonzero(chosen < q.K, axis=1)
    return int(np.count_nonzero(marked >= q.n))


def mc_estimate(q: TailQuery, samples: int, seed: int, threads: int = 1) -> MCResult:
    """Fraction of drawn A-subsets containing at least n marked lines.

    Samples are split into chunks, each with its own child seed, so the result
    does not depend on ``threads``.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    chunk = max(1, min(CHUNK, CHUNK_CELLS // max(q.L, 1)))
    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as ex:
            hits = sum(ex.map(lambda a: _count_hits(q, *a), zip(sizes, children)))
    else:
        hits = sum(_count_hits(q, s, c) for s, c in zip(sizes, children))
    p = Fraction(hits, samples)
    se = rational_power(p * (1 - p) / samples, Fraction(1, 2), 20)
    return MCResult(hits, samples, _to_decimal(p), se)


def within_sigma(res: MCResult, exact: Fraction, k: int = 3) -> bool:
    """|estimate - exact| <= k stderr, compared exactly on the raw hit count."""
    diff = abs(Fraction(res.hits, res.samples) - exact)
    return Decimal(diff.numerator) / Decimal(diff.denominator) <= k * res.stderr


# -- witnesses ------------------------------------------------------------------


def subset_size(L: int, N: int, a_n: Fraction | int, n: int) -> int:
    """ceil(a_n L / N^(1/n)) by exact integer comparison."""
    target = Fraction(a_n) * L
    if target <= 0:
        return 0
    s = max(1, int(target / Fraction(N) ** Fraction(1, n)) - 1)
    while Fraction(s) ** n * N < target**n:
        s += 1
    while s > 1 and Fraction(s - 1) ** n * N >= target**n:
        s -= 1
    return s


@dataclass(frozen=True)
class Witness:
    subset: tuple
    captured: int
    level_size: int
    size: int
    full: bool

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.captured, self.level_size)

    def to_json(self) -> dict:
        return {"subset": list(self.subset), "captured": self.captured, "level_size": self.level_size,
                "size": self.size, "full": self.full, "ratio": str(self.ratio)}


def level_joints(arr: Arrangement, N: int, joints=None):
    if joints is None:
        joints = find_joints(arr)
    return bucket_by_N(joints).get(dyadic_floor(N), [])


def witness_subcollection(arr: Arrangement, N: int, a_n: Fraction | int = 3, seed: int = 0,
                          tries: int = 16, size: int | None = None, joints=None) -> Witness:
    """Best of ``tries`` random subcollections at the subset size for level N.

    When the size reaches L the whole arrangement is the witness.
    """
    n = arr.n
    if Fraction(a_n) < n:
        raise ValueError("a_n must be at least n")
    JN = level_joints(arr, N, joints)
    if not JN:
        raise ValueError(f"no joints at dyadic level {dyadic_floor(N)}")
    targets = {j.point for j in JN}
    s = subset_size(arr.L, N, a_n, n) if size is None else size
    if s >= arr.L:
        return Witness(tuple(range(arr.L)), len(targets), len(targets), arr.L, True)
    rng = np.random.Generator(np.random.PCG64(seed))
    best = None
    for _ in range(tries):
        ids = tuple(sorted(int(i) for i in rng.choice(arr.L, size=s, replace=False)))
        found = {j.point for j in find_joints(arr.subset(ids))}
        got = len(targets & found)
        if best is None or got > best.captured:
            best = Witness(ids, got, len(targets), s, False)
    return best


def predicted_capture(arr: Arrangement, N: int, size: int, joints=None) -> Fraction:
    """Sum over J_N of P'(L, K(x), size, n): expected number of level-N points
    that keep at least n of their lines."""
    return sum((exact_capture(TailQuery(arr.L, j.K, size, arr.n)) for j in level_joints(arr, N, joints)),
               Fraction(0))


# -- bound report ---------------------------------------------------------------


class NotGeneric(ValueError):
    def __init__(self, point: Point, lines: tuple):
        super().__init__(f"{len(lines)} lines meet at {point} without every n of them spanning")
        self.point = point
        self.lines = lines


def check_generic(arr: Arrangement) -> None:
    """Whenever n lines meet at a point, they form a joint; raise NotGeneric otherwise."""
    n = arr.n
    for pt, ids in concurrency_map(arr).items():
        K = sum(arr.weight(i) for i in ids)
        if K < n:
            continue
        dirs = [arr.lines[i].dir for i in sorted(ids) for _ in range(arr.weight(i))]
        if multiplicity(dirs, n, arr.field) != C(K, n):
            raise NotGeneric(pt, tuple(sorted(ids)))


@dataclass(frozen=True)
class LevelRatio:
    level: int
    count: int
    N: int
    ratio: Decimal

    def to_json(self) -> dict:
        return {"level": self.level, "count": self.count, "N": self.N, "ratio": str(self.ratio)}


def bound_check_last(arr: Arrangement, places: int = 20) -> list[LevelRatio]:
    """|J_N| N^(1/(n-1)) / L^(n/(n-1)) per dyadic level, N the largest multiplicity there."""
    check_generic(arr)
    n, L = arr.n, arr.L
    out = []
    for level, recs in bucket_by_N(find_joints(arr)).items():
        N = max(j.N for j in recs)
        r = rational_power(Fraction(len(recs) ** (n - 1) * N, L**n), Fraction(1, n - 1), places)
        out.append(LevelRatio(level, len(recs), N, r))
    return out
