"""Peeling lines off an arrangement to certify |J| <= L * max_step d.

At every step the line carrying the fewest remaining joints is removed
(ties to the lowest id) together with those joints.  The minimal vanishing
degree d of the remaining joints bounds that count.

The removal order never depends on d, so the run is split in two passes:
first the order, then d at every step.  The remaining sets are nested and
"some nonzero polynomial of degree <= e vanishes on S" is monotone under
shrinking S, so for each degree e the steps with d >= e form a prefix and can
be located by binary search.  This needs O(d_0 log L) rank tests instead of
one per step, and yields the same d values as recomputing at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .algebra.calculus import InvariantViolation
from .algebra.field import Field
from .geometry import Arrangement, Point
from .joints import JointRecord, bucket, find_joints
from .numeric import rational_power
from .vanishing import EvaluationTable, dvir_degree, min_degree_of


@dataclass(frozen=True)
class PeelStep:
    line_id: int
    degree_d: int
    removed_points: tuple


@dataclass
class PeelingCertificate:
    field: Field
    n: int
    L: int
    steps: list = dc_field(default_factory=list)
    total_removed: int = 0
    observed_constant: Decimal = Decimal(0)

    @property
    def max_degree(self) -> int:
        return max((s.degree_d for s in self.steps), default=0)

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.to_json(), "n": self.n, "L": self.L,
            "steps": [{"line_id": s.line_id, "degree_d": s.degree_d,
                       "removed_points": [[F.format(x) for x in pt] for pt in s.removed_points]}
                      for s in self.steps],
            "total_removed": self.total_removed,
            "observed_constant": str(self.observed_constant),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PeelingCertificate":
        F = Field.from_json(obj["field"])
        steps = [PeelStep(int(s["line_id"]), int(s["degree_d"]),
                          tuple(tuple(F.parse(str(x)) for x in pt) for pt in s["removed_points"]))
                 for s in obj["steps"]]
        return cls(F, int(obj["n"]), int(obj["L"]), steps, int(obj["total_removed"]),
                   Decimal(obj["observed_constant"]))


@dataclass(frozen=True)
class Verdict:
    valid: bool
    step: int | None = None
    reason: str = ""


def _decimal(q: Fraction, places: int = 20) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = places + 30
        v = Decimal(q.numerator) / Decimal(q.denominator)
        return v.quantize(Decimal(1).scaleb(-places), rounding="ROUND_FLOOR")


def removal_order(arr: Arrangement, joints: Sequence[JointRecord]):
    """[(line_id, [joint indices removed])] under the fewest-remaining-joints rule."""
    on_line: list[set] = [set() for _ in range(arr.L)]
    for k, j in enumerate(joints):
        for i in j.line_ids:
            on_line[i].add(k)
    alive = set(range(arr.L))
    remaining = len(joints)
    order = []
    while remaining:
        lid = min(alive, key=lambda i: (len(on_line[i]), i))
        alive.discard(lid)
        gone = sorted(on_line[lid])
        for k in gone:
            for i in joints[k].line_ids:
                if i != lid:
                    on_line[i].discard(k)
        on_line[lid] = set()
        remaining -= len(gone)
        order.append((lid, gone))
    return order


def _nested_sets(m: int, order):
    """Index lists S_0 ⊇ S_1 ⊇ ...; S_t holds the joints still present before step t."""
    step_of = [0] * m
    for t, (_, gone) in enumerate(order):
        for k in gone:
            step_of[k] = t
    return lambda t: [k for k in range(m) if step_of[k] >= t]


def step_degrees(tab: EvaluationTable, S, T: int) -> list[int]:
    """d_min(S_t) for t < T, given nested nonempty sets S(t)."""
    ds = [0] * T
    if T == 0:
        return ds
    e = min_degree_of(tab, S(0))
    j = 0
    while j < T:
        # invariant: a degree-e polynomial vanishes on S(j)
        if tab.has_vanishing(S(j), e - 1):
            e -= 1
            continue
        lo, hi = j, T - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if tab.has_vanishing(S(mid), e - 1):
                hi = mid - 1
            else:
                lo = mid
        for t in range(j, lo + 1):
            ds[t] = e
        j = lo + 1
        e -= 1
    return ds


def peel(arr: Arrangement, joints: Sequence[JointRecord] | None = None) -> PeelingCertificate:
    if joints is None:
        joints = find_joints(arr)
    joints = list(joints)
    cert = PeelingCertificate(arr.field, arr.n, arr.L)
    if not joints:
        return cert
    order = removal_order(arr, joints)
    tab = EvaluationTable([j.point for j in joints], arr.field, arr.n)
    ds = step_degrees(tab, _nested_sets(len(joints), order), len(order))
    for t, ((lid, gone), d) in enumerate(zip(order, ds)):
        if len(gone) > d:
            raise InvariantViolation(
                f"step {t}: every remaining line carries more than d_min = {d} joints "
                f"(fewest is {len(gone)} on line {lid})")
        cert.steps.append(PeelStep(lid, d, tuple(joints[k].point for k in gone)))
    cert.total_removed = len(joints)
    cert.observed_constant = _decimal(Fraction(len(joints), arr.L * cert.max_degree))
    return cert


def verify_certificate(arr: Arrangement, cert: PeelingCertificate) -> Verdict:
    """Replay the certificate against independently recomputed joints."""
    if cert.field != arr.field or cert.n != arr.n or cert.L != arr.L:
        return Verdict(False, None, "certificate does not describe this arrangement")
    F = arr.field
    joints = find_joints(arr)
    index = {j.point: k for k, j in enumerate(joints)}
    remaining = set(index)
    used = set()
    order = []
    failures = []
    for t, s in enumerate(cert.steps):
        if not remaining:
            failures.append((t, "step after all joints were removed"))
            break
        if not 0 <= s.line_id < arr.L or s.line_id in used:
            failures.append((t, f"invalid or repeated line id {s.line_id}"))
            break
        used.add(s.line_id)
        line = arr.lines[s.line_id]
        claimed = set(s.removed_points)
        if len(claimed) != len(s.removed_points):
            failures.append((t, "duplicate removed point"))
            break
        if any(not line.contains(pt, F) for pt in claimed):
            failures.append((t, "removed point not on the step's line"))
            break
        on_line = {pt for pt in remaining if line.contains(pt, F)}
        if claimed != on_line:
            failures.append((t, "coverage: removed points differ from the remaining joints on the line"))
            break
        if len(claimed) > s.degree_d:
            failures.append((t, f"removed {len(claimed)} joints, more than d = {s.degree_d}"))
            break
        order.append((s.line_id, [index[pt] for pt in claimed]))
        remaining -= claimed
    else:
        if remaining:
            failures.append((len(cert.steps), f"coverage: {len(remaining)} joints never removed"))
    if cert.total_removed != len(joints) and not failures:
        failures.append((len(cert.steps), "total_removed does not match the joint count"))
    # degree claims over the replayable prefix, checked run by run
    T = len(order)
    if T:
        tab = EvaluationTable([j.point for j in joints], F, arr.n)
        S = _nested_sets(len(joints), order + [(None, sorted(index[pt] for pt in remaining))])
        bad = _first_bad_degree(tab, S, [s.degree_d for s in cert.steps[:T]])
        if bad is not None:
            failures.append((bad, "degree claim differs from the minimal vanishing degree"))
    if failures:
        t, why = min(failures, key=lambda f: f[0])
        return Verdict(False, t, why)
    total_d = sum(s.degree_d for s in cert.steps)
    if not len(joints) <= total_d <= arr.L * cert.max_degree:
        return Verdict(False, None, "aggregate bound |J| <= sum d <= L max d fails")
    return Verdict(True)


def _first_bad_degree(tab: EvaluationTable, S, claims: list[int]) -> int | None:
    """First step whose claimed degree is not d_min of the replayed state."""
    T = len(claims)
    a = 0
    while a < T:
        e = claims[a]
        b = a
        while b + 1 < T and claims[b + 1] == e:
            b += 1
        if e < 1 or not tab.has_vanishing(S(a), e):
            return a
        if tab.has_vanishing(S(b), e - 1):
            # some step in [a, b] has d_min < e; find the first
            lo, hi = a, b
            while lo < hi:
                mid = (lo + hi) // 2
                if tab.has_vanishing(S(mid), e - 1):
                    hi = mid
                else:
                    lo = mid + 1
            return lo
        a = b + 1
    return None


@dataclass(frozen=True)
class BoundReport:
    ratio: Decimal
    bound_holds: bool
    buckets: dict


def bound_report(cert: PeelingCertificate, L: int, n: int,
                 joints: Sequence[JointRecord] | None = None, places: int = 20) -> BoundReport:
    """|J| / L^(n/(n-1)) and, given the joints, the per-(N,k)-bucket ratios.

    A bucket's ratio is |bucket| * N^(1/(n-1)) / L^(n/(n-1)) with N the largest
    multiplicity in the bucket.
    """
    J = cert.total_removed
    ratio = rational_power(Fraction(J ** (n - 1), L**n), Fraction(1, n - 1), places) if L else Decimal(0)
    holds = J <= L * cert.max_degree if cert.steps else J == 0
    per = {}
    if joints is not None:
        for key, recs in bucket(joints).items():
            N = max(j.N for j in recs)
            per[key] = rational_power(Fraction(len(recs) ** (n - 1) * N, L**n), Fraction(1, n - 1), places)
    return BoundReport(ratio, holds, per)


def dvir_step_bound(cert: PeelingCertificate) -> bool:
    """Every step's d is at most the Dvir degree of the joints remaining then."""
    left = cert.total_removed
    for s in cert.steps:
        if s.degree_d > dvir_degree(left, cert.n):
            return False
        left -= len(s.removed_points)
    return True
