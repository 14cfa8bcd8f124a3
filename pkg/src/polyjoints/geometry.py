"""Points, canonical lines and line arrangements in F^n.

A point is a tuple of canonical field scalars, so it can be used directly as
a dictionary key.  A line is stored as (base, dir) where ``dir`` has first
nonzero coordinate 1 (its pivot) and ``base`` has a zero at that pivot; this
representative is unique, so equal point sets give equal ``Line`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra.field import Field, Scalar
from .linalg import rref

Point = tuple


def make_point(coords: Iterable, field: Field) -> Point:
    return tuple(field(x) for x in coords)


@dataclass(frozen=True)
class Line:
    base: Point
    dir: Point

    @property
    def pivot(self) -> int:
        return next(i for i, x in enumerate(self.dir) if x != 0)

    @property
    def n(self) -> int:
        return len(self.base)

    def at(self, t: Scalar, field: Field) -> Point:
        return tuple(field.add(b, field.mul(t, d)) for b, d in zip(self.base, self.dir))

    def contains(self, point: Sequence[Scalar], field: Field) -> bool:
        # t is forced by the pivot coordinate since dir[k] = 1 and base[k] = 0.
        t = point[self.pivot]
        return all(field.add(b, field.mul(t, d)) == x for b, d, x in zip(self.base, self.dir, point))

    def parameter_of(self, point: Sequence[Scalar]) -> Scalar:
        return point[self.pivot]


def canonical_direction(dir: Sequence[Scalar], field: Field) -> Point:
    d = [field(x) for x in dir]
    k = next((i for i, x in enumerate(d) if x != 0), None)
    if k is None:
        raise ValueError("direction must be nonzero")
    inv = field.inv(d[k])
    return tuple(field.mul(x, inv) for x in d)


def canonicalize_line(base: Sequence[Scalar], dir: Sequence[Scalar], field: Field) -> Line:
    if len(base) != len(dir):
        raise ValueError("base and direction dimensions differ")
    d = canonical_direction(dir, field)
    b = [field(x) for x in base]
    k = next(i for i, x in enumerate(d) if x != 0)
    t = b[k]
    return Line(tuple(field.sub(bi, field.mul(t, di)) for bi, di in zip(b, d)), d)


@dataclass(frozen=True)
class Intersection:
    """``kind`` is ``"point"``, ``"disjoint"`` or ``"coincident"``."""

    kind: str
    point: Point | None = None


DISJOINT = Intersection("disjoint")
COINCIDENT = Intersection("coincident")


def line_intersection(l1: Line, l2: Line, field: Field) -> Intersection:
    if l1.n != l2.n:
        raise ValueError("lines live in different dimensions")
    d1, d2 = l1.dir, l2.dir
    if d1 == d2:
        return COINCIDENT if l1.base == l2.base else DISJOINT
    pt = _meet(l1, l2, field)
    return DISJOINT if pt is None else Intersection("point", pt)


def _meet(l1: Line, l2: Line, field: Field):
    """Common point of two non-parallel canonical lines, or None if skew."""
    F = field
    d1, d2, b1, b2 = l1.dir, l2.dir, l1.base, l2.base
    n = len(d1)
    # Solve s*d1 - t*d2 = b2 - b1 on a nonsingular 2x2 minor, then check the rest.
    for i in range(n):
        for j in range(i + 1, n):
            D = F.sub(F.mul(d2[i], d1[j]), F.mul(d1[i], d2[j]))
            if D == 0:
                continue
            ri, rj = F.sub(b2[i], b1[i]), F.sub(b2[j], b1[j])
            Dinv = F.inv(D)
            s = F.mul(F.sub(F.mul(d2[i], rj), F.mul(d2[j], ri)), Dinv)
            pt = tuple(F.add(b, F.mul(s, d)) for b, d in zip(b1, d1))
            return pt if l2.contains(pt, F) else None
    return None


def rank_of_directions(dirs: Sequence[Sequence[Scalar]], field: Field) -> int:
    if not dirs:
        raise ValueError("need at least one direction")
    return len(rref(dirs, field)[1])


@dataclass(frozen=True)
class Arrangement:
    field: Field
    n: int
    lines: tuple
    weights: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
            if len(self.weights) != len(self.lines):
                raise ValueError("one weight per line is required")
            if any(w < 1 for w in self.weights):
                raise ValueError("weights must be positive integers")
        if self.n < 2:
            raise ValueError("ambient dimension must be at least 2")
        for ln in self.lines:
            if not isinstance(ln, Line) or ln.n != self.n:
                raise ValueError("every line must be a canonical Line of the ambient dimension")
        if self.weights is None and len(set(self.lines)) != len(self.lines):
            raise ValueError("duplicate lines are only allowed in weighted arrangements")

    @property
    def L(self) -> int:
        return len(self.lines)

    def weight(self, i: int) -> int:
        return 1 if self.weights is None else self.weights[i]

    def subset(self, ids: Iterable[int]) -> "Arrangement":
        ids = list(ids)
        w = None if self.weights is None else [self.weights[i] for i in ids]
        return Arrangement(self.field, self.n, [self.lines[i] for i in ids], w)

    # -- JSON -------------------------------------------------------------------

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.to_json(),
            "n": self.n,
            "lines": [
                {"base": [F.format(x) for x in ln.base], "dir": [F.format(x) for x in ln.dir],
                 "weight": self.weight(i)}
                for i, ln in enumerate(self.lines)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Arrangement":
        F = Field.from_json(obj["field"])
        n = int(obj["n"])
        lines, weights = [], []
        for entry in obj["lines"]:
            lines.append(canonicalize_line([F.parse(str(x)) for x in entry["base"]],
                                           [F.parse(str(x)) for x in entry["dir"]], F))
            weights.append(int(entry.get("weight", 1)))
        w = None if all(x == 1 for x in weights) and len(set(lines)) == len(lines) else weights
        return cls(F, n, lines, w)


def points_to_json(points: Sequence[Point], field: Field, n: int) -> dict:
    return {"field": field.to_json(), "n": n, "points": [[field.format(x) for x in p] for p in points]}


def points_from_json(obj: dict) -> tuple[list[Point], Field, int]:
    F = Field.from_json(obj["field"])
    n = int(obj["n"])
    pts = [tuple(F.parse(str(x)) for x in p) for p in obj["points"]]
    if any(len(p) != n for p in pts):
        raise ValueError("point with wrong dimension")
    return pts, F, n


def concurrency_map(arr: Arrangement) -> dict[Point, frozenset]:
    """Every point on at least two lines, with the indices of all lines through it."""
    F = arr.field
    by_dir: dict[Point, list[int]] = {}
    for i, ln in enumerate(arr.lines):
        by_dir.setdefault(ln.dir, []).append(i)
    groups = list(by_dir.values())
    acc: dict[Point, set] = {}
    lines = arr.lines
    for gi in range(len(groups)):
        for gj in range(gi + 1, len(groups)):
            for i in groups[gi]:
                li = lines[i]
                for j in groups[gj]:
                    pt = _meet(li, lines[j], F)
                    if pt is not None:
                        s = acc.get(pt)
                        if s is None:
                            acc[pt] = {i, j}
                        else:
                            s.add(i)
                            s.add(j)
    # Duplicate copies of a line share a direction group and never meet above.
    for g in groups:
        seen: dict[Point, list[int]] = {}
        for i in g:
            seen.setdefault(lines[i].base, []).append(i)
        for copies in seen.values():
            if len(copies) > 1:
                for pt, s in acc.items():
                    if copies[0] in s:
                        s.update(copies)
    return {pt: frozenset(acc[pt]) for pt in sorted(acc)}


def concurrency_map_bruteforce(arr: Arrangement) -> dict[Point, frozenset]:
    """Oracle: intersect all pairs, then test every line against every candidate point."""
    F = arr.field
    cands = set()
    for i in range(arr.L):
        for j in range(i + 1, arr.L):
            r = line_intersection(arr.lines[i], arr.lines[j], F)
            if r.kind == "point":
                cands.add(r.point)
    out = {}
    for pt in sorted(cands):
        ids = frozenset(i for i, ln in enumerate(arr.lines) if ln.contains(pt, F))
        if len(ids) >= 2:
            out[pt] = ids
    return out
