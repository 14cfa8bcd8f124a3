"""Critical and flat lines of surfaces Z(p) in Q^3.

A surface is carried in factored form so the square-free part needs no
polynomial factorisation.  Flatness at a regular point is decided from the
Hessian quadratic form restricted to the tangent plane, including the mixed
term; the Pi_j polynomials are computed as well but are not authoritative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .algebra.calculus import gradient, hessian, restrict_to_line, square_free_part
from .algebra.field import Field
from .algebra.poly import MultiPoly, parse_poly
from .geometry import Line
from .linalg import nullspace

QQ = Field.rational()


class FormVerdict(enum.Enum):
    VANISHES = "vanishes"
    NONZERO = "nonzero"
    CRITICAL_POINT = "critical_point"


@dataclass(frozen=True)
class Surface:
    poly: MultiPoly
    factors: tuple
    sf: MultiPoly

    @classmethod
    def from_factors(cls, factors: Sequence[tuple[MultiPoly, int]]) -> "Surface":
        factors = tuple((q, int(m)) for q, m in factors)
        if not factors:
            raise ValueError("a surface needs at least one factor")
        first = factors[0][0]
        if first.field.p is not None or first.n != 3:
            raise ValueError("surfaces are trivariate over Q")
        poly = MultiPoly.constant(QQ, 3, 1)
        for q, m in factors:
            poly = poly * q**m
        return cls(poly, factors, square_free_part(factors))

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "Surface":
        """Treat ``poly`` as its own single square-free factor."""
        return cls.from_factors([(poly, 1)])

    @classmethod
    def parse(cls, text: str, factors: Sequence[str] | None = None) -> "Surface":
        """``factors`` entries look like "x - y" or "x - y^2" with an optional ":k" multiplicity."""
        names = ("x", "y", "z")
        if not factors:
            return cls.from_poly(parse_poly(text, QQ, 3, names))
        fs = []
        for item in factors:
            body, _, mult = item.partition(":")
            fs.append((parse_poly(body, QQ, 3, names), int(mult) if mult else 1))
        s = cls.from_factors(fs)
        if text and parse_poly(text, QQ, 3, names) != s.poly:
            raise ValueError("the factor product does not reproduce the polynomial")
        return s

    @property
    def degree(self) -> int:
        return self.poly.degree


def _restrict_zero(f: MultiPoly, line: Line) -> bool:
    return restrict_to_line(f, line.base, line.dir).is_zero()


def on_surface(s: Surface, line: Line) -> bool:
    return _restrict_zero(s.poly, line)


def is_critical_line(s: Surface, line: Line) -> bool:
    """sf and its gradient vanish identically along the line."""
    return _restrict_zero(s.sf, line) and all(_restrict_zero(g, line) for g in gradient(s.sf))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _quad(H, u, w):
    return sum(u[i] * H[i][j] * w[j] for i in range(3) for j in range(3))


def pi_polynomials(s: Surface) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    """Pi_j = (grad sf x e_j)^T H_sf (grad sf x e_j) for j = 1, 2, 3."""
    if s.degree < 1:
        raise ValueError("constant polynomial")
    g = gradient(s.sf)
    H = hessian(s.sf)
    zero, one = MultiPoly.zero(QQ, 3), MultiPoly.constant(QQ, 3, 1)
    out = []
    for j in range(3):
        e = [zero] * 3
        e[j] = one
        v = _cross(g, e)
        pij = _quad(H, v, v)
        if not pij.is_zero() and pij.degree > 3 * s.degree - 4:
            raise AssertionError(f"Pi_{j + 1} has degree {pij.degree} > 3 deg p - 4")
        out.append(pij)
    return tuple(out)


def tangent_basis(normal: Sequence) -> list[tuple]:
    """Exact basis of {v : normal . v = 0}."""
    return nullspace([list(normal)], QQ, 3, backend="python")


def second_form_vanishes_at(s: Surface, x: Sequence) -> FormVerdict:
    x = tuple(QQ(c) for c in x)
    if s.poly.evaluate(x) != 0:
        raise ValueError(f"point {x} is not on the surface")
    g = [gj.evaluate(x) for gj in gradient(s.sf)]
    if all(c == 0 for c in g):
        return FormVerdict.CRITICAL_POINT
    H = [[h.evaluate(x) for h in row] for row in hessian(s.sf)]
    u, w = tangent_basis(g)
    if _quad(H, u, u) == 0 and _quad(H, w, w) == 0 and _quad(H, u, w) == 0:
        return FormVerdict.VANISHES
    return FormVerdict.NONZERO


def pi_vanish_at(s: Surface, x: Sequence) -> bool:
    """All three Pi_j are zero at x (the diagonal test only)."""
    x = tuple(QQ(c) for c in x)
    return all(q.evaluate(x) == 0 for q in pi_polynomials(s))


def flat_threshold(s: Surface) -> int:
    return max(3 * s.degree - 3, 1)


def regular_samples(s: Surface, line: Line, count: int) -> list[tuple]:
    """First ``count`` points at t = 0, 1, 2, ... where grad sf is nonzero."""
    grads = gradient(s.sf)
    out, t = [], 0
    # a non-critical line meets the critical set in at most deg sf points
    limit = count + 3 * max(s.sf.degree, 1) + 1
    while len(out) < count and t < limit:
        pt = line.at(QQ(t), QQ)
        if any(gj.evaluate(pt) != 0 for gj in grads):
            out.append(pt)
        t += 1
    return out


def is_flat_line(s: Surface, line: Line, samples: int | None = None) -> bool:
    """At least 3d - 3 sampled regular points on the line have vanishing second form."""
    if not on_surface(s, line):
        raise ValueError("the line is not contained in the surface")
    need = flat_threshold(s)
    if samples is None:
        samples = need
    if samples < 3 * s.degree - 3:
        raise ValueError(f"need at least {3 * s.degree - 3} samples")
    if is_critical_line(s, line):
        return False
    hits = sum(1 for pt in regular_samples(s, line, samples)
               if second_form_vanishes_at(s, pt) is FormVerdict.VANISHES)
    return hits >= need


def lies_in_plane_component(s: Surface, line: Line) -> bool:
    """The line sits inside the zero set of a degree-one factor."""
    return any(q.degree == 1 and _restrict_zero(q, line) for q, _ in s.factors)


@dataclass(frozen=True)
class LineVerdict:
    on_surface: bool
    critical: bool
    flat: bool
    in_plane: bool

    def to_json(self) -> dict:
        return {"on_surface": self.on_surface, "critical": self.critical,
                "flat": self.flat, "in_plane": self.in_plane}


def classify_lines(s: Surface, lines: Sequence[Line]) -> list[LineVerdict]:
    out = []
    for ln in lines:
        if not on_surface(s, ln):
            out.append(LineVerdict(False, False, False, False))
            continue
        crit = is_critical_line(s, ln)
        flat = False if crit else is_flat_line(s, ln)
        out.append(LineVerdict(True, crit, flat, lies_in_plane_component(s, ln)))
    return out


def critical_bound_holds(s: Surface, lines: Sequence[Line]) -> bool:
    """#critical among the supplied (distinct) lines <= (deg p)^2."""
    distinct = set(lines)
    return sum(1 for ln in distinct if is_critical_line(s, ln)) <= s.degree**2
