"""Dense univariate polynomials and exact real-root isolation over Q."""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .field import Field, Scalar


class UniPoly:
    """Coefficients lowest degree first; no trailing zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[Scalar] = ()):
        cs = [field(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, field: Field, c) -> "UniPoly":
        return cls(field, [c])

    @classmethod
    def linear(cls, field: Field, a, b) -> "UniPoly":
        """``a + b*t``."""
        return cls(field, [a, b])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"UniPoly({self.field.tag}, {[str(c) for c in self.coeffs]})"

    def __add__(self, other: "UniPoly") -> "UniPoly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return UniPoly(F, out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        F = self.field
        if not isinstance(other, UniPoly):
            c = F(other)
            return UniPoly(F, [F.mul(x, c) for x in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly(F)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        if F.p is not None:
            out = [c % F.p for c in out]
        return UniPoly(F, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        out = UniPoly.constant(self.field, 1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, t: Scalar) -> Scalar:
        F = self.field
        t = F(t)
        acc = F.zero
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, t), c)
        return acc

    def hasse(self, k: int = 1) -> "UniPoly":
        """k-th Hasse derivative: coefficient of z^k in f(t + z)."""
        F = self.field
        return UniPoly(F, [F.mul(F.from_int(comb(i, k)), c)
                           for i, c in enumerate(self.coeffs) if i >= k])

    def derivative(self) -> "UniPoly":
        return self.hasse(1)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.field
        rem = list(self.coeffs)
        dq = other.degree
        inv = F.inv(other.lead)
        quot = [F.zero] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q = F.mul(c, inv)
            quot[i - dq] = q
            for j, oc in enumerate(other.coeffs):
                rem[i - dq + j] = F.sub(rem[i - dq + j], F.mul(q, oc))
        return UniPoly(F, quot), UniPoly(F, rem[:dq] if dq > 0 else [])

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[0]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * self.field.inv(self.lead)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree(self) -> "UniPoly":
        """Product of the distinct irreducible factors (characteristic 0)."""
        if self.field.p is not None:
            raise ValueError("square-free reduction via f/gcd(f, f') requires characteristic 0")
        if self.degree <= 0:
            return self.monic()
        return (self // self.gcd(self.derivative())).monic()


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(f: UniPoly) -> list[UniPoly]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _sign_changes(seq: list[UniPoly], t: Fraction) -> int:
    signs = [s for s in (_sign(q(t)) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_bound(f: UniPoly) -> Fraction:
    """Cauchy bound: every real root lies in (-B, B)."""
    lead = abs(f.lead)
    return 1 + max((abs(c) / lead for c in f.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(f: UniPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals ``(a, b]`` of the distinct real roots of f over Q.

    Endpoints are never roots; intervals are sorted and each contains exactly
    one root.  ``f`` must be nonzero.
    """
    if f.field.p is not None:
        raise ValueError("real root isolation needs rational coefficients")
    if f.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    g = f.squarefree()
    if g.degree <= 0:
        return []
    seq = sturm_sequence(g)
    B = root_bound(g)
    lo, hi = -B - 1, B + 1
    out = []
    stack = [(lo, hi, _sign_changes(seq, lo), _sign_changes(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count == 0:
            continue
        if count == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        step = (b - a) / 7
        k = 1
        while g(mid) == 0:
            mid = (a + b) / 2 + step / (k + 1)
            k += 1
        vm = _sign_changes(seq, mid)
        stack.append((a, mid, va, vm))
        stack.append((mid, b, vm, vb))
    out.sort()
    return out


def sample_between_roots(f: UniPoly) -> list[Fraction]:
    """One rational parameter in every open interval cut out by the real roots of f."""
    intervals = isolate_real_roots(f)
    if not intervals:
        return [Fraction(0)]
    samples = [intervals[0][0]]
    samples.extend(b for _, b in intervals)
    return samples
