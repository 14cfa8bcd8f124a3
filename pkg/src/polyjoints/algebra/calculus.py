"""Hasse derivatives, gradients, line restrictions and p-th power structure."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .field import Scalar
from .poly import MultiPoly
from .univariate import UniPoly


def hasse_derivative(f: MultiPoly, i: Sequence[int]) -> MultiPoly:
    """The i-th Hasse derivative: coefficient of z^i in f(x + z).

    A term c*x^a contributes c * prod_j C(a_j, i_j) * x^(a - i).
    """
    i = tuple(i)
    if len(i) != f.n:
        raise ValueError(f"multi-index {i} has {len(i)} entries, polynomial has {f.n} variables")
    F = f.field
    out: dict = {}
    for a, c in f.terms.items():
        if any(aj < ij for aj, ij in zip(a, i)):
            continue
        mult = 1
        for aj, ij in zip(a, i):
            if ij:
                mult *= comb(aj, ij)
        v = F.mul(c, F.from_int(mult))
        if v != 0:
            out[tuple(aj - ij for aj, ij in zip(a, i))] = v
    return MultiPoly._raw(F, f.n, out)


def unit(n: int, j: int) -> tuple:
    e = [0] * n
    e[j] = 1
    return tuple(e)


def gradient(f: MultiPoly) -> tuple[MultiPoly, ...]:
    return tuple(hasse_derivative(f, unit(f.n, j)) for j in range(f.n))


def hessian(f: MultiPoly) -> tuple[tuple[MultiPoly, ...], ...]:
    """Matrix of ordinary second partials, built from two first-order Hasse steps."""
    g = gradient(f)
    return tuple(gradient(gj) for gj in g)


def restrict_to_line(f: MultiPoly, v: Sequence[Scalar], b: Sequence[Scalar]) -> UniPoly:
    """Expand f(v + t b) as a polynomial in t."""
    F = f.field
    if len(v) != f.n or len(b) != f.n:
        raise ValueError("base point and direction must match the variable count")
    b = [F(x) for x in b]
    v = [F(x) for x in v]
    if all(x == 0 for x in b):
        raise ValueError("direction must be nonzero")
    lin = [UniPoly(F, [vj, bj]) for vj, bj in zip(v, b)]
    cache: list[dict[int, UniPoly]] = [{0: UniPoly.constant(F, 1)} for _ in range(f.n)]

    def power(j: int, a: int) -> UniPoly:
        c = cache[j]
        if a not in c:
            c[a] = power(j, a - 1) * lin[j]
        return c[a]

    out = UniPoly(F)
    for e, c in f.terms.items():
        term = UniPoly.constant(F, c)
        for j, a in enumerate(e):
            if a:
                term = term * power(j, a)
        out = out + term
    return out


@dataclass(frozen=True)
class PthPowerStructure:
    """Outcome of :func:`pth_power_structure`.

    ``kind`` is one of ``"constant"``, ``"power_root"`` or ``"nonzero_gradient"``;
    ``root`` is the polynomial g with g^p = f when kind is ``"power_root"``.
    """

    kind: str
    root: MultiPoly | None = None


class InvariantViolation(RuntimeError):
    """Raised when a mathematically guaranteed property fails to hold."""


def pth_power_structure(f: MultiPoly) -> PthPowerStructure:
    F = f.field
    if F.p is None:
        raise ValueError("p-th power structure is defined for prime fields only")
    p = F.p
    if f.is_constant():
        return PthPowerStructure("constant")
    if any(not g.is_zero() for g in gradient(f)):
        return PthPowerStructure("nonzero_gradient")
    root: dict = {}
    for e, c in f.terms.items():
        if any(a % p for a in e):
            raise InvariantViolation(
                f"gradient vanishes but exponent {e} is not divisible by {p}")
        # Frobenius fixes F_p, so c is its own p-th root.
        root[tuple(a // p for a in e)] = c
    g = MultiPoly._raw(F, f.n, root)
    if g**p != f:
        raise InvariantViolation("p-th root does not reproduce the polynomial")
    return PthPowerStructure("power_root", g)


def square_free_part(factors: Sequence[tuple[MultiPoly, int]]) -> MultiPoly:
    """Product of the distinct supplied factors, each taken once."""
    if not factors:
        raise ValueError("empty factor list")
    first = factors[0][0]
    out = MultiPoly.constant(first.field, first.n, 1)
    seen = set()
    for q, mult in factors:
        if mult < 1:
            raise ValueError("factor multiplicities must be positive")
        if q in seen:
            continue
        seen.add(q)
        out = out * q
    return out


def taylor_expand(f: MultiPoly, a: Sequence[Scalar]) -> MultiPoly:
    """Rebuild f as sum_i f^(i)(a) (x - a)^i; equals f exactly when the calculus is right."""
    F, n = f.field, f.n
    x = MultiPoly.gens(F, n)
    shifted = [x[j] - MultiPoly.constant(F, n, a[j]) for j in range(n)]
    pw: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(F, n, 1)} for _ in range(n)]

    def power(j, k):
        if k not in pw[j]:
            pw[j][k] = power(j, k - 1) * shifted[j]
        return pw[j][k]

    out = MultiPoly.zero(F, n)
    d = f.degree
    for idx in _multi_indices(n, d):
        coeff = hasse_derivative(f, idx).evaluate(a)
        if coeff == 0:
            continue
        term = MultiPoly.constant(F, n, coeff)
        for j, k in enumerate(idx):
            if k:
                term = term * power(j, k)
        out = out + term
    return out


def _multi_indices(n: int, d: int):
    if n == 0:
        yield ()
        return
    for k in range(d + 1):
        for rest in _multi_indices(n - 1, d - k):
            yield (k,) + rest
