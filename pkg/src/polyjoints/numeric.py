"""Integer roots and truncated decimal powers with guaranteed digits.

Every decimal produced here is a floor: ``value - 10^-places < result <= value``.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from math import isqrt


def iroot(x: int, k: int) -> int:
    """Largest r >= 0 with r**k <= x."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("root index must be positive")
    if k == 1 or x < 2:
        return x
    if k == 2:
        return isqrt(x)
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def _to_decimal(numerator: int, places: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = len(str(abs(numerator))) + places + 5
        return Decimal(numerator).scaleb(-places)


def rational_power(q: Fraction | int, e: Fraction | int, places: int = 50) -> Decimal:
    """floor(q^e * 10^places) / 10^places for q >= 0 and rational e >= 0."""
    q, e = Fraction(q), Fraction(e)
    if q < 0 or e < 0:
        raise ValueError("only non-negative bases and exponents are supported")
    a, b = e.numerator, e.denominator
    num = q.numerator**a * 10 ** (b * places)
    den = q.denominator**a
    return _to_decimal(iroot(num // den, b), places)


def ratio_to_power(x: Fraction | int, y: Fraction | int, e: Fraction | int, places: int = 30) -> Decimal:
    """floor-truncated x / y^e, computed as (x^b / y^a)^(1/b) with e = a/b."""
    x, y, e = Fraction(x), Fraction(y), Fraction(e)
    if y <= 0:
        raise ValueError("denominator base must be positive")
    a, b = e.numerator, e.denominator
    return rational_power(x**b / y**a, Fraction(1, b), places)


def sum_of_powers(values, e: Fraction | int, places: int = 50) -> Decimal:
    """sum v^e with total error below 10^-places (each term floored at finer precision)."""
    values = list(values)
    guard = len(str(len(values))) + 2
    total = Decimal(0)
    with localcontext() as ctx:
        ctx.prec = 10_000
        for v in values:
            total += rational_power(v, e, places + guard)
        return total.quantize(Decimal(1).scaleb(-places), rounding="ROUND_FLOOR")


def power_le(q: Fraction | int, e: Fraction | int, bound: Fraction | int) -> bool:
    """Exact test of q^e <= bound for rationals q, bound >= 0 and rational e >= 0."""
    q, e, bound = Fraction(q), Fraction(e), Fraction(bound)
    a, b = e.numerator, e.denominator
    return q**a <= bound**b
