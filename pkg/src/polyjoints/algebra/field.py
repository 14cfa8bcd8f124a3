"""Exact scalar fields: prime fields F_p and the rationals.

Scalars are plain Python values so that they hash and compare cheaply:
elements of F_p are ints in ``[0, p)`` and rationals are
:class:`fractions.Fraction` (always reduced, positive denominator).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Union

Scalar = Union[int, Fraction]

PRIME_LIMIT = 1 << 61

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Descriptor of the coefficient field.

    Use :meth:`prime` or :meth:`rational` to construct.  Two descriptors are
    equal iff they describe the same field.
    """

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not isinstance(p, int) or isinstance(p, bool):
                raise TypeError("prime modulus must be an int")
            if p >= PRIME_LIMIT:
                raise ValueError(f"prime fields are limited to p < 2^61, got {p}")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def rational(cls) -> "Field":
        return cls(None)

    @classmethod
    def from_tag(cls, tag: str) -> "Field":
        """Parse ``"rat"`` or ``"fp:101"``."""
        tag = tag.strip()
        if tag == "rat":
            return cls.rational()
        if tag.startswith("fp:"):
            return cls.prime(int(tag[3:]))
        raise ValueError(f"unknown field tag {tag!r} (expected 'rat' or 'fp:<p>')")

    @classmethod
    def from_json(cls, obj: dict | str) -> "Field":
        if isinstance(obj, str):
            return cls.from_tag(obj)
        kind = obj.get("type")
        if kind == "rat":
            return cls.rational()
        if kind == "fp":
            return cls.prime(int(obj["p"]))
        raise ValueError(f"unknown field descriptor {obj!r}")

    def to_json(self) -> dict:
        return {"type": "rat"} if self.p is None else {"type": "fp", "p": self.p}

    @property
    def tag(self) -> str:
        return "rat" if self.p is None else f"fp:{self.p}"

    @property
    def is_prime_field(self) -> bool:
        return self.p is not None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    def __repr__(self) -> str:
        return "Field.rational()" if self.p is None else f"Field.prime({self.p})"

    # -- element construction -------------------------------------------------

    def __call__(self, x: Any) -> Scalar:
        """Canonical representative of ``x`` (int, Fraction or decimal string)."""
        if isinstance(x, str):
            return self.parse(x)
        p = self.p
        if p is None:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            raise TypeError(f"cannot coerce {x!r} to a rational")
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
            return x.numerator * pow(x.denominator, -1, p) % p
        if isinstance(x, int):
            return x % p
        raise TypeError(f"cannot coerce {x!r} to F_{p}")

    def parse(self, text: str) -> Scalar:
        return self(Fraction(text.strip()))

    def format(self, x: Scalar) -> str:
        return str(x)

    @property
    def zero(self) -> Scalar:
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self) -> Scalar:
        return 1 if self.p is not None else Fraction(1)

    # -- arithmetic -------------------------------------------------------------

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b if self.p is None else a * b % self.p

    def neg(self, a: Scalar) -> Scalar:
        return -a if self.p is None else (-a) % self.p

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.p is None else pow(a, -1, self.p)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def pow(self, a: Scalar, e: int) -> Scalar:
        if self.p is None:
            return a**e
        return pow(a, e, self.p)

    def from_int(self, k: int) -> Scalar:
        return Fraction(k) if self.p is None else k % self.p
