"""Sparse multivariate polynomials over a :class:`Field`.

A polynomial is a map from exponent tuples to nonzero field scalars.  Terms
are printed and iterated in graded lexicographic order, highest first.
"""

from __future__ import annotations

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .field import Field, Scalar

Monomial = tuple


def grlex_key(e: Monomial):
    return (sum(e), e)


class MultiPoly:
    __slots__ = ("field", "n", "_terms", "_hash")

    def __init__(self, field: Field, n: int, terms: Mapping[Monomial, Scalar] | None = None):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        self.field = field
        self.n = n
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError(f"monomial {e} does not have {n} exponents")
                if any(a < 0 for a in e):
                    raise ValueError(f"negative exponent in {e}")
                c = field(c)
                if c != 0:
                    clean[e] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, field: Field, n: int, terms: dict) -> "MultiPoly":
        # Trusted constructor: terms already canonical and nonzero.
        obj = cls.__new__(cls)
        obj.field = field
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, field: Field, n: int) -> "MultiPoly":
        return cls._raw(field, n, {})

    @classmethod
    def constant(cls, field: Field, n: int, c) -> "MultiPoly":
        return cls(field, n, {(0,) * n: c})

    @classmethod
    def var(cls, field: Field, n: int, i: int) -> "MultiPoly":
        e = [0] * n
        e[i] = 1
        return cls._raw(field, n, {tuple(e): field.one})

    @classmethod
    def gens(cls, field: Field, n: int) -> list["MultiPoly"]:
        return [cls.var(field, n, i) for i in range(n)]

    # -- basic queries ----------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Scalar]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self._terms), default=-1)

    def coefficient(self, e: Monomial) -> Scalar:
        return self._terms.get(tuple(e), self.field.zero)

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, Scalar]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if other.field != self.field or other.n != self.n:
            raise ValueError("polynomials live in different rings")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.field, self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = F.add(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(F, self.n, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return MultiPoly._raw(F, self.n, {e: F.neg(c) for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        F = self.field
        c = F(c)
        if c == 0:
            return MultiPoly.zero(F, self.n)
        return MultiPoly._raw(F, self.n, {e: F.mul(v, c) for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        F, p = self.field, self.field.p
        acc: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        if p is None:
            out = {e: c for e, c in acc.items() if c != 0}
        else:
            out = {}
            for e, c in acc.items():
                c %= p
                if c:
                    out[e] = c
        return MultiPoly._raw(F, self.n, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        p = self.field.p
        if p is not None and k >= p and k % p == 0:
            # (sum c m)^p = sum c^p m^p in characteristic p, and c^p = c in F_p
            frob = MultiPoly._raw(self.field, self.n, {tuple(p * a for a in e): c for e, c in self._terms.items()})
            return frob ** (k // p)
        result = MultiPoly.constant(self.field, self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.field == other.field and self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.constant(self.field, self.n, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, self.n, frozenset(self._terms.items())))
        return self._hash

    # -- evaluation and substitution -------------------------------------------

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.n}")
        F = self.field
        p = F.p
        pt = [F(x) for x in point]
        powers = [dict() for _ in range(self.n)]
        total = 0
        for e, c in self._terms.items():
            term = c
            for j, a in enumerate(e):
                if a:
                    cache = powers[j]
                    v = cache.get(a)
                    if v is None:
                        v = pt[j] ** a if p is None else pow(pt[j], a, p)
                        cache[a] = v
                    term = term * v
                    if p is not None:
                        term %= p
            total = total + term
        return F(total) if p is None else total % p

    __call__ = evaluate

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: replace variable j by ``images[j]`` (all in one common ring)."""
        if len(images) != self.n:
            raise ValueError("need one image per variable")
        if not images:
            return self
        F, m = images[0].field, images[0].n
        cache = [{0: MultiPoly.constant(F, m, 1)} for _ in range(self.n)]

        def power(j, a):
            c = cache[j]
            if a not in c:
                c[a] = power(j, a - 1) * images[j]
            return c[a]

        result = MultiPoly.zero(F, m)
        for e, c in self._terms.items():
            term = MultiPoly.constant(F, m, c)
            for j, a in enumerate(e):
                if a:
                    term = term * power(j, a)
            result = result + term
        return result

    def coefficients_in(self, var: int) -> dict[int, "MultiPoly"]:
        """View as a polynomial in ``var``; returns k -> coefficient (``var`` absent)."""
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[var]
            rest = e[:var] + (0,) + e[var + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: MultiPoly._raw(self.field, self.n, t) for k, t in out.items()}

    def divide_exact(self, divisor: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact division; raises ArithmeticError if not exact."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.field
        le, lc = divisor.leading_term()
        lc_inv = F.inv(lc)
        rem = self
        quot: dict = {}
        while not rem.is_zero():
            re_, rc = rem.leading_term()
            if any(a < b for a, b in zip(re_, le)):
                raise ArithmeticError("division is not exact")
            qe = tuple(a - b for a, b in zip(re_, le))
            qc = F.mul(rc, lc_inv)
            quot[qe] = F.add(quot.get(qe, 0), qc)
            rem = rem - MultiPoly._raw(F, self.n, {qe: qc}) * divisor
        return MultiPoly(F, self.n, quot)

    # -- text format ------------------------------------------------------------

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.n)]
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            neg = isinstance(c, Fraction) and c < 0
            mag = -c if neg else c
            factors = [f"{names[j]}^{a}" if a > 1 else names[j] for j, a in enumerate(e) if a]
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            parts.append(("-" if neg else "+", "*".join(factors)))
        text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"MultiPoly({self.field.tag}, n={self.n}, {self.to_text()!r})"

    @classmethod
    def parse(cls, text: str, field: Field, n: int | None = None,
              names: Sequence[str] | None = None) -> "MultiPoly":
        return parse_poly(text, field, n, names)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")
_XYZ = {"x": 0, "y": 1, "z": 2}


def _var_index(name: str, names: Sequence[str] | None) -> int:
    if names is not None:
        if name in names:
            return list(names).index(name)
        raise ValueError(f"unknown variable {name!r}")
    m = re.fullmatch(r"x(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return int(m.group(1)) - 1
    if name in _XYZ:
        return _XYZ[name]
    raise ValueError(f"unknown variable {name!r} (use x1..xn or x, y, z)")


def parse_poly(text: str, field: Field, n: int | None = None,
               names: Sequence[str] | None = None) -> MultiPoly:
    """Parse ``3*x1^2*x2 + 4`` style text; ``x, y, z`` alias ``x1, x2, x3``."""
    pos, tokens = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at column {pos + 1}: {text[pos:pos + 10]!r}")
        pos = m.end()
        num, name, caret, star, sign = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif name is not None:
            tokens.append(("var", _var_index(name, names)))
        elif caret:
            tokens.append(("^", None))
        elif star:
            tokens.append(("*", None))
        else:
            tokens.append(("sign", -1 if sign == "-" else 1))
    if not tokens:
        raise ValueError("empty polynomial text")

    terms: list[tuple[Fraction, dict]] = []
    i = 0
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][0] == "sign":
            sign *= tokens[i][1]
            i += 1
        coeff, exps, expect_factor = Fraction(sign), {}, True
        while i < len(tokens) and tokens[i][0] != "sign":
            kind, val = tokens[i]
            if kind == "*":
                if expect_factor:
                    raise ValueError("misplaced '*'")
                expect_factor = True
                i += 1
                continue
            if not expect_factor:
                raise ValueError("missing '*' between factors")
            if kind == "num":
                coeff *= val
                i += 1
            elif kind == "var":
                power = 1
                if i + 1 < len(tokens) and tokens[i + 1][0] == "^":
                    if i + 2 >= len(tokens) or tokens[i + 2][0] != "num" or tokens[i + 2][1].denominator != 1:
                        raise ValueError("exponent must be a non-negative integer")
                    power = int(tokens[i + 2][1])
                    i += 3
                else:
                    i += 1
                exps[val] = exps.get(val, 0) + power
            else:
                raise ValueError("misplaced '^'")
            expect_factor = False
        if expect_factor:
            raise ValueError("dangling operator in polynomial text")
        terms.append((coeff, exps))

    needed = max((max(e) + 1 for _, e in terms if e), default=0)
    if n is None:
        n = max(needed, 1)
    elif needed > n:
        raise ValueError(f"polynomial uses {needed} variables but ring has {n}")
    out = MultiPoly.zero(field, n)
    for coeff, exps in terms:
        e = [0] * n
        for j, a in exps.items():
            e[j] = a
        out = out + MultiPoly(field, n, {tuple(e): coeff})
    return out


def product(polys: Iterable[MultiPoly], field: Field, n: int) -> MultiPoly:
    out = MultiPoly.constant(field, n, 1)
    for q in polys:
        out = out * q
    return out
