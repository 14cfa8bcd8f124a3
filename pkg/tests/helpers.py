"""Seeded random objects shared by the module tests and the acceptance run."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from polyjoints.algebra import Field, MultiPoly

FIELDS = {
    "F2": Field.prime(2),
    "F3": Field.prime(3),
    "F101": Field.prime(101),
    "Q": Field.rational(),
}


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def rand_scalar(F: Field, r: np.random.Generator, nonzero: bool = False):
    while True:
        if F.p is None:
            x = Fraction(int(r.integers(-9, 10)), int(r.integers(1, 5)))
        else:
            x = F(int(r.integers(0, F.p)))
        if x != 0 or not nonzero:
            return x


def rand_poly(F: Field, n: int, r: np.random.Generator, max_deg: int = 4, max_terms: int = 6) -> MultiPoly:
    terms = {}
    for _ in range(int(r.integers(1, max_terms + 1))):
        d = int(r.integers(0, max_deg + 1))
        e = [0] * n
        for _ in range(d):
            e[int(r.integers(0, n))] += 1
        terms[tuple(e)] = rand_scalar(F, r)
    return MultiPoly(F, n, terms)


def rand_point(F: Field, n: int, r: np.random.Generator):
    return tuple(rand_scalar(F, r) for _ in range(n))
