import itertools
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest

from polyjoints.algebra import Field
from polyjoints.configs import gen_grid, gen_random, gen_random_rational, gen_star, line_count, line_from_index
from polyjoints.geometry import Line, canonicalize_line, concurrency_map
from polyjoints.incidence import (
    count_incidences, count_incidences_naive, ff_full_census, incidence_report, incidence_sums,
    make_report, rich_points, st_rhs,
)

from helpers import rng

Q = Field.rational()


def test_examples():
    line = canonicalize_line((0, 0), (1, 1), Q)
    assert count_incidences([(Q(3), Q(3))], [line], Q) == 1
    arr = gen_grid(2, 2, Q)
    pts = [(Q(i), Q(j)) for i in range(2) for j in range(2)]
    assert arr.L == 4 and count_incidences(pts, arr.lines, Q) == 8
    assert count_incidences([(Q(5), Q(0))], [line], Q) == 0
    assert count_incidences([], arr.lines, Q) == 0


def test_rich_points_examples():
    assert len(rich_points(gen_star(5, 3, Q), 5)) == 1
    assert len(rich_points(gen_grid(3, 2, Q), 2)) == 9
    arr = gen_random(20, 3, Field.prime(5), 1)
    assert rich_points(arr, arr.L + 1) == []
    with pytest.raises(ValueError):
        rich_points(arr, 1)


@pytest.mark.parametrize("seed", range(6))
def test_rich_points_monotone(seed):
    arr = gen_random(40, 2, Field.prime([7, 11, 13][seed % 3]), seed)
    sizes = [len(rich_points(arr, k)) for k in range(2, 10)]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    # cross-check against the concurrency map directly
    cm = concurrency_map(arr)
    assert sizes[0] == sum(1 for ids in cm.values() if len(ids) >= 2)


@pytest.mark.parametrize("p,P,L,I", [(2, 4, 6, 12), (3, 9, 12, 36), (5, 25, 30, 150), (7, 49, 56, 392)])
def test_census_examples(p, P, L, I):
    rep = ff_full_census(p, 2)
    assert (rep.P, rep.L, rep.I) == (P, L, I)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17])
def test_census_plane_closed_form(p):
    rep = ff_full_census(p, 2)
    assert rep.L == p * p + p and rep.I == p**3 + p * p


@pytest.mark.parametrize("p,n", [(2, 3), (3, 3), (2, 4)])
def test_census_against_enumeration(p, n):
    F = Field.prime(p)
    lines = [line_from_index(i, p, n, F) for i in range(line_count(p, n))]
    assert len(set(lines)) == len(lines)
    pts = [tuple(F(x) for x in c) for c in itertools.product(range(p), repeat=n)]
    rep = ff_full_census(p, n)
    assert rep.L == len(lines) and rep.P == len(pts)
    assert rep.I == count_incidences_naive(pts, lines, F) == len(lines) * p


def test_census_caps():
    with pytest.raises(ValueError):
        ff_full_census(101, 4)
    with pytest.raises(ValueError):
        ff_full_census(4, 2)


def test_st_ratio_grows_with_p():
    ratios = [ff_full_census(p, 2).ratio for p in (3, 5, 7, 11, 13)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("seed", range(12))
def test_two_sums_agree_with_naive(seed):
    r = rng(seed)
    if seed % 2:
        F = Field.prime([3, 5, 101][seed % 3])
        n = int(r.integers(2, 4))
        arr = gen_random(min(int(r.integers(5, 40)), line_count(F.p, n)), n, F, seed)
        pts = list({tuple(F(int(v)) for v in r.integers(0, F.p, size=arr.n)) for _ in range(60)})
    else:
        F = Q
        arr = gen_random_rational(int(r.integers(5, 30)), 2, seed, box=3)
        pts = list(concurrency_map(arr)) + [(Q(int(a)), Q(int(b))) for a, b in r.integers(-3, 4, size=(20, 2))]
        pts = list(set(pts))
    by_point, by_line = incidence_sums(pts, arr.lines, F)
    assert by_point == by_line == count_incidences(pts, arr.lines, F) == count_incidences_naive(pts, arr.lines, F)


def test_rational_random_sanity():
    for seed in range(3):
        arr = gen_random_rational(300, 2, seed, box=20)
        pts = list(concurrency_map(arr))
        rep = incidence_report(pts, arr.lines, Q)
        assert rep.I <= rep.P * rep.L
        assert rep.I <= 5 * rep.st_rhs


def test_st_rhs_and_report():
    assert st_rhs(8, 1) == 4 + 8 + 1
    rep = make_report(9, 12, 36)
    with localcontext() as ctx:
        ctx.prec = 60
        assert rep.ratio == (Decimal(36) / rep.st_rhs).quantize(Decimal("1e-30"), rounding="ROUND_FLOOR")
    with pytest.raises(AssertionError):
        make_report(2, 2, 5)
    assert rep.to_json()["I"] == 36


def test_incidences_with_fractional_points():
    line = canonicalize_line((Fraction(1, 2), 0), (Fraction(1, 3), 1), Q)
    pts = [line.at(Q(Fraction(k, 7)), Q) for k in range(10)] + [(Q(0), Q(0))]
    assert count_incidences(pts, [line], Q) == 10
    assert isinstance(line, Line)


def test_rational_denominators_at_the_hash_prime():
    # denominators divisible by the fingerprint modulus take the direct routes
    from polyjoints.incidence import HASH_PRIME as q
    line = canonicalize_line((0, 0), (1, Fraction(1, q)), Q)
    other = canonicalize_line((0, 1), (1, 2), Q)
    pts = [(Q(q), Q(1)), (Q(2 * q), Q(2)), (Q(0), Q(1)), (Q(3), Q(7))]
    assert count_incidences(pts, [line, other], Q) == count_incidences_naive(pts, [line, other], Q) == 4
    pts.append((Fraction(1, q), Fraction(1, q * q)))
    assert count_incidences(pts, [line, other], Q) == count_incidences_naive(pts, [line, other], Q) == 5


@pytest.mark.parametrize("seed", range(8))
def test_rational_three_space_against_naive(seed):
    arr = gen_random_rational(25, 3, seed, box=2)
    r = rng(seed)
    pts = list(concurrency_map(arr))
    pts += [arr.lines[int(i)].at(Q(Fraction(int(t), 3)), Q) for i, t in r.integers(0, 25, size=(30, 2))]
    pts = list(set(pts))
    assert count_incidences(pts, arr.lines, Q) == count_incidences_naive(pts, arr.lines, Q)
