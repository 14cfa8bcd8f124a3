import math

import pytest

from polyjoints.algebra import Field
from polyjoints.configs import (
    GeneratorSpec, gen_coplanar_lattice, gen_grid, gen_grid_multijoint, gen_random,
    gen_random_rational, gen_star, gen_uniform_points, line_count, line_from_index, union,
)
from polyjoints.geometry import canonicalize_line
from polyjoints.joints import (
    coincidence_points, find_joints, find_joints_naive, find_multijoints,
)

Q = Field.rational()


def test_star_examples():
    assert [(j.K, j.N) for j in find_joints(gen_star(3, 3, Q))] == [(3, 1)]
    assert [(j.K, j.N) for j in find_joints(gen_star(4, 3, Q))] == [(4, 4)]
    assert find_joints(gen_star(100, 3, Q))[0].N == 161700


@pytest.mark.parametrize("L", [3, 5, 9, 17, 25])
def test_star_multiplicity_is_binomial(L):
    for n in (2, 3):
        (j,) = find_joints(gen_star(L, n, Q))
        assert j.N == math.comb(L, n)


def test_star_errors():
    with pytest.raises(ValueError):
        gen_star(2, 3, Q)
    with pytest.raises(ValueError):
        gen_star(12, 3, Field.prime(11))


def test_grid_examples():
    arr = gen_grid(2, 3, Q)
    assert arr.L == 12 and len(find_joints(arr)) == 8
    assert set(find_joints_naive(arr).values()) == {1}
    arr = gen_grid(1, 3, Q)
    assert arr.L == 3 and len(find_joints(arr)) == 1
    with pytest.raises(ValueError):
        gen_grid(6, 3, Field.prime(5))


@pytest.mark.parametrize("n,Ns", [(2, range(1, 13)), (3, range(1, 13)), (4, range(1, 7))])
def test_grid_joint_count(n, Ns):
    for N in Ns:
        J = find_joints(gen_grid(N, n, Q))
        assert len(J) == N**n and all(j.N == 1 and j.K == n for j in J)


def test_grid_ten_closed_form():
    arr = gen_grid(10, 3, Q)
    assert arr.L == 300
    # |J| = (L/3)^(3/2) = 100^(3/2)
    assert len(find_joints(arr)) == 1000 and math.isqrt((arr.L // 3) ** 3) == 1000


def test_coplanar_lattice():
    a = gen_coplanar_lattice(2)
    assert [x.L for x in a] == [2, 2, 3]
    assert find_multijoints(*a) == []
    assert coincidence_points(*gen_coplanar_lattice(3)) == 9
    for L in range(1, 21):
        assert find_multijoints(*gen_coplanar_lattice(L)) == []


def test_grid_multijoint_examples():
    for N, want in [(1, 1), (2, 8), (5, 125)]:
        a = gen_grid_multijoint(N)
        assert [x.L for x in a] == [N * N] * 3
        recs = find_multijoints(*a)
        assert len(recs) == want
        assert all(r.counts == (1, 1, 1) and r.Nprime == 1 for r in recs)


def test_random_determinism_and_distinctness():
    F = Field.prime(101)
    a, b = gen_random(50, 3, F, 9), gen_random(50, 3, F, 9)
    assert a == b and len(set(a.lines)) == 50
    assert gen_random(50, 3, F, 10) != a
    assert gen_random_rational(15, 3, 2) == gen_random_rational(15, 3, 2)
    assert gen_uniform_points(10, 2, 3) == gen_uniform_points(10, 2, 3)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_random_saturates_plane(p):
    F = Field.prime(p)
    arr = gen_random(p * p + p, 2, F, 0)
    assert len(set(arr.lines)) == p * p + p == line_count(p, 2)
    with pytest.raises(ValueError):
        gen_random(p * p + p + 1, 2, F, 0)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (3, 3), (5, 2)])
def test_line_index_bijection(p, n):
    F = Field.prime(p)
    lines = [line_from_index(i, p, n, F) for i in range(line_count(p, n))]
    assert len(set(lines)) == len(lines)
    assert all(canonicalize_line(l.base, l.dir, F) == l for l in lines)


def test_union_weights_repeats():
    arr = gen_star(4, 3, Q)
    u = union([arr, arr])
    assert u.L == 8 and u.weights == (1,) * 8
    assert union([arr]).weights is None


def test_generator_spec():
    assert GeneratorSpec("grid", {"N": 3, "n": 3, "field": "rat"}).build() == gen_grid(3, 3, Q)
    with pytest.raises(ValueError):
        GeneratorSpec("spiral")
