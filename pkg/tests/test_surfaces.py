from fractions import Fraction

import pytest

from polyjoints.algebra import Field
from polyjoints.algebra.calculus import gradient, hessian
from polyjoints.geometry import canonicalize_line
from polyjoints.surfaces import (
    FormVerdict, Surface, classify_lines, critical_bound_holds, is_critical_line, is_flat_line,
    lies_in_plane_component, pi_polynomials, pi_vanish_at, second_form_vanishes_at,
)

from helpers import rand_point, rng

Q = Field.rational()


def L3(base, d):
    return canonicalize_line(base, d, Q)


Z_AXIS = L3((0, 0, 0), (0, 0, 1))
SPHERE = "x^2 + y^2 + z^2 - 1"


def _pi_pointwise(s, x):
    # the defining formula with numbers plugged in before any expansion
    g = [c.evaluate(x) for c in gradient(s.sf)]
    H = [[h.evaluate(x) for h in row] for row in hessian(s.sf)]
    out = []
    for j in range(3):
        e = [0, 0, 0]
        e[j] = 1
        v = (g[1] * e[2] - g[2] * e[1], g[2] * e[0] - g[0] * e[2], g[0] * e[1] - g[1] * e[0])
        out.append(sum(v[a] * H[a][b] * v[b] for a in range(3) for b in range(3)))
    return out


def test_critical_line_examples():
    xy = Surface.parse("x*y", factors=["x", "y"])
    assert is_critical_line(xy, Z_AXIS)
    plane = Surface.parse("z")
    assert not is_critical_line(plane, L3((0, 0, 0), (1, 2, 0)))
    cone = Surface.parse("x^2 - y^2", factors=["x - y", "x + y"])
    for base in [(0, 0, 0), (0, 0, 4)]:
        line = L3(base, (1, 1, 0))
        assert Surface.parse("x^2 - y^2").poly.evaluate(line.at(Q(3), Q)) == 0
        assert not is_critical_line(cone, line)


def test_squared_factors_use_square_free_part():
    s = Surface.parse("x^2*y^2", factors=["x:2", "y:2"])
    assert s.sf == Surface.parse("x*y").poly
    assert is_critical_line(s, Z_AXIS)
    assert not is_critical_line(s, L3((0, 0, 0), (1, 0, 0)))


def test_parse_rejects_wrong_product():
    with pytest.raises(ValueError):
        Surface.parse("x*y + 1", factors=["x", "y"])


def test_pi_examples():
    assert all(p.is_zero() for p in pi_polynomials(Surface.parse("z")))
    sph = Surface.parse(SPHERE)
    pis = pi_polynomials(sph)
    assert not any(p.is_zero() for p in pis)
    assert pis[2] == Surface.parse("8*x^2 + 8*y^2").poly
    r = rng(1)
    for _ in range(20):
        x = rand_point(Q, 3, r)
        assert [p.evaluate(x) for p in pis] == _pi_pointwise(sph, x)


@pytest.mark.parametrize("text", ["z - x*y", SPHERE, "x^3 + y*z^2 - 2*x*y*z + 1", "x*y*z", "z - x^2 - y^2",
                                  "x^4 - y^3*z + x*z + 7"])
def test_pi_degree_bound_and_pointwise(text):
    s = Surface.parse(text)
    r = rng(len(text))
    pis = pi_polynomials(s)
    for p in pis:
        assert p.is_zero() or p.degree <= 3 * s.degree - 4
    for _ in range(20):
        x = rand_point(Q, 3, r)
        assert [p.evaluate(x) for p in pis] == _pi_pointwise(s, x)


def test_second_form_examples():
    assert second_form_vanishes_at(Surface.parse("z"), (1, 2, 0)) is FormVerdict.VANISHES
    assert second_form_vanishes_at(Surface.parse("z - x*y"), (1, 0, 0)) is FormVerdict.NONZERO
    xy = Surface.parse("x*y", factors=["x", "y"])
    assert second_form_vanishes_at(xy, (0, 0, 1)) is FormVerdict.CRITICAL_POINT
    with pytest.raises(ValueError):
        second_form_vanishes_at(Surface.parse("z"), (0, 0, 1))


def test_flat_line_examples():
    plane = Surface.parse("z")
    r = rng(4)
    for _ in range(10):
        d = (Fraction(int(r.integers(-5, 6))), Fraction(int(r.integers(1, 6))), 0)
        base = (Fraction(int(r.integers(-9, 9)), 7), Fraction(int(r.integers(-9, 9)), 5), 0)
        assert is_flat_line(plane, L3(base, d))
    xy = Surface.parse("x*y", factors=["x", "y"])
    assert not is_flat_line(xy, Z_AXIS)
    mixed = Surface.parse("", factors=["z", SPHERE])
    line = L3((0, 0, 0), (1, 3, 0))
    assert is_flat_line(mixed, line) and lies_in_plane_component(mixed, line)
    with pytest.raises(ValueError):
        is_flat_line(plane, L3((0, 0, 1), (1, 0, 0)))
    with pytest.raises(ValueError):
        is_flat_line(Surface.parse("z - x*y"), L3((0, 0, 0), (1, 0, 0)), samples=2)


def test_ruling_of_saddle():
    # the ruling {(t, 0, 0)} of z = xy: every Pi_j vanishes, the form does not
    s = Surface.parse("z - x*y")
    ruling = L3((0, 0, 0), (1, 0, 0))
    assert not is_flat_line(s, ruling)
    for t in range(1, 8):
        x = (Q(t), Q(0), Q(0))
        assert pi_vanish_at(s, x)
        assert second_form_vanishes_at(s, x) is FormVerdict.NONZERO


def test_consistency_direction():
    # whenever the form check says vanishes at a regular point, all Pi_j vanish there
    for text, pts in [("z", [(1, 2, 0), (3, -1, 0)]), ("z - x*y", [(1, 0, 0), (0, 2, 0), (2, 3, 6)]),
                      ("x*y*z - 1", [(1, 1, 1), (2, Fraction(1, 2), 1)])]:
        s = Surface.parse(text)
        for x in pts:
            v = second_form_vanishes_at(s, x)
            if v is FormVerdict.VANISHES:
                assert pi_vanish_at(s, x)


def test_exclusive_and_bounded():
    surfaces = [
        Surface.parse("x*y", factors=["x", "y"]),
        Surface.parse("x*y*z", factors=["x", "y", "z"]),
        Surface.parse("", factors=["z", SPHERE]),
        Surface.parse("z - x*y"),
        Surface.parse("x^2 - y^2", factors=["x - y", "x + y"]),
    ]
    lines = [Z_AXIS, L3((0, 0, 0), (1, 0, 0)), L3((0, 0, 0), (0, 1, 0)), L3((0, 0, 0), (1, 1, 0)),
             L3((0, 0, 0), (1, 3, 0)), L3((0, 0, 0), (1, 1, 1)), L3((0, 1, 0), (1, 0, 0)),
             L3((1, 0, 0), (0, 1, 0)), L3((0, 0, 1), (1, 0, 0)), L3((0, 0, 0), (1, -1, 7))]
    for s in surfaces:
        verdicts = classify_lines(s, lines)
        assert not any(v.critical and v.flat for v in verdicts)
        assert critical_bound_holds(s, lines)
        assert sum(v.critical for v in verdicts) <= s.degree**2
    xyz = classify_lines(surfaces[1], lines[:3])
    assert all(v.critical for v in xyz)
