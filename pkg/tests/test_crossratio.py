import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import qmspace as q
from conftest import random_spaces
from qmspace.crossratio import (DegenerateQuadrupleError, ThetaGauge, bk_bracket, cross_ratio,
                                distinct_quadruples, verify_bk_bounds)


def exact_cross_ratio(xs, a, b, c, d):
    dist = lambda i, j: abs(xs[i] - xs[j])
    return dist(a, c) * dist(b, d) / (dist(a, b) * dist(c, d))


def test_cross_ratio_matches_rational_oracle():
    xs = q.core.cantor_points(Fraction(1, 3), 3)
    space = q.euclidean_space([float(x) for x in xs])
    for quad in itertools.permutations(range(len(xs)), 4):
        r = cross_ratio(space, *quad)
        assert r == pytest.approx(float(exact_cross_ratio(xs, *quad)), rel=1e-13)


def test_cross_ratio_degenerate():
    s = q.arithmetic_grid(4)
    with pytest.raises(DegenerateQuadrupleError):
        cross_ratio(s, 0, 0, 1, 2)
    with pytest.raises(DegenerateQuadrupleError):
        bk_bracket(s, 0, 1, 2, 2)


@given(random_spaces(), st.data())
def test_cross_ratio_symmetries(space, data):
    a, b, c, d = data.draw(st.permutations(range(space.n)))[:4]
    r = cross_ratio(space, a, b, c, d)
    assert cross_ratio(space, b, a, d, c) == pytest.approx(r, rel=1e-12)
    assert cross_ratio(space, a, c, b, d) == pytest.approx(1 / r, rel=1e-12)
    assert cross_ratio(space.scaled(7.3), a, b, c, d) == pytest.approx(r, rel=1e-12)


def test_gauge_values():
    g = ThetaGauge(2)
    assert g(1.0) == 4.0 and g(0.25) == 2.0 and g(9.0) == 36.0
    assert g.inverse(4.0) == 1.0 and g.inverse(2.0) == 0.25 and g.inverse(36.0) == 9.0
    with pytest.raises(q.DomainError):
        g(-1.0)
    with pytest.raises(q.DomainError):
        ThetaGauge(0.5)


@given(st.floats(1.0, 10.0), st.floats(0.0, 1e6))
def test_gauge_inverse_round_trip(k, t):
    g = ThetaGauge(k)
    assert g.inverse(g(t)) == pytest.approx(t, rel=1e-9, abs=1e-300)


def test_quadruple_sampler_distinct_and_deterministic():
    a, b, c, d, enum = distinct_quadruples(100, 5000, seed=3)
    assert not enum
    quads = np.stack([a, b, c, d])
    assert all(len(set(col)) == 4 for col in quads.T)
    a2, *_ = distinct_quadruples(100, 5000, seed=3)
    assert np.array_equal(a, a2)
    a, *_rest, enum = distinct_quadruples(6, 10, seed=0)
    assert enum and len(a) == 6 * 5 * 4 * 3


def test_bounds_hold_on_generated_spaces():
    assert verify_bk_bounds(q.cantor(depth=4)).passed
    assert verify_bk_bounds(q.snowflake_transform(q.perturbed_metric_space(30, 1), 2)).passed


def test_bounds_detect_a_wrong_coefficient():
    rep = verify_bk_bounds(q.perturbed_metric_space(30, 0), sample_budget=20000, k=1.01)
    assert not rep.passed and rep.worst is not None and rep.worst.slack > 0
