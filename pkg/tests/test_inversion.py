import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import qmspace as q
from conftest import random_spaces
from qmspace.crossratio import cross_ratios, distinct_quadruples
from qmspace.inversion import InversionParams, invert_euclidean_cloud, invert_space, inverted_euclidean_space
from qmspace.maps import PointMap, qm_envelope


def formula_oracle(space, p, r):
    rho = space.rho
    keep = [i for i in range(space.n) if i != p]
    return np.array([[0.0 if x == y else r * r * rho[x, y] / (rho[x, p] * rho[y, p]) for y in keep] for x in keep])


def test_equal_arms_leave_distance_unchanged():
    # p at the apex of an isosceles triangle with arms 2
    s = q.QuasiMetricSpace(np.array([[0, 2, 2], [2, 0, 1], [2, 1, 0]], dtype=float))
    out = invert_space(s, InversionParams(0, 2.0))
    assert out.rho[0, 1] == pytest.approx(1.0)


@given(random_spaces(min_n=3, max_n=9), st.data())
def test_matches_formula(space, data):
    p = data.draw(st.integers(0, space.n - 1))
    r = data.draw(st.one_of(st.none(), st.floats(0.1, 10.0)))
    out = invert_space(space, InversionParams(p, r))
    ref = formula_oracle(space, p, space.diameter if r is None else r)
    assert np.allclose(out.rho, ref, rtol=1e-13, atol=0)


def test_cantor_coefficient_at_most_squared():
    c = q.cantor(depth=5)
    out = invert_space(c, InversionParams(0, 1.0))
    assert out.k_min <= 4.0 * (1 + 1e-9)


@given(random_spaces(min_n=5, max_n=10), st.integers(0, 100))
def test_cross_ratios_preserved(space, seed):
    p = seed % space.n
    out = invert_space(space, InversionParams(p))
    keep = np.array([i for i in range(space.n) if i != p])
    a, b, c, d, _ = distinct_quadruples(out.n, 2000, seed)
    before = cross_ratios(space.rho, keep[a], keep[b], keep[c], keep[d])
    after = cross_ratios(out.rho, a, b, c, d)
    assert np.allclose(after, before, rtol=1e-12, atol=0)


@given(random_spaces(min_n=3, max_n=10), st.data())
def test_double_inversion_is_identity(space, data):
    p = data.draw(st.integers(0, space.n - 1))
    params = InversionParams(p, data.draw(st.floats(0.5, 3.0)))
    twice = invert_space(invert_space(space, params, keep_center=True), params, keep_center=True)
    assert np.allclose(twice.rho, space.rho, rtol=1e-12, atol=0)


def test_errors():
    with pytest.raises(q.InsufficientPointsError):
        invert_space(q.arithmetic_grid(2), InversionParams(0))
    with pytest.raises(q.DomainError):
        invert_space(q.arithmetic_grid(4), InversionParams(4))
    with pytest.raises(q.DomainError):
        invert_space(q.arithmetic_grid(4), InversionParams(0, 0.0))


def test_euclidean_inversion_points():
    assert np.allclose(invert_euclidean_cloud([[1.0, 0.0], [2.0, 0.0], [0.0, -4.0]]),
                       [[1.0, 0.0], [0.5, 0.0], [0.0, -0.25]])
    with pytest.raises(q.DomainError):
        invert_euclidean_cloud([[0.0, 0.0], [1.0, 1.0]])
    assert invert_euclidean_cloud([[0.0, 0.0], [1.0, 1.0]], exclude_origin=True).shape == (1, 2)


def test_euclidean_inversion_envelope_below_81t():
    rng = np.random.default_rng(11)
    ang = rng.uniform(0, 2 * np.pi, 14)
    rad = rng.uniform(0.1, 2.0, 14)
    pts = np.c_[rad * np.cos(ang), rad * np.sin(ang)]
    env = qm_envelope(PointMap.identity(q.euclidean_space(pts), inverted_euclidean_space(pts)))
    assert np.all(env.s <= 81 * env.t)
    assert np.allclose(env.s, env.t, rtol=1e-9)
