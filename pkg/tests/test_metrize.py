import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import floyd_warshall

import qmspace as q
from conftest import random_spaces
from qmspace.metrize import chain_metric, shortest_path_closure, triangle_violations, verify_frink_bounds


@given(random_spaces(max_n=12), st.sampled_from([0.25, 0.5, 1.0]))
def test_closure_matches_scipy(space, eps):
    w = space.rho ** eps
    assert np.allclose(shortest_path_closure(w), floyd_warshall(w, directed=False), rtol=1e-12, atol=0)


def test_two_points():
    s = q.euclidean_space([0.0, 3.0])
    res = chain_metric(s, 0.5)
    assert res.d_matrix[0, 1] == pytest.approx(3 ** 0.5) and res.min_ratio == pytest.approx(1.0)


def test_metric_input_is_fixed_point():
    s = q.perturbed_metric_space(20, 4, spread=0.0)
    res = chain_metric(s, 1.0)
    assert np.allclose(res.d_matrix, s.rho, rtol=1e-12, atol=0) and res.min_ratio == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_snowflake_undone_by_matching_exponent(p):
    grid = q.arithmetic_grid(15)
    res = chain_metric(q.snowflake_transform(grid, p), 1 / p)
    ref = floyd_warshall(grid.rho, directed=False)
    assert np.allclose(res.d_matrix, ref, rtol=1e-12, atol=1e-15)
    assert res.min_ratio == pytest.approx(1.0, rel=1e-12)


def test_frink_bounds_at_the_threshold():
    s = q.snowflake_transform(q.cantor(depth=6), 2)
    rep = verify_frink_bounds(s, 0.5)
    assert rep.guarantee_active and rep.lower_ok and rep.passed and rep.min_ratio >= 0.25


def test_frink_report_only_above_threshold():
    s = q.snowflake_transform(q.cantor(depth=4), 3)
    rep = verify_frink_bounds(s, 0.5)
    assert not rep.guarantee_active and rep.lower_ok is None and rep.upper_ok


@pytest.mark.parametrize("eps", [0.0, -1.0, 1.5])
def test_epsilon_domain(eps):
    with pytest.raises(q.DomainError):
        chain_metric(q.arithmetic_grid(3), eps)


@given(random_spaces(max_n=12), st.sampled_from([0.3, 0.5, 1.0]))
def test_output_is_a_metric(space, eps):
    res = chain_metric(space, eps)
    assert triangle_violations(res.d_matrix) == 0
    assert np.array_equal(res.d_matrix, res.d_matrix.T)
    assert np.all(res.d_matrix <= space.rho ** eps * (1 + 1e-12))


@given(random_spaces(max_n=10), st.integers(0, 1000))
def test_monotone_in_rho(space, seed):
    rng = np.random.default_rng(seed)
    f = np.triu(rng.uniform(1.0, 2.0, (space.n, space.n)), 1)
    bigger = q.QuasiMetricSpace(space.rho * (f + f.T + np.eye(space.n)))
    assert np.all(chain_metric(space, 0.5).d_matrix <= chain_metric(bigger, 0.5).d_matrix * (1 + 1e-12))


def test_triangle_violation_counter():
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    assert triangle_violations(d) == 2
