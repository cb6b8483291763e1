from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import linregress

import qmspace as q
from conftest import random_spaces
from qmspace.hypapprox import (boundary_comparison, boundary_quasimetric, build_hyperbolic_approximation,
                               gromov_product_matrix)

CANTOR = q.cantor(depth=6)


def bfs(edges, m, src):
    adj = [[] for _ in range(m)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    dist = [-1] * m
    dist[src] = 0
    dq = deque([src])
    while dq:
        u = dq.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                dq.append(v)
    return dist


def check_structure(space, g):
    assert g.level_counts()[0] == 1 and g.vertices[0].center == 0
    lv = np.array([v.level for v in g.vertices])
    assert np.all(np.abs(lv[g.edges[:, 0]] - lv[g.edges[:, 1]]) <= 1)
    for k, sc in enumerate(g.scales):
        centers = [v.center for v in g.vertices if v.level == k]
        sub = space.rho[np.ix_(centers, centers)]
        assert np.all(sub[~np.eye(len(centers), dtype=bool)] > sc)
        assert np.all(space.rho[:, centers].min(axis=1) <= sc)
    # each vertex below the root touches the level above it
    up = {int(i) for e in g.edges for i, j in (e, e[::-1]) if lv[i] == lv[j] + 1}
    assert up == set(range(1, len(g.vertices)))


def test_cantor_graph_structure():
    check_structure(CANTOR, build_hyperbolic_approximation(CANTOR, 1 / 3, 6))


@given(random_spaces(min_n=2, max_n=12), st.sampled_from([0.25, 0.5, 0.7]), st.integers(1, 5))
def test_random_graph_structure(space, r, levels):
    check_structure(space, build_hyperbolic_approximation(space, r, levels))


def test_two_point_level_counts():
    g = build_hyperbolic_approximation(q.euclidean_space([0.0, 1.0]), 0.5, 2)
    assert g.level_counts() == [1, 2, 2]


def test_parameter_errors():
    with pytest.raises(q.DomainError):
        build_hyperbolic_approximation(CANTOR, 1.0, 3)
    with pytest.raises(q.DomainError):
        build_hyperbolic_approximation(CANTOR, 0.5, 0)
    g = build_hyperbolic_approximation(q.cantor(depth=2), 0.5, 2)
    with pytest.raises(q.DomainError):
        boundary_quasimetric(g, 1.0)


def test_gromov_products_against_bfs():
    g = build_hyperbolic_approximation(q.cantor(depth=4), 1 / 3, 4)
    m = len(g.vertices)
    to_root = bfs(g.edges.tolist(), m, 0)
    deep = g.deepest
    gp = gromov_product_matrix(g)
    for a, v in enumerate(deep):
        dv = bfs(g.edges.tolist(), m, int(v))
        for b, w in enumerate(deep):
            assert gp[a, b] == pytest.approx(0.5 * (to_root[v] + to_root[w] - dv[w]))
        assert gp[a, a] == to_root[v]
    assert np.all(gp >= 0) and np.array_equal(gp, gp.T)
    # products with the root vanish
    assert 0.5 * (to_root[0] + to_root[5] - bfs(g.edges.tolist(), m, 0)[5]) == 0


def test_boundary_is_valid_and_monotone():
    g = build_hyperbolic_approximation(CANTOR, 1 / 3, 6)
    est = boundary_quasimetric(g, 3.0)
    assert q.validate_space(est.space.rho).passed and np.isfinite(est.space.k_min)
    gp = gromov_product_matrix(g)[np.ix_(est.assignment, est.assignment)]
    off = ~np.eye(CANTOR.n, dtype=bool) & (est.assignment[:, None] != est.assignment[None, :])
    assert np.allclose(est.space.rho[off], 3.0 ** -gp[off])
    order = np.argsort(gp[off], kind="stable")
    assert np.all(np.diff(est.space.rho[off][order]) <= 1e-15)
    assert est.floored_pairs > 0 and est.floor == 3.0 ** -7


def test_product_zero_gives_unit_distance():
    g = build_hyperbolic_approximation(q.euclidean_space([0.0, 1.0]), 0.5, 1)
    est = boundary_quasimetric(g)
    gp = gromov_product_matrix(g)
    if gp[0, 1] == 0:
        assert est.space.rho[0, 1] == 1.0


def test_deterministic():
    a = build_hyperbolic_approximation(CANTOR, 1 / 3, 5)
    b = build_hyperbolic_approximation(CANTOR, 1 / 3, 5)
    assert a.vertices == b.vertices and np.array_equal(a.edges, b.edges)


def test_comparison_with_itself_and_snowflake():
    b = boundary_quasimetric(build_hyperbolic_approximation(CANTOR, 1 / 3, 6), 3.0).space
    self_cmp = boundary_comparison(b, b)
    assert self_cmp.gamma_hat == pytest.approx(1.0) and self_cmp.residual_spread == pytest.approx(0.0, abs=1e-9)
    base = boundary_comparison(CANTOR, b)
    snow = boundary_comparison(q.snowflake_transform(CANTOR, 2.0), b)
    assert snow.gamma_hat == pytest.approx(base.gamma_hat / 2)
    iu = np.triu_indices(CANTOR.n, 1)
    ref = linregress(np.log(CANTOR.rho[iu]), np.log(b.rho[iu]))
    assert base.gamma_hat == pytest.approx(ref.slope) and base.rank_correlation >= 0.9


def test_comparison_needs_pairs():
    two = q.euclidean_space([0.0, 1.0])
    with pytest.raises(q.InsufficientPointsError):
        boundary_comparison(two, two)
