import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import qmspace as q
from conftest import brute_k, random_spaces


def test_k_min_matches_triple_loop():
    for seed in range(5):
        s = q.perturbed_metric_space(12, seed)
        assert s.k_min == pytest.approx(brute_k(s.rho.tolist()), rel=1e-12)


def test_k_min_examples():
    assert q.cantor(depth=6).k_min == pytest.approx(2.0)
    assert q.min_quasimetric_coefficient(q.snowflake_transform(q.arithmetic_grid(3), 2)) == pytest.approx(4.0)
    assert q.euclidean_space([0.0, 1.0]).k_min == 1.0


def test_k_min_needs_two_points():
    with pytest.raises(q.InsufficientPointsError):
        q.min_quasimetric_coefficient(q.QuasiMetricSpace(np.zeros((1, 1))))


@given(random_spaces(), st.floats(1e-3, 1e3))
def test_k_min_scale_invariant(space, s):
    assert space.scaled(s).k_min == pytest.approx(space.k_min, rel=1e-9)


@given(random_spaces(max_n=7), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_snowflake_power_of_k(space, p):
    assert q.snowflake_transform(space, p).k_min == pytest.approx(space.k_min ** p, rel=1e-9)


def test_snowflake_rejects_small_exponent():
    with pytest.raises(q.DomainError):
        q.snowflake_transform(q.arithmetic_grid(3), 0.5)


def test_validate_reports_offenders():
    rep = q.validate_space([[0, 1], [2, 0]])
    assert not rep.passed and not rep.symmetric and rep.offending == (0, 1)
    rep = q.validate_space([[0, 0], [0, 0]])
    assert not rep.positive
    rep = q.validate_space([[1, 1], [1, 0]])
    assert not rep.zero_diagonal
    assert q.validate_space(q.cantor(depth=2).rho).passed


@pytest.mark.parametrize("bad", [[[0, 1]], [[0, "x"], ["x", 0]], [[0, float("nan")], [1, 0]], [[0, -1], [-1, 0]]])
def test_validate_malformed(bad):
    with pytest.raises(q.MalformedInputError):
        q.validate_space(bad)


def test_cantor_points_exact():
    pts = q.core.cantor_points(Fraction(1, 3), 2)
    # endpoints of the four depth-2 intervals
    assert pts == [Fraction(x, 9) for x in (0, 1, 2, 3, 6, 7, 8, 9)]
    assert q.cantor(depth=6).n == 128


def test_geometric_generator():
    g = q.geometric(0.5, "squared", 3)
    assert np.allclose(sorted(g.rho[0]), [0, 2.0 ** -9, 2.0 ** -4, 0.5])
    with pytest.raises(q.SpecError):
        q.geometric(1.5, "linear", 3)
    with pytest.raises(q.SpecError):
        q.generate_space(q.SpaceGeneratorSpec("spiral", {}))


def test_cantor_ratio_domain():
    with pytest.raises(q.SpecError):
        q.cantor(Fraction(1, 2), 3)


def test_json_round_trip(tmp_path):
    s = q.cantor(depth=3)
    q.save_space(s, tmp_path / "s.json")
    t = q.load_space(tmp_path / "s.json")
    assert np.array_equal(s.rho, t.rho) and t.name == s.name
    (tmp_path / "bad.json").write_text(json.dumps({"rho": [[0, 1], [2, 0]]}))
    with pytest.raises(q.DomainError):
        q.load_space(tmp_path / "bad.json")


def test_rho_is_read_only():
    s = q.arithmetic_grid(4)
    with pytest.raises(ValueError):
        s.rho[0, 1] = 3.0
