import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msefield import (
    DecodingPath,
    PathKind,
    make_sic_path,
    make_straight_line,
    make_waypoint_path,
    random_monotone_path,
    sample_path,
    validate_path,
)


def test_straight_line_points():
    assert np.allclose(make_straight_line(2)(0.5), [0.5, 0.5])
    assert np.array_equal(make_straight_line(3)(0.0), [1, 1, 1])
    assert np.array_equal(make_straight_line(1)(1.0), [0])


def test_sic_segments():
    p = make_sic_path([0, 1])
    assert p.kind is PathKind.SIC
    assert np.allclose(p(0.25), [0.5, 1.0])
    assert np.allclose(p(0.5), [0.0, 1.0])


def test_sic_three_users_visits_corners():
    p = make_sic_path([2, 0, 1])
    assert p.num_segments == 3
    assert np.array_equal(p.vertices[1], [1, 1, 0])
    assert np.array_equal(p.vertices[2], [0, 1, 0])


@pytest.mark.parametrize("order", [[0, 0], [0, 2], [1]])
def test_sic_rejects_non_permutation(order):
    with pytest.raises(ValueError):
        make_sic_path(order)


def test_waypoint_path_adds_endpoints():
    p = make_waypoint_path([[0.7, 0.4]])
    assert np.array_equal(p.vertices, [[1, 1], [0.7, 0.4], [0, 0]])


def test_parameter_is_proportional_to_length():
    p = make_waypoint_path([[0.0, 1.0]])
    assert np.allclose(p.knots, [0, 0.5, 1])


def test_valid_straight_line():
    assert validate_path(make_straight_line(2), samples=100).ok


def test_range_violation_reports_waypoint():
    p = make_waypoint_path([[0.5, 1.2]])
    rep = validate_path(p)
    assert not rep.ok and rep.violation == "range"
    assert rep.user == 1
    assert rep.t == pytest.approx(p.knots[1])


def test_monotonicity_violation():
    p = make_waypoint_path([[0.2, 0.8], [0.4, 0.5]])
    rep = validate_path(p)
    assert rep.violation == "monotonicity" and rep.user == 0
    assert rep.t == pytest.approx(p.knots[2])


def test_endpoint_violations():
    start = DecodingPath(np.array([[0.9, 1.0], [0.0, 0.0]]))
    end = DecodingPath(np.array([[1.0, 1.0], [0.0, 0.1]]))
    assert validate_path(start).violation == "start"
    assert validate_path(end).violation == "end"


def test_sample_straight_line():
    pts = sample_path(make_straight_line(1), 3)
    assert [t for t, _ in pts] == [0.0, 0.5, 1.0]
    assert np.allclose([v[0] for _, v in pts], [1.0, 0.5, 0.0])


def test_sample_includes_sic_corner():
    pts = sample_path(make_sic_path([0, 1]), 5)
    assert any(np.array_equal(v, [0.0, 1.0]) for _, v in pts)


def test_sample_count_and_order():
    p = make_waypoint_path([[0.9, 0.6], [0.5, 0.5], [0.1, 0.3]])
    pts = sample_path(p, 101)
    t = np.array([t for t, _ in pts])
    assert len(pts) == 101
    assert np.all(np.diff(t) > 0)
    for vert in p.vertices:
        assert any(np.array_equal(v, vert) for _, v in pts)


def test_descriptor_round_trip():
    for p in (make_straight_line(3), make_sic_path([1, 2, 0]), make_waypoint_path([[0.5, 0.2, 0.9]])):
        back = DecodingPath.from_dict(p.to_dict())
        assert np.array_equal(back.vertices, p.vertices)
        assert back.kind is p.kind


def test_descriptor_missing_kind():
    with pytest.raises(ValueError, match="kind"):
        DecodingPath.from_dict({"waypoints": [[0.5]]})


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_random_paths_are_valid(k, n, seed):
    p = random_monotone_path(k, n, np.random.default_rng(seed))
    assert validate_path(p).ok
    assert np.all(np.diff(p.knots) > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_permuted_path_evaluates_permuted(k, seed):
    rng = np.random.default_rng(seed)
    p = random_monotone_path(k, 2, rng)
    perm = rng.permutation(k)
    t = rng.uniform(size=7)
    assert np.allclose(p.permuted(perm)(t), p(t)[:, perm])
