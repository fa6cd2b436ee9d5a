import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from borat.errors import InvalidInputError
from borat.projections import L2_BALL, FeasibleRegion, contains, project

vectors = arrays(np.float64, st.integers(1, 8), elements=st.floats(-1e4, 1e4))
radii = st.floats(1e-3, 1e4)


def test_unconstrained_is_identity():
    w = np.array([3.0, -7.0, 1e6])
    assert project(FeasibleRegion(), w) is w
    assert contains(FeasibleRegion(), w)


def test_ball_examples():
    ball = FeasibleRegion(L2_BALL, 1.0)
    np.testing.assert_array_equal(project(ball, np.array([2.0, 0.0])), [1.0, 0.0])
    assert not contains(ball, np.array([2.0, 0.0]))
    np.testing.assert_array_equal(project(FeasibleRegion(L2_BALL, 4.0), np.array([1.0, 1.0])), [1.0, 1.0])


def test_radius_bounds_the_squared_norm():
    w = project(FeasibleRegion(L2_BALL, 4.0), np.array([3.0, 4.0]))
    assert float(w @ w) == pytest.approx(4.0)


def test_rejects_non_finite_and_bad_radius():
    with pytest.raises(InvalidInputError):
        project(FeasibleRegion(L2_BALL, 1.0), np.array([np.nan]))
    with pytest.raises(InvalidInputError):
        FeasibleRegion(L2_BALL, -1.0)
    with pytest.raises(InvalidInputError):
        FeasibleRegion("box", 1.0)


@pytest.mark.parametrize("text, region", [
    ("none", FeasibleRegion()),
    ("l2:100", FeasibleRegion(L2_BALL, 100.0)),
    ("L2:0.5", FeasibleRegion(L2_BALL, 0.5)),
])
def test_parse_round_trip(text, region):
    assert FeasibleRegion.parse(text) == region
    assert FeasibleRegion.parse(str(region)) == region


@pytest.mark.parametrize("text", ["l2:", "l2:abc", "l1:3", "ball"])
def test_parse_rejects_garbage(text):
    with pytest.raises(InvalidInputError):
        FeasibleRegion.parse(text)


@given(vectors, radii)
@settings(max_examples=300, deadline=None)
def test_projection_is_idempotent_and_feasible(w, r):
    ball = FeasibleRegion(L2_BALL, r)
    once = project(ball, w)
    assert contains(ball, once, 1e-9)
    np.testing.assert_array_equal(project(ball, once), once)


@given(st.integers(0, 100_000), radii)
@settings(max_examples=200, deadline=None)
def test_projection_is_nonexpansive(seed, r):
    rng = np.random.default_rng(seed)
    a, b = 10 * rng.standard_normal((2, 5))
    ball = FeasibleRegion(L2_BALL, r)
    assert np.linalg.norm(project(ball, a) - project(ball, b)) <= np.linalg.norm(a - b) + 1e-12


@given(st.integers(0, 100_000), radii)
@settings(max_examples=200, deadline=None)
def test_projection_is_nearest_feasible_point(seed, r):
    rng = np.random.default_rng(seed)
    w = 10 * rng.standard_normal(4)
    ball = FeasibleRegion(L2_BALL, r)
    p = project(ball, w)
    for _ in range(20):
        u = rng.standard_normal(4)
        u *= np.sqrt(r) * rng.uniform() / np.linalg.norm(u)
        assert np.linalg.norm(w - p) <= np.linalg.norm(w - u) + 1e-9
