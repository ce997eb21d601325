import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from melasso.errors import ValidationError
from melasso.projection import L1Ball, l1_threshold, project_l1
from oracles import project_l1_bisect

vectors = arrays(np.float64, st.integers(1, 60), elements=st.floats(-50, 50))
radii = st.floats(0.0, 100.0)


def test_inside_ball_unchanged():
    v = np.array([0.5, -0.3])
    out = project_l1(v, 1.0)
    np.testing.assert_array_equal(out, v)


def test_single_coordinate_clamp():
    np.testing.assert_array_equal(project_l1(np.array([3.0, 0.0]), 1.0), [1.0, 0.0])


def test_threshold_one():
    v = np.array([2.0, 1.0])
    assert l1_threshold(v, 1.0) == 1.0
    np.testing.assert_array_equal(project_l1(v, 1.0), [1.0, 0.0])


def test_hand_computed_three_coordinates():
    # sorted magnitudes 3, 2, 1 -> theta = (3 + 2 - 2) / 2 = 1.5
    np.testing.assert_allclose(project_l1(np.array([3.0, 1.0, -2.0]), 2.0), [1.5, 0.0, -0.5], atol=1e-15)


def test_kappa_zero_gives_zero():
    np.testing.assert_array_equal(project_l1(np.array([1.0, -2.0, 0.3]), 0.0), np.zeros(3))


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        project_l1(np.array([1.0]), -1.0)
    with pytest.raises(ValidationError):
        project_l1(np.array([np.nan, 1.0]), 1.0)
    with pytest.raises(ValidationError):
        L1Ball(-0.5)


def test_ties_at_threshold_map_to_zero():
    # theta = 1 exactly; the coordinate equal to 1 must become exactly 0
    v = np.array([3.0, 1.0, -1.0])
    out = project_l1(v, 2.0)
    assert out[1] == 0.0 and out[2] == 0.0


def test_ball_object():
    ball = L1Ball(2.0)
    x = ball.project(np.array([5.0, -5.0]))
    assert ball.contains(x)
    np.testing.assert_allclose(x, [1.0, -1.0])


@given(vectors, radii)
def test_matches_bisection_oracle(v, kappa):
    np.testing.assert_allclose(project_l1(v, kappa), project_l1_bisect(v, kappa), atol=1e-10, rtol=0)


@given(vectors, radii)
def test_feasible_and_sign_preserving(v, kappa):
    out = project_l1(v, kappa)
    assert np.abs(out).sum() <= kappa * (1 + 1e-12)
    assert np.all((out == 0) | (np.sign(out) == np.sign(v)))


@given(vectors, radii)
def test_idempotent(v, kappa):
    once = project_l1(v, kappa)
    np.testing.assert_array_equal(project_l1(once, kappa), once)


@given(vectors, radii, st.randoms(use_true_random=False))
def test_permutation_equivariance(v, kappa, rnd):
    perm = list(range(v.size))
    rnd.shuffle(perm)
    perm = np.array(perm)
    np.testing.assert_allclose(project_l1(v[perm], kappa), project_l1(v, kappa)[perm], atol=1e-12)


@given(st.integers(1, 40), radii, st.integers(0, 2**32 - 1))
def test_nonexpansive(p, kappa, seed):
    r = np.random.default_rng(seed)
    u, v = r.normal(0, 5, p), r.normal(0, 5, p)
    d_out = np.linalg.norm(project_l1(u, kappa) - project_l1(v, kappa))
    assert d_out <= np.linalg.norm(u - v) * (1 + 1e-12) + 1e-12


@given(vectors, radii)
def test_is_the_nearest_feasible_point(v, kappa):
    # variational inequality: (v - x)'(z - x) <= 0 for feasible z
    x = project_l1(v, kappa)
    r = np.random.default_rng(0)
    for _ in range(5):
        z = project_l1_bisect(r.normal(0, 10, v.size), kappa)
        assert (v - x) @ (z - x) <= 1e-8 * (1 + np.abs(v).sum() ** 2)


@given(vectors, st.floats(1e-12, 1e-3))
def test_tiny_radius_stays_feasible(v, kappa):
    out = project_l1(v * 1e3, kappa)
    assert np.abs(out).sum() <= kappa * (1 + 1e-12)
