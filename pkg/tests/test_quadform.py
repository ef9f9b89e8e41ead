import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import plain, random_quadratic
from qmeet.quadform import (DimensionError, Quadratic, SignTag, attains_nonpositive, attains_zero,
                            critical_value, drop_below, eval_many, is_nonneg, negative_point,
                            sign_profile)


def test_factor_two_convention():
    f = Quadratic(np.eye(2), [1.0, 0.0], 3.0)
    assert f([1.0, 2.0]) == pytest.approx(1 + 4 + 2 + 3)
    g = Quadratic.from_plain(np.eye(2), [1.0, 0.0], 3.0)
    assert g([1.0, 2.0]) == pytest.approx(1 + 4 + 1 + 3)
    h = Quadratic.affine([2.0, -1.0], 0.5)
    assert h([1.0, 1.0]) == pytest.approx(1.5)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        Quadratic(np.eye(2), [1.0], 0.0)
    with pytest.raises(DimensionError):
        Quadratic(np.eye(2), [0.0, 0.0], 0.0)([1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        Quadratic(np.eye(2), [0.0, 0.0], 0.0) + Quadratic(np.eye(3), np.zeros(3), 0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_compose_affine_and_arithmetic(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    f, g = random_quadratic(rng, n), random_quadratic(rng, n)
    P, q = rng.normal(size=(n, m)), rng.normal(size=n)
    z = rng.normal(size=m)
    x = P @ z + q
    assert f.compose_affine(P, q)(z) == pytest.approx(f(x), rel=1e-9, abs=1e-9)
    assert (2.0 * f - g)(x) == pytest.approx(2.0 * f(x) - g(x), rel=1e-9, abs=1e-9)
    X = rng.normal(size=(7, n))
    np.testing.assert_allclose(eval_many(f, X), [f(r) for r in X], rtol=1e-12, atol=1e-12)


def test_gradient_matches_finite_differences():
    f = plain([[1, 2], [2, -3]], [1, -1], 0.5)
    x, h = np.array([0.3, -0.7]), 1e-6
    fd = [(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)]
    np.testing.assert_allclose(f.gradient(x), fd, rtol=1e-6)


def test_critical_value():
    cv, x0 = critical_value(plain([[1, 0], [0, 0]], [2, 0], 5))
    assert cv == pytest.approx(4.0)
    np.testing.assert_allclose(x0, [-1.0, 0.0])
    assert critical_value(plain([[1, 0], [0, 0]], [0, 1], 0)) == (None, None)


@pytest.mark.parametrize("f, tag", [
    (plain(np.eye(2), [0, 0], 1), SignTag.NONNEG),
    (plain(-np.eye(2), [0, 0], 0), SignTag.NONPOS),
    (plain(np.diag([1, -1]), [0, 0], 0), SignTag.TWO_SIDED),
    (plain(np.zeros((2, 2)), [1, 0], 0), SignTag.TWO_SIDED),
    (plain(np.zeros((2, 2)), [0, 0], 0), SignTag.ZERO),
    (plain(np.diag([1, 0]), [0, 1], 0), SignTag.TWO_SIDED),  # parabola
])
def test_sign_profile(f, tag):
    prof = sign_profile(f)
    assert prof.tag is tag
    if prof.witnessNeg is not None:
        assert f(prof.witnessNeg) < 0
    if prof.witnessPos is not None:
        assert f(prof.witnessPos) > 0


def test_nonneg_global_min_and_mirror():
    prof = sign_profile(plain(np.eye(2), [2, 0], 3))
    assert prof.globalMin == pytest.approx(2.0) and prof.minAttained
    assert SignTag.NONNEG.mirrored() is SignTag.NONPOS
    assert is_nonneg(plain(np.eye(1), [0], 0))
    assert not is_nonneg(plain(np.eye(1), [0], -1e-3))


def test_negative_point_on_nearly_flat_direction():
    # a tiny positive curvature along an escape direction must not overflow
    f = Quadratic(np.diag([1e-12, 1.0]), [-1e-8, 0.0], 1.0)
    x = negative_point(f)
    assert x is None or f(x) < 0


@pytest.mark.parametrize("f, expected", [
    (plain(np.eye(2), [0, 0], -1), True),
    (plain(np.eye(2), [0, 0], 1), False),
    (plain(np.eye(2), [0, 0], 0), True),  # touches zero at its minimum
    (plain(np.diag([1, 0]), [0, 0], 1), False),
    (plain(np.zeros((1, 1)), [0], 2), False),
])
def test_attains_zero(f, expected):
    hit, w = attains_zero(f)
    assert hit is expected
    if hit:
        assert abs(f(w)) <= 1e-9


def test_attains_nonpositive():
    assert attains_nonpositive(plain(np.eye(1), [0], 0))[0]
    assert not attains_nonpositive(plain(np.eye(1), [0], 0.5))[0]
    assert attains_nonpositive(plain(np.zeros((1, 1)), [1], 5))[0]


def test_drop_below_removes_tilt():
    q = Quadratic(np.diag([1e-9, 2.0]), [1e-9, 1.0], 0.5)
    d = drop_below(q, 1e-7)
    np.testing.assert_allclose(d.matA, np.diag([0.0, 2.0]), atol=1e-15)
    np.testing.assert_allclose(d.vecA, [0.0, 1.0], atol=1e-15)
