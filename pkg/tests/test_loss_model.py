import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p2prisk import apply_rule, fairness_scalar, objective, validate
from p2prisk.errors import (
    DimensionMismatchError,
    InvalidSizeError,
    NonPositiveMeanError,
    NonSquareError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

from helpers import SIGMA_NEG, SIGMA_POS, random_pd


def test_validate_accepts_worked_inputs():
    validate(np.ones(4), np.eye(4))
    m = validate(np.ones(4), SIGMA_NEG)
    assert np.all(np.linalg.eigvalsh(m.sigma) > 0)


@pytest.mark.parametrize(
    "mu, sigma, err",
    [
        ([1, 1], [[1, 2], [2, 1]], NotPositiveDefiniteError),
        ([1, 1], [[1, 0, 0], [0, 1, 0]], NonSquareError),
        ([1, 1, 1], np.eye(2), DimensionMismatchError),
        ([1, 1], [[1, 0.5], [0.4, 1]], NotSymmetricError),
        ([1, 0], np.eye(2), NonPositiveMeanError),
        ([1, -2], np.eye(2), NonPositiveMeanError),
        ([1], [[1]], InvalidSizeError),
    ],
)
def test_validate_rejects(mu, sigma, err):
    with pytest.raises(err):
        validate(mu, sigma)


def test_validate_symmetrizes_roundoff():
    s = np.array([[2.0, 0.5], [0.5 + 1e-13, 2.0]])
    m = validate([1, 1], s)
    assert m.sigma[0, 1] == m.sigma[1, 0]
    with pytest.raises(ValueError):
        m.sigma[0, 0] = 3.0


def test_fairness_scalar_examples():
    assert fairness_scalar(validate(np.ones(4), np.eye(4))) == pytest.approx(4.0, abs=1e-15)
    assert fairness_scalar(validate([0.25, 1, 4], np.eye(3))) == pytest.approx(273 / 16, rel=1e-15)


def test_fairness_scalar_two_by_two_explicit_inverse():
    mu = np.array([1.0, 5.0])
    a, b, d = 1.0, 3.0, 9.5
    det = a * d - b * b
    inv = np.array([[d, -b], [-b, a]]) / det
    expected = mu @ inv @ mu
    assert fairness_scalar(validate(mu, [[a, b], [b, d]])) == pytest.approx(expected, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_fairness_scalar_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    mu, S = rng.uniform(0.1, 10, n), random_pd(rng, n)
    p = rng.permutation(n)
    a1 = fairness_scalar(validate(mu, S))
    a2 = fairness_scalar(validate(mu[p], S[np.ix_(p, p)]))
    assert a1 == pytest.approx(a2, rel=1e-10)


def test_apply_rule():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(apply_rule(np.eye(4), x), x)
    np.testing.assert_allclose(apply_rule(np.full((4, 4), 0.25), x), 2.5)
    A = np.array([[2, 3, 2, 3], [3, 4, 3, 0], [2, 3, 2, 3], [3, 0, 3, 4]]) / 10
    np.testing.assert_allclose(apply_rule(A, np.ones(4)), np.ones(4), atol=1e-15)
    with pytest.raises(DimensionMismatchError):
        apply_rule(np.eye(3), x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_apply_rule_linear(seed):
    rng = np.random.default_rng(seed)
    A, x, y = rng.normal(size=(5, 5)), rng.normal(size=5), rng.normal(size=5)
    np.testing.assert_allclose(apply_rule(A, x + y), apply_rule(A, x) + apply_rule(A, y), atol=1e-12)


def test_objective_examples():
    assert objective(np.eye(4), np.eye(4)) == 2.0
    assert objective(np.full((4, 4), 0.25), np.eye(4)) == pytest.approx(0.5, abs=1e-15)
    A = np.array([[2, 5, 2, 5], [5, 4, 5, 0], [2, 5, 2, 5], [5, 0, 5, 4]]) / 14
    assert objective(A, SIGMA_POS) == pytest.approx(19 / 21, abs=1e-14)
    with pytest.raises(DimensionMismatchError):
        objective(np.eye(3), np.eye(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_objective_is_half_sum_of_row_variances(seed, n):
    rng = np.random.default_rng(seed)
    A, S = rng.normal(size=(n, n)), random_pd(rng, n)
    by_rows = 0.5 * sum(A[i] @ S @ A[i] for i in range(n))
    assert objective(A, S) == pytest.approx(by_rows, rel=1e-12)
    assert objective(A, S) >= 0
