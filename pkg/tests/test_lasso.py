import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamsel.lasso import (
    NotCertifiedWarning,
    RegressionProblem,
    kkt_violation,
    lasso_solve,
    objective,
    solve,
    support,
)


def brute_force(A, y, lam):
    """Enumerate sign patterns; each consistent stationary point is a candidate."""
    m = A.shape[1]
    best, best_obj = np.zeros(m), objective(A, y, np.zeros(m), lam)
    for signs in itertools.product((-1, 0, 1), repeat=m):
        s = np.array(signs, dtype=float)
        act = np.flatnonzero(s)
        if len(act) == 0:
            continue
        As = A[:, act]
        G = As.T @ As
        if np.linalg.matrix_rank(G) < len(act):
            continue
        b = np.linalg.solve(G, As.T @ y - lam * s[act])
        if np.any(np.sign(b) != s[act]):
            continue
        beta = np.zeros(m)
        beta[act] = b
        obj = objective(A, y, beta, lam)
        if obj < best_obj:
            best, best_obj = beta, obj
    return best, best_obj


def test_single_column_soft_threshold():
    sol = solve(np.array([[1.0]]), np.array([2.0]), lam=0.5)
    assert sol.beta[0] == pytest.approx(1.5, abs=1e-9)
    assert sol.certified


def test_orthogonal_columns():
    sol = solve(np.eye(2), np.array([3.0, 1.0]), lam=0.5)
    np.testing.assert_allclose(sol.beta, [2.5, 0.5], atol=1e-9)


def test_large_lambda_gives_zero():
    rng = np.random.default_rng(0)
    A, y = rng.normal(size=(10, 4)), rng.normal(size=10)
    lam = np.abs(A.T @ y).max()
    sol = solve(A, y, lam=lam)
    np.testing.assert_array_equal(sol.beta, 0)
    assert support(sol) == []


def test_zero_lambda_is_least_squares():
    rng = np.random.default_rng(1)
    A, y = rng.normal(size=(20, 3)), rng.normal(size=20)
    sol = solve(A, y, lam=0.0, tol=1e-10)
    ls, *_ = np.linalg.lstsq(A, y, rcond=None)
    np.testing.assert_allclose(sol.beta, ls, atol=1e-7)


def test_duplicate_columns_tie():
    a = np.array([1.0, -1.0, 2.0, 0.5])
    A = np.stack([a, a], axis=1)
    sol = solve(A, 3 * a, lam=0.3)
    # any split of the weight is optimal; the total is determined
    assert sol.certified
    assert sol.beta.sum() == pytest.approx(3 - 0.3 / (a @ a), abs=1e-6)


@pytest.mark.parametrize("A, y, lam", [
    (np.array([[np.nan]]), np.array([1.0]), 0.3),
    (np.ones((2, 1)), np.array([1.0, np.inf]), 0.3),
    (np.ones((2, 1)), np.ones(2), -1.0),
    (np.ones((3, 1)), np.ones(2), 0.3),
])
def test_invalid_problems(A, y, lam):
    with pytest.raises(ValueError):
        RegressionProblem(A, y, lam)


def test_empty_design():
    sol = solve(np.zeros((3, 0)), np.ones(3))
    assert sol.beta.shape == (0,) and sol.certified


def test_not_certified_warns():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(30, 8))
    A[:, 1] = A[:, 0] + 1e-3 * rng.normal(size=30)
    y = A @ rng.normal(size=8)
    with pytest.warns(NotCertifiedWarning):
        sol = lasso_solve(RegressionProblem(A, y, 0.01), tol=1e-12, max_iter=1)
    assert not sol.certified


def test_support_threshold():
    assert support(np.array([0.5, 1e-9, -2e-8, 0.0])) == [0, 2]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.floats(0.01, 2.0))
def test_matches_brute_force_oracle(seed, m, lam):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(m + 2, 12))
    A, y = rng.normal(size=(n, m)), rng.normal(size=n)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NotCertifiedWarning)
        sol = solve(A, y, lam=lam, tol=1e-9)
    ref, ref_obj = brute_force(A, y, lam)
    assert sol.objective == pytest.approx(ref_obj, rel=1e-8, abs=1e-10)
    np.testing.assert_allclose(sol.beta, ref, atol=1e-6)
    assert kkt_violation(A, y, sol.beta, lam) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_descent_and_column_permutation(seed):
    rng = np.random.default_rng(seed)
    A, y = rng.normal(size=(15, 6)), rng.normal(size=15)
    sol = solve(A, y, lam=0.3, tol=1e-10)
    assert all(b <= a + 1e-12 for a, b in zip(sol.history, sol.history[1:]))
    perm = rng.permutation(6)
    sol2 = solve(A[:, perm], y, lam=0.3, tol=1e-10)
    np.testing.assert_allclose(sol2.beta, sol.beta[perm], atol=1e-6)
