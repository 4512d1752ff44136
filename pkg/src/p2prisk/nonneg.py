"""Nonnegativity criteria for optimal sharing matrices.

Each check returns a :class:`NonnegVerdict` carrying the two sides of the
inequality it tests, so callers can see the margin and not just the answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equal_share import c_hat as _c_hat
from .errors import WrongArityError
from .graph import Graph, make_complete
from .loss_model import LossModel, fairness_scalar

VERDICT_RTOL = 1e-12
ENTRY_TOL = 1e-12


@dataclass(frozen=True)
class NonnegVerdict:
    criterion: str
    holds: bool
    lhs: float
    rhs: float
    witness: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "holds": self.holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def _within(lhs: float, rhs: float) -> bool:
    return bool(lhs <= rhs + VERDICT_RTOL * max(1.0, abs(rhs)))


def check_complete_scaled_identity(mu) -> NonnegVerdict:
    """Complete-graph test for ``sigma = c I``: ``||mu - min(mu)||_1 ||mu||_inf <= ||mu||_2^2``."""
    mu = np.asarray(mu, dtype=float)
    lhs = float(np.sum(mu - mu.min()) * mu.max())
    rhs = float(mu @ mu)
    return NonnegVerdict("scaled-identity", _within(lhs, rhs), lhs, rhs)


def check_complete_general(model: LossModel) -> NonnegVerdict:
    """Complete-graph test for an arbitrary positive definite covariance.

    With ``s = sigma^{-1} mu``, the optimum is nonnegative iff
    ``max(-min(s) ||mu - max(mu)||_1, max(s) ||mu - min(mu)||_1) <= mu^T s``.
    """
    mu = model.mu
    s = model.solve(mu)
    lhs = float(max(-s.min() * np.sum(mu.max() - mu), s.max() * np.sum(mu - mu.min())))
    rhs = fairness_scalar(model)
    return NonnegVerdict("complete-general", _within(lhs, rhs), lhs, rhs)


def check_equal_share(c_hat: float, mu, degrees, graph: Graph | None = None) -> NonnegVerdict:
    """Equal-share matrix is nonnegative iff ``0 <= c_hat d_i / mu_i <= 1`` for all ``i``.

    For ``c_hat >= 0`` the sides are ``max_i c_hat d_i / mu_i`` and 1; for a
    negative ``c_hat`` they are ``-c_hat`` and 0. The witness is a negative
    entry: the diagonal ``(i, i)`` of the first agent over its limit, or an
    off-diagonal ``(k, i)`` with ``k`` a friend of ``i`` when ``c_hat < 0``
    (``(i, i)`` if no graph is supplied).
    """
    mu = np.asarray(mu, dtype=float)
    d = np.asarray(degrees, dtype=float)
    ratios = c_hat * d / mu
    if c_hat < 0 and not _within(-c_hat, 0.0):
        i = int(np.flatnonzero(d > 0)[0]) + 1
        j = graph.neighbours(i)[0] if graph is not None else i
        return NonnegVerdict("equal-share", False, -float(c_hat), 0.0, (j, i))
    lhs = float(ratios.max())
    holds = _within(lhs, 1.0)
    witness = None
    if not holds:
        i = int(np.flatnonzero(ratios > 1.0 + VERDICT_RTOL)[0]) + 1
        witness = (i, i)
    return NonnegVerdict("equal-share", holds, lhs, 1.0, witness)


def check_covariance_threshold(model: LossModel, graph: Graph) -> NonnegVerdict:
    """Covariance form of ``c_hat >= 0``.

    The underlying inequality is
    ``sum_E Cov_ij (1/mu_i + 1/mu_j) <= sum_i d_i sigma_i^2 / mu_i``.
    Both sides are divided by ``sum_E (1/mu_i + 1/mu_j)``, so ``lhs`` is the
    weighted mean covariance across friendships and ``rhs`` the threshold it
    must not exceed. For two agents these are ``Cov(X_1, X_2)`` and
    ``(sigma_1^2 mu_2 + sigma_2^2 mu_1) / (mu_1 + mu_2)``.
    """
    mu = model.mu
    S = model.sigma
    d = graph.degrees
    weights = 0.0
    cov = 0.0
    for i, j in graph.edges:
        w = 1.0 / mu[i - 1] + 1.0 / mu[j - 1]
        weights += w
        cov += S[i - 1, j - 1] * w
    bound = float(np.sum(d * np.diag(S) / mu))
    lhs, rhs = cov / weights, bound / weights
    return NonnegVerdict("covariance-threshold", _within(lhs, rhs), float(lhs), float(rhs))


def check_two_agent(model: LossModel) -> NonnegVerdict:
    """Two-agent test: covariance bound together with ``c_hat <= mu_i``.

    Reports the covariance sides unless only the ``c_hat`` condition fails,
    in which case ``lhs = c_hat`` and ``rhs = min(mu)``.
    """
    if model.n != 2:
        raise WrongArityError(f"two-agent criterion needs n = 2, got n = {model.n}")
    g = make_complete(2)
    cov = check_covariance_threshold(model, g)
    c = _c_hat(model, g)
    mu_min = float(model.mu.min())
    cap_ok = _within(c, mu_min)
    if cov.holds and not cap_ok:
        i = int(np.argmin(model.mu)) + 1
        return NonnegVerdict("two-agent", False, float(c), mu_min, (i, i))
    witness = None if cov.holds else (1, 2)
    return NonnegVerdict("two-agent", cov.holds and cap_ok, cov.lhs, cov.rhs, witness)


def check_entrywise(A) -> NonnegVerdict:
    """Direct test: every entry at least ``-1e-12``. Witness is the most negative entry."""
    A = np.asarray(getattr(A, "A", A), dtype=float)
    k = np.unravel_index(np.argmin(A), A.shape)
    low = float(A[k])
    holds = bool(low >= -ENTRY_TOL)
    witness = None if holds else (int(k[0]) + 1, int(k[1]) + 1)
    return NonnegVerdict("entrywise", holds, -low, ENTRY_TOL, witness)
