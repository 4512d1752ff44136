"""First two moments of the loss vector and the quantities derived from them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatchError,
    InvalidSizeError,
    NonPositiveMeanError,
    NonSquareError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class LossModel:
    """Certified mean vector and covariance matrix.

    Build with :func:`validate`. The Cholesky factor of ``sigma`` is kept and
    reused for every application of the inverse covariance; the inverse itself
    is never formed.
    """

    mu: np.ndarray
    sigma: np.ndarray
    _chol: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @property
    def chol_lower(self) -> np.ndarray:
        """Lower-triangular ``L`` with ``L @ L.T == sigma``."""
        c, lower = self._chol
        return np.tril(c) if lower else np.triu(c).T

    def solve(self, b: np.ndarray) -> np.ndarray:
        """``sigma^{-1} b`` via the cached factorization."""
        return sla.cho_solve(self._chol, b)

    def right_solve(self, x: np.ndarray) -> np.ndarray:
        """``x sigma^{-1}`` for a matrix ``x`` (sigma is symmetric)."""
        return sla.cho_solve(self._chol, np.asarray(x).T).T

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.sigma).copy()


def validate(mu, sigma) -> LossModel:
    """Check raw moments and return a certified :class:`LossModel`.

    Small asymmetries (relative ``1e-10``) are averaged away; anything larger
    is rejected. Positive definiteness is certified by a Cholesky
    factorization.
    """
    mu = np.array(mu, dtype=float)
    sigma = np.array(sigma, dtype=float)
    if mu.ndim != 1:
        raise DimensionMismatchError(f"mu must be a vector, got shape {mu.shape}")
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NonSquareError(f"sigma must be a square matrix, got shape {sigma.shape}")
    if sigma.shape[0] != mu.shape[0]:
        raise DimensionMismatchError(
            f"mu has length {mu.shape[0]} but sigma is {sigma.shape[0]}x{sigma.shape[1]}"
        )
    n = mu.shape[0]
    if n < 2:
        raise InvalidSizeError(f"need at least 2 agents, got {n}")
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
        raise NotPositiveDefiniteError("mu and sigma must be finite")
    if np.any(mu <= 0):
        bad = int(np.flatnonzero(mu <= 0)[0]) + 1
        raise NonPositiveMeanError(f"every mean must be positive; mu[{bad}] = {mu[bad - 1]}")

    asym = np.max(np.abs(sigma - sigma.T))
    if asym > SYMMETRY_RTOL * max(1.0, np.max(np.abs(sigma))):
        raise NotSymmetricError(f"sigma is not symmetric (max |s_ij - s_ji| = {asym:.3g})")
    sigma = 0.5 * (sigma + sigma.T)

    try:
        chol = sla.cho_factor(sigma, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("sigma is not positive definite") from None

    mu.setflags(write=False)
    sigma.setflags(write=False)
    return LossModel(mu, sigma, chol)


def fairness_scalar(model: LossModel) -> float:
    """``a = mu^T sigma^{-1} mu``."""
    return float(model.mu @ model.solve(model.mu))


def apply_rule(A, x) -> np.ndarray:
    """Reallocated losses ``A x``. ``A`` may be a matrix or a sharing object."""
    A = np.asarray(getattr(A, "A", A), dtype=float)
    x = np.asarray(x, dtype=float)
    if A.ndim != 2 or A.shape[1] != x.shape[-1]:
        raise DimensionMismatchError(f"cannot apply {A.shape} rule to losses of shape {x.shape}")
    return x @ A.T if x.ndim == 2 else A @ x


def objective(A, sigma) -> float:
    """Half the total post-sharing variance, ``tr(A sigma A^T) / 2``."""
    A = np.asarray(getattr(A, "A", A), dtype=float)
    sigma = np.asarray(getattr(sigma, "sigma", sigma), dtype=float)
    if A.ndim != 2 or sigma.shape != (A.shape[1], A.shape[1]):
        raise DimensionMismatchError(f"A {A.shape} and sigma {sigma.shape} do not conform")
    return 0.5 * float(np.einsum("ij,jk,ik->", A, sigma, A))
