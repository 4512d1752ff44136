"""Optimal rule when every friend of an agent takes the same share of that agent's loss.

Fairness pins the family down to ``A(c) = I - c L M^{-1}`` with
``M = diag(mu)``, and the total variance is a convex quadratic in ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError
from .friends import _require_conformant
from .graph import Graph, laplacian
from .loss_model import LossModel, objective
from .sharing import SharingMatrix, check_feasible, feasibility_residuals

DENOM_RTOL = 1e-14


@dataclass(frozen=True, eq=False)
class EqualShareReport:
    sharing: SharingMatrix
    c_hat: float
    objective: float
    diagnostics: dict

    @property
    def A(self) -> np.ndarray:
        return self.sharing.A


def _scaled_laplacian(model: LossModel, graph: Graph) -> np.ndarray:
    # L M^{-1}: divide column j by mu_j
    return laplacian(graph) / model.mu[None, :]


def variance_terms(model: LossModel, graph: Graph) -> tuple[float, float, float]:
    """Coefficients of ``objective(A(c)) = t0 - c t1 + c^2 t2 / 2``.

    ``t0 = tr(sigma)/2``, ``t1 = tr(L M^{-1} sigma)``,
    ``t2 = tr(L M^{-1} sigma M^{-1} L)``.
    """
    LM = _scaled_laplacian(model, graph)
    S = model.sigma
    t0 = 0.5 * float(np.trace(S))
    t1 = float(np.sum(LM * S.T))
    t2 = float(np.sum((LM @ S) * LM))
    return t0, t1, t2


def c_hat(model: LossModel, graph: Graph) -> float:
    """Minimizer of the one-parameter variance quadratic."""
    _require_conformant(model, graph)
    _, t1, t2 = variance_terms(model, graph)
    scale = np.sum(_scaled_laplacian(model, graph) ** 2) * np.max(np.abs(model.sigma))
    if not t2 > DENOM_RTOL * scale:
        raise DegenerateDenominatorError(f"denominator {t2:.3g} is degenerate (scale {scale:.3g})")
    return t1 / t2


def c_hat_uncorrelated(degrees, mu, sigma_diag) -> float:
    """Closed form for diagonal covariance."""
    d = np.asarray(degrees, dtype=float)
    mu = np.asarray(mu, dtype=float)
    s2 = np.asarray(sigma_diag, dtype=float)
    return float(np.sum(d * s2 / mu) / np.sum((d**2 + d) * s2 / mu**2))


def equal_share_matrix(c: float, model: LossModel, graph: Graph) -> np.ndarray:
    return np.eye(graph.n) - c * _scaled_laplacian(model, graph)


def solve_equal_share(model: LossModel, graph: Graph) -> EqualShareReport:
    c = c_hat(model, graph)
    A = equal_share_matrix(c, model, graph)
    res = feasibility_residuals(A, model.mu)
    check_feasible(res, tol=1e-12 * max(1.0, abs(c) * float(np.max(graph.degrees))))
    return EqualShareReport(
        SharingMatrix(A, "equal_share"),
        c,
        objective(A, model.sigma),
        {"feasibility": res},
    )
