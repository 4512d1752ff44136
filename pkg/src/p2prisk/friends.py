"""Optimal signed sharing matrix when only friends may share risk.

The optimum has the closed form

    A* = 11^T/n + E (mu mu^T / a + Gamma H) sigma^{-1},

with ``E = I - 11^T/n``, ``H = sigma^{-1} mu mu^T / a - I`` and
``a = mu^T sigma^{-1} mu``. ``Gamma`` is zero on the diagonal and on edges;
its remaining ``m`` entries solve the linear system obtained by requiring
``A*`` to vanish between non-friends. That system is the ``m x m`` principal
submatrix of ``F^T kron E`` (``F = H sigma^{-1}``) on the vec-indices of the
missing pairs.
"""

from __future__ import annotations

import warnings
import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import NotConnectedError, SingularSystemError, DimensionMismatchError
from .graph import Graph, is_connected, no_edge_indicator, off_edge_pairs, vec_index
from .loss_model import LossModel, fairness_scalar, objective
from .sharing import (
    SharingMatrix,
    SolveReport,
    check_feasible,
    feasibility_residuals,
    snap_structural_zeros,
)

DENSE_LIMIT = 4096
RCOND_MIN = 1e-13
ITER_RTOL = 1e-12


def _require_conformant(model: LossModel, graph: Graph) -> None:
    if model.n != graph.n:
        raise DimensionMismatchError(f"model has {model.n} agents but graph has {graph.n}")
    if not is_connected(graph):
        raise NotConnectedError("risk sharing requires a connected network")


def _pooling_terms(model: LossModel):
    n = model.n
    mu = model.mu
    a = fairness_scalar(model)
    w = model.solve(mu)
    P = np.full((n, n), 1.0 / n)
    E = np.eye(n) - P
    # mu mu^T sigma^{-1} / a  ==  outer(mu, w) / a
    fair = np.outer(mu, w) / a
    return a, w, P, E, fair


def feng_complete(model: LossModel) -> SolveReport:
    """Closed-form optimum on the complete graph (no network restriction)."""
    a, w, P, E, fair = _pooling_terms(model)
    A = P + E @ fair
    res = feasibility_residuals(A, model.mu)
    check_feasible(res)
    return SolveReport(
        SharingMatrix(A, "complete"),
        objective(A, model.sigma),
        [],
        {"feasibility": res, "fairness_scalar": a},
    )


def gamma_operators(model: LossModel):
    """Return ``(E, F, G)`` with the Gamma condition reading ``(E Gamma F)_ij = G_ij``."""
    a, w, P, E, fair = _pooling_terms(model)
    H = np.outer(w, model.mu) / a - np.eye(model.n)
    F = model.right_solve(H)
    G = -(E @ fair + P)
    return E, F, G


def _pair_indices(pairs, n):
    I = np.array([i - 1 for i, _ in pairs], dtype=int)
    J = np.array([j - 1 for _, j in pairs], dtype=int)
    vec = np.array([vec_index(i, j, n) for i, j in pairs], dtype=int)
    return I, J, vec


def assemble_gamma_system(model: LossModel, graph: Graph):
    """Dense ``(K, rhs)`` for the ``m`` unknown Gamma entries.

    Row/column ``p`` corresponds to ``off_edge_pairs(graph)[p]``. The Kronecker
    product is never materialized: the entry of ``F^T kron E`` at vec-indices
    ``(i, j), (k, l)`` is ``F[l, j] * E[i, k]``.
    """
    _require_conformant(model, graph)
    pairs = off_edge_pairs(graph)
    if not pairs:
        return np.zeros((0, 0)), np.zeros(0)
    E, F, G = gamma_operators(model)
    I, J, _ = _pair_indices(pairs, graph.n)
    K = F.T[np.ix_(J, J)] * E[np.ix_(I, I)]
    rhs = G[I, J]
    return K, rhs


def solve_gamma(K: np.ndarray, rhs: np.ndarray):
    """Solve ``K gamma = rhs`` by pivoted LU.

    Returns ``(gamma, diagnostics)``. Raises :class:`SingularSystemError` when
    the reciprocal 1-norm condition estimate drops below ``1e-13``.
    """
    K = np.asarray(K, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or rhs.shape != (K.shape[0],):
        raise DimensionMismatchError(f"K {K.shape} and rhs {rhs.shape} do not form a square system")
    m = K.shape[0]
    if m == 0:
        return np.zeros(0), {"method": "none", "rcond": 1.0, "residual": 0.0}
    anorm = np.linalg.norm(K, 1)
    with warnings.catch_warnings():
        # exact singularity is reported through rcond below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(K, check_finite=False)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond >= RCOND_MIN:
        raise SingularSystemError(
            f"Gamma system is numerically singular (rcond ~ {rcond:.3g})", rcond=float(rcond)
        )
    gamma = sla.lu_solve((lu, piv), rhs, check_finite=False)
    residual = float(np.max(np.abs(K @ gamma - rhs)))
    return gamma, {"method": "dense-lu", "rcond": float(rcond), "residual": residual}


def _solve_gamma_iterative(model: LossModel, graph: Graph, pairs):
    """Matrix-free GMRES on the same operator, for systems too big to form."""
    n = graph.n
    E, F, G = gamma_operators(model)
    I, J, _ = _pair_indices(pairs, n)
    m = len(pairs)

    def matvec(g):
        Gam = np.zeros((n, n))
        Gam[I, J] = np.ravel(g)
        return (E @ Gam @ F)[I, J]

    op = spla.LinearOperator((m, m), matvec=matvec, dtype=float)
    rhs = G[I, J]
    gamma, info = spla.gmres(op, rhs, rtol=ITER_RTOL, atol=0.0, restart=min(m, 200), maxiter=10 * m)
    residual = float(np.max(np.abs(matvec(gamma) - rhs)))
    if info != 0:
        raise SingularSystemError(
            f"iterative Gamma solve did not converge (info={info}, residual {residual:.3g})"
        )
    return gamma, {"method": "gmres", "rcond": None, "residual": residual}


def sharing_from_gamma(model: LossModel, Gamma: np.ndarray) -> np.ndarray:
    """Evaluate the closed form for a given multiplier matrix ``Gamma``."""
    a, w, P, E, fair = _pooling_terms(model)
    H = np.outer(w, model.mu) / a - np.eye(model.n)
    inner = np.outer(model.mu, model.mu) / a + Gamma @ H
    return P + E @ model.right_solve(inner)


def solve_friends(model: LossModel, graph: Graph, dense_limit: int = DENSE_LIMIT) -> SolveReport:
    """Optimal sharing matrix restricted to the network.

    Off-edge entries come out as exact zeros. Feasibility (column sums one,
    ``A mu = mu``) is verified before returning.
    """
    _require_conformant(model, graph)
    n = graph.n
    pairs = off_edge_pairs(graph)
    if len(pairs) > dense_limit:
        gamma, diag = _solve_gamma_iterative(model, graph, pairs)
    else:
        K, rhs = assemble_gamma_system(model, graph)
        gamma, diag = solve_gamma(K, rhs)
        if pairs:
            diag["condition"] = 1.0 / diag["rcond"]

    Gamma = np.zeros((n, n))
    if pairs:
        I, J, _ = _pair_indices(pairs, n)
        Gamma[I, J] = gamma
    A = sharing_from_gamma(model, Gamma)
    Z = no_edge_indicator(graph)
    diag["snapped_residue"] = snap_structural_zeros(A, Z)
    res = feasibility_residuals(A, model.mu, Z)
    check_feasible(res)
    diag["feasibility"] = res
    return SolveReport(
        SharingMatrix(A, "friends"),
        objective(A, model.sigma),
        [(i, j, float(g)) for (i, j), g in zip(pairs, gamma)],
        diag,
    )
