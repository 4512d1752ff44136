"""Brute-force oracle: the network problem as an equality-constrained QP over ``vec(A)``.

    minimize  x^T Q x / 2   subject to  B x = c

with ``x = vec(A)`` (column-major), ``Q = sigma kron I`` and ``B`` stacking
the fairness rows, the column-sum rows and one selector row per missing
ordered pair. The KKT block system is formed densely and solved by pivoted
LU. Nothing here reuses the closed-form solver, so agreement between the two
is meaningful.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatchError, NotConnectedError, RankDeficiencyError, TooLargeError
from .graph import Graph, is_connected, no_edge_indicator, off_edge_pairs
from .loss_model import LossModel
from .sharing import SharingMatrix, SolveReport, snap_structural_zeros

MAX_KKT_ROWS = 6000
RCOND_MIN = 1e-13


@dataclass(frozen=True, eq=False)
class VectorizedQP:
    Q: np.ndarray
    B: np.ndarray
    c: np.ndarray
    n: int
    m: int

    @property
    def B_mu(self) -> np.ndarray:
        return self.B[: self.n]

    @property
    def B_one(self) -> np.ndarray:
        return self.B[self.n : 2 * self.n]

    @property
    def B_zero(self) -> np.ndarray:
        return self.B[2 * self.n :]


@dataclass(frozen=True, eq=False)
class KktSolution:
    x_star: np.ndarray
    nu_star: np.ndarray
    residual: float
    stationarity: float
    primal: float
    qp: VectorizedQP
    dropped_row: int


def vec(A: np.ndarray) -> np.ndarray:
    return np.asarray(A).reshape(-1, order="F")


def unvec(x: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(x).reshape((n, n), order="F")


def build_qp(model: LossModel, graph: Graph) -> VectorizedQP:
    n = graph.n
    if model.n != n:
        raise DimensionMismatchError(f"model has {model.n} agents but graph has {n}")
    if not is_connected(graph):
        raise NotConnectedError("risk sharing requires a connected network")
    m = len(off_edge_pairs(graph))
    size = n * n + 2 * n + m
    if size > MAX_KKT_ROWS:
        raise TooLargeError(
            f"KKT system would have {size} rows (cap {MAX_KKT_ROWS}); use the closed-form solver"
        )
    eye = np.eye(n)
    Q = np.kron(model.sigma, eye)
    B_mu = np.kron(model.mu[None, :], eye)  # B_mu @ vec(A) == A @ mu
    B_one = np.kron(eye, np.ones((1, n)))  # B_one @ vec(A) == A.T @ 1
    B_zero = np.eye(n * n)[np.flatnonzero(vec(no_edge_indicator(graph)))]
    B = np.vstack([B_mu, B_one, B_zero])
    c = np.concatenate([model.mu, np.ones(n), np.zeros(m)])
    return VectorizedQP(Q, B, c, n, m)


def solve_kkt(qp: VectorizedQP) -> KktSolution:
    """Solve ``[[Q, B^T], [B, 0]] [x; nu] = [0; c]``.

    The rows of ``B`` always carry one linear dependency: the fairness rows
    and the column-sum rows weighted by ``mu`` both sum to ``mu^T kron 1^T``.
    The last column-sum row is therefore dropped (its multiplier fixed at
    zero) before factorizing; it is implied by the others because every mean
    is positive. Any further singularity is reported as rank deficiency.
    """
    n, N = qp.n, qp.n * qp.n
    drop = 2 * n - 1
    keep = np.delete(np.arange(qp.B.shape[0]), drop)
    B = qp.B[keep]
    r = B.shape[0]
    kkt = np.zeros((N + r, N + r))
    kkt[:N, :N] = qp.Q
    kkt[:N, N:] = B.T
    kkt[N:, :N] = B
    rhs = np.concatenate([np.zeros(N), qp.c[keep]])

    anorm = np.linalg.norm(kkt, 1)
    with warnings.catch_warnings():
        # exact singularity is reported through rcond below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(kkt, check_finite=False)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond >= RCOND_MIN:
        raise RankDeficiencyError(
            f"KKT matrix is singular (rcond ~ {rcond:.3g}); constraints are degenerate"
        )
    sol = sla.lu_solve((lu, piv), rhs, check_finite=False)
    x = sol[:N]
    nu = np.insert(sol[N:], drop, 0.0)
    stationarity = float(np.max(np.abs(qp.Q @ x + qp.B.T @ nu)))
    primal = float(np.max(np.abs(qp.B @ x - qp.c)))
    return KktSolution(x, nu, max(stationarity, primal), stationarity, primal, qp, drop)


def extract_sharing(sol: KktSolution, n: int, graph: Graph) -> SolveReport:
    """Turn a KKT solution back into a sharing matrix plus its multipliers.

    The multiplier vector splits as ``(-beta, -lambda, gamma)``; the trailing
    block is reported against ``off_edge_pairs(graph)``.
    """
    A = unvec(sol.x_star, n).copy()
    residue = snap_structural_zeros(A, no_edge_indicator(graph))
    pairs = off_edge_pairs(graph)
    gamma = sol.nu_star[2 * n :]
    diagnostics = {
        "kkt_residual": sol.residual,
        "stationarity": sol.stationarity,
        "primal": sol.primal,
        "beta": (-sol.nu_star[:n]).tolist(),
        "lambda": (-sol.nu_star[n : 2 * n]).tolist(),
        "dropped_row": sol.dropped_row,
        "snapped_residue": residue,
    }
    obj = 0.5 * float(sol.x_star @ sol.qp.Q @ sol.x_star)
    return SolveReport(
        SharingMatrix(A, "kkt"),
        obj,
        [(i, j, float(g)) for (i, j), g in zip(pairs, gamma)],
        diagnostics,
    )


def solve_oracle(model: LossModel, graph: Graph) -> SolveReport:
    return extract_sharing(solve_kkt(build_qp(model, graph)), graph.n, graph)
