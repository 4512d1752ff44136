"""Result containers shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FeasibilityError, InconsistencyError

CONSTRAINT_CLASSES = ("friends", "equal_share", "complete", "kkt")

FEASIBILITY_TOL = 1e-9
STRUCTURAL_ZERO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SharingMatrix:
    """Allocation matrix ``A``: agent ``i`` bears ``A[i, j]`` of agent ``j``'s loss."""

    A: np.ndarray
    constraint_class: str

    def __post_init__(self):
        if self.constraint_class not in CONSTRAINT_CLASSES:
            raise ValueError(f"unknown constraint class {self.constraint_class!r}")

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class SolveReport:
    sharing: SharingMatrix
    objective: float
    gamma_pairs: list[tuple[int, int, float]] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def A(self) -> np.ndarray:
        return self.sharing.A


def feasibility_residuals(A: np.ndarray, mu: np.ndarray, Z: np.ndarray | None = None) -> dict:
    """Infinity-norm violations of full allocation, fairness and the friends pattern.

    The fairness residual is relative to ``max |mu|``.
    """
    res = {
        "column_sum": float(np.max(np.abs(A.sum(axis=0) - 1.0))),
        "fairness": float(np.max(np.abs(A @ mu - mu)) / np.max(np.abs(mu))),
    }
    if Z is not None:
        res["structural"] = float(np.max(np.abs(A[Z > 0]), initial=0.0))
    return res


def check_feasible(residuals: dict, tol: float = FEASIBILITY_TOL) -> None:
    bad = {k: v for k, v in residuals.items() if v > tol}
    if bad:
        raise FeasibilityError(f"solution violates constraints beyond {tol:g}: {bad}")


def snap_structural_zeros(A: np.ndarray, Z: np.ndarray, tol: float = STRUCTURAL_ZERO_TOL) -> float:
    """Set off-edge entries of ``A`` to exact zero in place.

    Returns the largest residue removed. Residue above ``tol`` means the
    solution does not actually respect the network, which is an internal
    error rather than roundoff.
    """
    mask = Z > 0
    residue = float(np.max(np.abs(A[mask]), initial=0.0))
    if residue > tol:
        i, j = np.unravel_index(np.argmax(np.abs(A) * mask), A.shape)
        raise InconsistencyError(
            f"entry ({i + 1},{j + 1}) between non-friends is {A[i, j]:.3g}, expected 0"
        )
    A[mask] = 0.0
    return residue
