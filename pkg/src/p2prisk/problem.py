"""Problem and result documents, and the glue that runs a solver on a problem.

Problem files are JSON objects ``{"mu": [...], "sigma": [[...]], "graph": {...}}``.
Numbers may be JSON numbers or strings holding exact fractions such as
``"1/3"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .equal_share import c_hat, solve_equal_share
from .errors import InapplicableCriterionError, ValidationError
from .friends import feng_complete, solve_friends
from .graph import Graph, graph_from_json, graph_to_json, no_edge_indicator
from .kkt import solve_oracle
from .loss_model import LossModel, validate
from .nonneg import (
    NonnegVerdict,
    check_complete_general,
    check_complete_scaled_identity,
    check_covariance_threshold,
    check_entrywise,
    check_equal_share,
    check_two_agent,
)
from .sharing import FEASIBILITY_TOL, feasibility_residuals

SOLVERS = ("friends", "equal-share", "complete", "oracle")
CRITERIA = (
    "scaled-identity",
    "complete-general",
    "equal-share",
    "covariance-threshold",
    "two-agent",
    "entrywise",
)
_CLASS_OF_SOLVER = {
    "friends": "friends",
    "equal-share": "equal_share",
    "complete": "complete",
    "oracle": "kkt",
}


def parse_number(value) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ValidationError(f"expected a number or fraction string, got {value!r}")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    model: LossModel
    graph: Graph
    name: str = ""

    @classmethod
    def from_json(cls, doc: dict, name: str = "") -> "ProblemSpec":
        if not isinstance(doc, dict):
            raise ValidationError("problem document must be a JSON object")
        for key in ("mu", "sigma", "graph"):
            if key not in doc:
                raise ValidationError(f"problem document is missing {key!r}")
        if not isinstance(doc["mu"], list) or not isinstance(doc["sigma"], list):
            raise ValidationError("'mu' must be a list and 'sigma' a list of rows")
        mu = [parse_number(v) for v in doc["mu"]]
        rows = doc["sigma"]
        if not all(isinstance(r, list) for r in rows):
            raise ValidationError("'sigma' must be a list of rows")
        if len({len(r) for r in rows}) > 1:
            raise ValidationError("'sigma' rows have different lengths")
        sigma = [[parse_number(v) for v in r] for r in rows]
        model = validate(mu, sigma)
        graph = graph_from_json(doc["graph"])
        if graph.n != model.n:
            raise ValidationError(f"graph has {graph.n} vertices but mu has {model.n} entries")
        return cls(model, graph, doc.get("name", name))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mu": self.model.mu.tolist(),
            "sigma": self.model.sigma.tolist(),
            "graph": graph_to_json(self.graph),
        }


def load_spec(path) -> ProblemSpec:
    """Read a problem file. ``OSError`` and ``json.JSONDecodeError`` propagate."""
    path = Path(path)
    doc = json.loads(path.read_text())
    return ProblemSpec.from_json(doc, name=path.stem)


@dataclass
class ResultDoc:
    solver: str
    A: np.ndarray
    objective: float
    gamma: list | None = None
    c_hat: float | None = None
    nonneg: list[dict] = field(default_factory=list)
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "solver": self.solver,
            "A": np.asarray(self.A).tolist(),
            "objective": self.objective,
            "gamma": [[i, j, g] for i, j, g in self.gamma] if self.gamma is not None else None,
            "c_hat": self.c_hat,
            "nonneg": self.nonneg,
            "residuals": self.residuals,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ResultDoc":
        gamma = doc.get("gamma")
        return cls(
            solver=doc["solver"],
            A=np.array(doc["A"], dtype=float),
            objective=float(doc["objective"]),
            gamma=[(int(i), int(j), float(g)) for i, j, g in gamma] if gamma is not None else None,
            c_hat=doc.get("c_hat"),
            nonneg=list(doc.get("nonneg", [])),
            residuals=dict(doc.get("residuals", {})),
        )


def dumps(doc: dict) -> str:
    """Deterministic JSON: fixed key order, shortest round-trip floats."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _is_scaled_identity(sigma: np.ndarray) -> bool:
    c = sigma[0, 0]
    return bool(np.all(sigma == c * np.eye(sigma.shape[0])))


def run_solver(spec: ProblemSpec, solver: str):
    """Return the solver's report object for ``spec``."""
    if solver == "friends":
        return solve_friends(spec.model, spec.graph)
    if solver == "equal-share":
        return solve_equal_share(spec.model, spec.graph)
    if solver == "complete":
        if not spec.graph.is_complete():
            raise ValidationError("solver 'complete' needs a complete graph; use 'friends'")
        return feng_complete(spec.model)
    if solver == "oracle":
        return solve_oracle(spec.model, spec.graph)
    raise ValidationError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")


def applicable_criteria(spec: ProblemSpec) -> list[str]:
    names = []
    if spec.graph.is_complete():
        if _is_scaled_identity(spec.model.sigma):
            names.append("scaled-identity")
        names.append("complete-general")
    names += ["equal-share", "covariance-threshold"]
    if spec.model.n == 2:
        names.append("two-agent")
    names.append("entrywise")
    return names


def run_criterion(spec: ProblemSpec, name: str, solver: str = "friends") -> NonnegVerdict:
    if name not in CRITERIA:
        raise InapplicableCriterionError(f"unknown criterion {name!r}; choose from {', '.join(CRITERIA)}")
    if name not in applicable_criteria(spec):
        raise InapplicableCriterionError(f"criterion {name!r} does not apply to this problem")
    m, g = spec.model, spec.graph
    if name == "scaled-identity":
        return check_complete_scaled_identity(m.mu)
    if name == "complete-general":
        return check_complete_general(m)
    if name == "equal-share":
        return check_equal_share(c_hat(m, g), m.mu, g.degrees, g)
    if name == "covariance-threshold":
        return check_covariance_threshold(m, g)
    if name == "two-agent":
        return check_two_agent(m)
    return check_entrywise(run_solver(spec, solver).A)


def _default_criteria(spec: ProblemSpec, solver: str) -> list[str]:
    names = ["entrywise"]
    if solver == "complete" or (solver in ("friends", "oracle") and spec.graph.is_complete()):
        names = [c for c in applicable_criteria(spec) if c in ("scaled-identity", "complete-general")] + names
    if solver == "equal-share":
        names = [c for c in applicable_criteria(spec) if c in ("equal-share", "covariance-threshold", "two-agent")] + names
    return names


def solve_to_result(spec: ProblemSpec, solver: str, tolerance: float = FEASIBILITY_TOL) -> ResultDoc:
    report = run_solver(spec, solver)
    A = report.A
    verdicts = []
    for name in _default_criteria(spec, solver):
        v = check_entrywise(A) if name == "entrywise" else run_criterion(spec, name, solver)
        verdicts.append(v.to_json())
    Z = None if solver == "complete" else no_edge_indicator(spec.graph)
    res = feasibility_residuals(A, spec.model.mu, Z)
    residuals = dict(res)
    diag = getattr(report, "diagnostics", {}) or {}
    for key in ("residual", "rcond", "condition", "kkt_residual", "method"):
        if key in diag and diag[key] is not None:
            residuals[key] = diag[key]
    residuals["tolerance"] = tolerance
    residuals["feasible"] = all(v <= tolerance for v in res.values())
    gamma = getattr(report, "gamma_pairs", None)
    return ResultDoc(
        solver=solver,
        A=A,
        objective=float(report.objective),
        gamma=list(gamma) if gamma is not None else None,
        c_hat=float(report.c_hat) if hasattr(report, "c_hat") else None,
        nonneg=verdicts,
        residuals=residuals,
    )


def validate_result(doc: ResultDoc, spec: ProblemSpec, tol: float = FEASIBILITY_TOL) -> dict:
    """Re-check a loaded result against the feasibility rules of its solver.

    Returns the residuals; raises :class:`ValidationError` on violation.
    """
    A = np.asarray(doc.A, dtype=float)
    if A.shape != (spec.model.n, spec.model.n):
        raise ValidationError(f"result matrix is {A.shape}, problem has {spec.model.n} agents")
    klass = _CLASS_OF_SOLVER.get(doc.solver)
    if klass is None:
        raise ValidationError(f"unknown solver tag {doc.solver!r}")
    Z = None if klass == "complete" else no_edge_indicator(spec.graph)
    res = feasibility_residuals(A, spec.model.mu, Z)
    if Z is not None and res["structural"] != 0.0:
        raise ValidationError("result has nonzero allocations between non-friends")
    if klass == "equal_share":
        # every friend entry times the column mean must be the same constant c_hat
        mu = spec.model.mu
        scaled = [A[i - 1, j - 1] * mu[j - 1] for a, b in spec.graph.edges for i, j in ((a, b), (b, a))]
        res["equal_share"] = float(np.ptp(scaled)) / max(1.0, float(np.max(np.abs(scaled))))
    bad = {k: v for k, v in res.items() if k != "structural" and v > tol}
    if bad:
        raise ValidationError(f"result violates feasibility beyond {tol:g}: {bad}")
    return res
