"""Monte Carlo check of a sharing rule against sampled losses.

Only the first two moments enter any result in this package, so losses are
drawn as Gaussians matched to ``(mu, sigma)`` through the Cholesky factor.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidSizeError
from .loss_model import LossModel, apply_rule, objective

DISTRIBUTIONS = ("gaussian",)


@dataclass(frozen=True)
class SimConfig:
    samples: int = 100_000
    seed: int = 0
    distribution: str = "gaussian"

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise InvalidSizeError(f"samples must be a positive integer, got {self.samples!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unsupported distribution {self.distribution!r}")


@dataclass(frozen=True)
class SimReport:
    samples: int
    seed: int
    fairness_error: float
    allocation_error: float
    variance_sum: float
    predicted: float

    def to_json(self) -> dict:
        return asdict(self)


def _generator(seed: int) -> np.random.Generator:
    # PCG64 output is specified bit-for-bit, so a seed reproduces across platforms
    return np.random.Generator(np.random.PCG64(seed))


def sample_losses(model: LossModel, config: SimConfig) -> np.ndarray:
    """``samples x n`` matrix of draws with mean ``mu`` and covariance ``sigma``."""
    z = _generator(config.seed).standard_normal((config.samples, model.n))
    return model.mu + z @ model.chol_lower.T


def simulate_rule(A, model: LossModel, config: SimConfig) -> SimReport:
    A = np.asarray(getattr(A, "A", A), dtype=float)
    if A.shape != (model.n, model.n):
        raise DimensionMismatchError(f"rule is {A.shape} but model has {model.n} agents")
    X = sample_losses(model, config)
    H = apply_rule(A, X)
    alloc = float(np.max(np.abs(H.sum(axis=1) - X.sum(axis=1))))
    fair = float(np.max(np.abs(H.mean(axis=0) - model.mu)))
    ddof = 1 if config.samples > 1 else 0
    var_sum = 0.5 * float(np.sum(H.var(axis=0, ddof=ddof)))
    return SimReport(
        samples=config.samples,
        seed=config.seed,
        fairness_error=fair,
        allocation_error=alloc,
        variance_sum=var_sum,
        predicted=objective(A, model.sigma),
    )
