"""Instance generators and small independent oracles shared by the tests."""

from fractions import Fraction
from pathlib import Path
from itertools import combinations

import numpy as np
from hypothesis import strategies as st

from p2prisk import from_edges, validate

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "p2prisk" / "fixtures"

K4_MINUS_24 = [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]
SIGMA_POS = np.array(
    [[1, 1 / 3, 0, 1 / 3], [1 / 3, 1, 1 / 3, 0], [0, 1 / 3, 1, 1 / 3], [1 / 3, 0, 1 / 3, 1]]
)
SIGMA_NEG = 2 * np.eye(4) - SIGMA_POS


def frac_matrix(rows):
    return np.array([[float(Fraction(v)) for v in row] for row in rows])


def random_connected_graph(rng, n, p=None):
    """Random spanning tree plus each remaining pair with probability ``p``."""
    p = rng.uniform(0.0, 1.0) if p is None else p
    order = rng.permutation(n) + 1
    edges = {tuple(sorted((int(order[k]), int(order[rng.integers(0, k)])))) for k in range(1, n)}
    for e in combinations(range(1, n + 1), 2):
        if rng.random() < p:
            edges.add(e)
    return from_edges(n, edges)


def random_pd(rng, n):
    F = rng.normal(size=(n, n))
    return F @ F.T + rng.uniform(0.05, 1.0) * np.eye(n)


def random_instance(rng, n=None):
    n = int(rng.integers(2, 7)) if n is None else n
    model = validate(rng.uniform(0.1, 10.0, n), random_pd(rng, n))
    return model, random_connected_graph(rng, n)


@st.composite
def instances(draw, min_n=2, max_n=6):
    """Hypothesis strategy yielding ``(LossModel, connected Graph)``."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return random_instance(np.random.default_rng(seed), n)


def exact_equal_share(mu, sigma, L):
    """``(c_hat, objective)`` for the equal-share rule in exact rationals.

    Independent of the floating-point path: forms ``A(c) = I - c L M^{-1}``
    symbolically as ``I - c K`` and minimizes the quadratic in ``c`` by hand.
    """
    n = len(mu)
    mu = [Fraction(v) for v in mu]
    S = [[Fraction(v) for v in row] for row in sigma]
    K = [[Fraction(int(L[i][j])) / mu[j] for j in range(n)] for i in range(n)]

    def mat(X, Y):
        return [[sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    def tr(X):
        return sum(X[i][i] for i in range(n))

    KT = [list(r) for r in zip(*K)]
    t1 = tr(mat(K, S))
    t2 = tr(mat(mat(K, S), KT))
    c = t1 / t2
    obj = tr(S) / 2 - c * t1 + c * c * t2 / 2
    return c, obj


def feasible_direction(rng, n, mu, Z):
    """Random ``P`` with ``1^T P = 0``, ``P mu = 0`` and ``P * Z = 0`` (null-space sampling)."""
    from scipy.linalg import null_space

    rows = []
    for j in range(n):
        r = np.zeros((n, n))
        r[:, j] = 1
        rows.append(r.ravel())
    for i in range(n):
        r = np.zeros((n, n))
        r[i, :] = mu
        rows.append(r.ravel())
    for i, j in zip(*np.nonzero(Z)):
        r = np.zeros((n, n))
        r[i, j] = 1
        rows.append(r.ravel())
    N = null_space(np.array(rows))
    if N.shape[1] == 0:
        return np.zeros((n, n))
    return (N @ rng.normal(size=N.shape[1])).reshape(n, n)
