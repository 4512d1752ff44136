import numpy as np
import pytest
from hypothesis import given, settings

from p2prisk import (
    assemble_gamma_system,
    feng_complete,
    from_edges,
    make_complete,
    make_path,
    no_edge_indicator,
    objective,
    solve_friends,
    solve_gamma,
    validate,
)
from p2prisk.errors import DimensionMismatchError, NotConnectedError, SingularSystemError
from p2prisk.problem import load_spec
from p2prisk.sharing import feasibility_residuals

from helpers import FIXTURES, K4_MINUS_24, feasible_direction, frac_matrix, instances


def _spec(name):
    return load_spec(FIXTURES / f"{name}.json")


K4_MINUS_IID = frac_matrix(
    [["1/5", "3/10", "1/5", "3/10"], ["3/10", "2/5", "3/10", 0], ["1/5", "3/10", "1/5", "3/10"], ["3/10", 0, "3/10", "2/5"]]
)
K4_MINUS_POS = frac_matrix(
    [["1/7", "5/14", "1/7", "5/14"], ["5/14", "2/7", "5/14", 0], ["1/7", "5/14", "1/7", "5/14"], ["5/14", 0, "5/14", "2/7"]]
)
K4_MINUS_NEG = frac_matrix(
    [["5/23", "13/46", "5/23", "13/46"], ["13/46", "10/23", "13/46", 0], ["5/23", "13/46", "5/23", "13/46"], ["13/46", 0, "13/46", "10/23"]]
)
K3_SPREAD = frac_matrix(
    [["85/273", "67/273", "-5/273"], ["88/273", "79/273", "43/273"], ["100/273", "127/273", "235/273"]]
)
PATH3_SPREAD = frac_matrix([["18/38", "5/38", 0], ["20/38", "13/38", "5/38"], [0, "20/38", "33/38"]])


@pytest.mark.parametrize(
    "name, expected, obj",
    [
        ("k4_iid", np.full((4, 4), 0.25), 1 / 2),
        ("k4_minus_edge_iid", K4_MINUS_IID, 3 / 5),
        ("k4_minus_edge_poscorr", K4_MINUS_POS, 19 / 21),
        ("k4_minus_edge_negcorr", K4_MINUS_NEG, 19 / 69),
        ("k3_spread_means", K3_SPREAD, 19 / 26),
        ("path3_spread_means", PATH3_SPREAD, 16 / 19),
    ],
)
def test_worked_examples(name, expected, obj):
    spec = _spec(name)
    rep = solve_friends(spec.model, spec.graph)
    np.testing.assert_allclose(rep.A, expected, atol=1e-12)
    assert rep.objective == pytest.approx(obj, abs=1e-12)


def test_structural_zeros_are_exact():
    spec = _spec("k4_minus_edge_poscorr")
    A = solve_friends(spec.model, spec.graph).A
    assert A[1, 3] == 0.0 and A[3, 1] == 0.0


def test_gamma_pairs_follow_off_edge_order():
    spec = _spec("k4_minus_edge_iid")
    rep = solve_friends(spec.model, spec.graph)
    assert [(i, j) for i, j, _ in rep.gamma_pairs] == [(4, 2), (2, 4)]
    K, rhs = assemble_gamma_system(spec.model, spec.graph)
    assert K.shape == (2, 2) and rhs.shape == (2,)


def test_gamma_system_matches_explicit_kron():
    spec = _spec("k4_minus_edge_negcorr")
    from p2prisk.friends import gamma_operators

    E, F, G = gamma_operators(spec.model)
    full = np.kron(F.T, E)
    idx = [7, 13]  # 0-based vec positions of (4,2) and (2,4)
    K, rhs = assemble_gamma_system(spec.model, spec.graph)
    np.testing.assert_allclose(K, full[np.ix_(idx, idx)], atol=1e-15)
    np.testing.assert_allclose(rhs, G.reshape(-1, order="F")[idx], atol=1e-15)


def test_solve_gamma_singular():
    with pytest.raises(SingularSystemError) as info:
        solve_gamma(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 2.0]))
    assert info.value.rcond is not None and info.value.rcond < 1e-13


def test_solve_gamma_shape_checks():
    with pytest.raises(DimensionMismatchError):
        solve_gamma(np.eye(2), np.ones(3))
    g, diag = solve_gamma(np.zeros((0, 0)), np.zeros(0))
    assert g.size == 0 and diag["method"] == "none"


def test_disconnected_and_mismatch():
    m = validate(np.ones(4), np.eye(4))
    with pytest.raises(NotConnectedError):
        solve_friends(m, from_edges(4, [(1, 2), (3, 4)]))
    with pytest.raises(DimensionMismatchError):
        solve_friends(m, make_path(3))


def test_iterative_path_matches_dense():
    spec = _spec("barbell6_spread_means")
    dense = solve_friends(spec.model, spec.graph)
    it = solve_friends(spec.model, spec.graph, dense_limit=0)
    assert it.diagnostics["method"] == "gmres"
    np.testing.assert_allclose(it.A, dense.A, atol=1e-9)
    np.testing.assert_allclose(
        [g for *_, g in it.gamma_pairs], [g for *_, g in dense.gamma_pairs], rtol=1e-7, atol=1e-9
    )


@settings(max_examples=80, deadline=None)
@given(instances())
def test_feasibility(inst):
    model, graph = inst
    A = solve_friends(model, graph).A
    res = feasibility_residuals(A, model.mu, no_edge_indicator(graph))
    assert max(res.values()) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(instances())
def test_complete_graph_reduces_to_closed_form(inst):
    model, _ = inst
    full = make_complete(model.n)
    np.testing.assert_allclose(
        solve_friends(model, full).A, feng_complete(model).A, atol=1e-12, rtol=0
    )


@settings(max_examples=60, deadline=None)
@given(instances(min_n=3))
def test_adding_an_edge_never_hurts(inst):
    model, graph = inst
    n = model.n
    missing = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if not graph.has_edge(i, j)]
    if not missing:
        return
    bigger = from_edges(n, list(graph.edges) + [missing[0]])
    f_small = solve_friends(model, graph).objective
    f_big = solve_friends(model, bigger).objective
    assert f_big <= f_small + 1e-10 * max(1.0, f_small)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_local_optimality(inst):
    model, graph = inst
    rep = solve_friends(model, graph)
    rng = np.random.default_rng(len(graph.edges) * 7919 + model.n)
    P = feasible_direction(rng, model.n, model.mu, no_edge_indicator(graph))
    for t in (1e-3, -1e-3, 0.5):
        assert objective(rep.A + t * P, model.sigma) >= rep.objective - 1e-10 * max(1.0, rep.objective)
