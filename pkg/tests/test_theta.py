import itertools
import math

import numpy as np
import pytest

from sdpkit.impl import DegenerateInput, DomainError, UnsupportedSize
from sdpkit.sdpmodel import BlockMatrix
from sdpkit.sdpsolve import SolveStatus, phase1, solve, solve_dual
from sdpkit.theta import (
    Graph,
    ThetaReport,
    alpha_bruteforce,
    build_theta_dual,
    build_theta_primal,
    build_theta_prime,
    clique_cover_bruteforce,
    fractional_chromatic,
    lambda_formulation_values,
    orthonormal_representation,
    psi_r,
    stable_set_witness,
    theta_leaning,
    theta_report,
)

SQRT5 = math.sqrt(5.0)

GRAPH_FIXTURES = (
    [Graph.complete(n) for n in range(2, 6)]
    + [Graph.cycle(5), Graph.cycle(7), Graph.petersen()]
)


def solved_primal(G):
    p = build_theta_primal(G)
    report = solve(p)
    assert report.status is SolveStatus.OPTIMAL
    return p, report


def solved_dual(d):
    report = solve_dual(d)
    assert report.status is SolveStatus.OPTIMAL
    return report


def test_graph_validation():
    with pytest.raises(DomainError):
        Graph(0)
    with pytest.raises(DomainError):
        Graph(3, [(1, 1)])
    with pytest.raises(DomainError):
        Graph(3, [(1, 4)])
    with pytest.raises(DomainError):
        Graph(3, [(1, 2), (2, 1)])


def test_graph_constructors():
    c5 = Graph.cycle(5)
    assert c5.n == 5 and len(c5.edges) == 5
    assert c5.has_edge(1, 5) and c5.has_edge(2, 1) and not c5.has_edge(1, 3)
    assert len(c5.complement().edges) == 5
    assert c5.complement().complement() == c5
    assert len(Graph.complete(4).edges) == 6
    assert not Graph.empty(4).edges
    petersen = Graph.petersen()
    assert petersen.n == 10 and len(petersen.edges) == 15
    assert Graph.random(8, 0.4, seed=3) == Graph.random(8, 0.4, seed=3)


def test_graph_adjacency_and_networkx():
    c5 = Graph.cycle(5)
    A = c5.adjacency()
    assert np.array_equal(A, A.T)
    assert np.all(A.sum(axis=1) == 2)
    g = c5.to_networkx()
    assert sorted(g.nodes) == [1, 2, 3, 4, 5]
    assert Graph.from_networkx(g) == c5


def test_theta_primal_layout():
    p = build_theta_primal(Graph.cycle(5))
    assert p.n == 1 + 5
    # t = n makes the slack n I - J + pattern positive semidefinite
    x = np.zeros(p.n)
    x[0] = 5.0
    assert p.is_feasible(x)
    assert p.objective(x) == 5.0


@pytest.mark.functional
@pytest.mark.parametrize("n", [1, 3, 5])
def test_theta_complete_is_one(n):
    _, report = solved_primal(Graph.complete(n))
    assert report.pobj == pytest.approx(1.0, abs=1e-4)


@pytest.mark.functional
@pytest.mark.parametrize("n", [2, 4])
def test_theta_empty_is_order(n):
    _, report = solved_primal(Graph.empty(n))
    assert report.pobj == pytest.approx(n, abs=1e-4)


@pytest.mark.functional
def test_theta_c5_all_convex_forms():
    G = Graph.cycle(5)
    _, primal = solved_primal(G)
    dual = solved_dual(build_theta_dual(G))
    prime = solved_dual(build_theta_prime(G))
    assert primal.pobj == pytest.approx(SQRT5, abs=1e-4)
    assert dual.dobj == pytest.approx(SQRT5, abs=1e-4)
    assert prime.dobj == pytest.approx(SQRT5, abs=1e-4)
    assert abs(primal.pobj - dual.dobj) <= 2e-4


@pytest.mark.functional
def test_theta_petersen_forms_agree():
    G = Graph.petersen()
    _, primal = solved_primal(G)
    prime = solved_dual(build_theta_prime(G))
    assert primal.pobj == pytest.approx(4.0, abs=1e-3)
    assert prime.dobj == pytest.approx(4.0, abs=1e-3)
    assert alpha_bruteforce(G) == 4


@pytest.mark.functional
def test_theta_prime_small_cases():
    single = solved_dual(build_theta_prime(Graph(1)))
    assert single.dobj == pytest.approx(1.0, abs=1e-4)
    empty = solved_dual(build_theta_prime(Graph.empty(3)))
    assert empty.dobj == pytest.approx(3.0, abs=1e-4)


def test_theta_prime_rank_one_point():
    G = Graph.empty(3)
    d = build_theta_prime(G)
    y = np.ones(4)
    Y = BlockMatrix([np.outer(y, y)])
    assert d.is_feasible(Y)
    assert d.objective(Y) == pytest.approx(3.0)


def test_stable_set_witness():
    G = Graph.cycle(5)
    d = build_theta_dual(G)
    Y = stable_set_witness(G, [1, 3])
    assert d.is_feasible(Y)
    assert d.objective(Y) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        stable_set_witness(G, [1, 2])
    with pytest.raises(DomainError):
        stable_set_witness(G, [])


def test_theta_dual_scaled_identity():
    for G in (Graph.cycle(5), Graph.petersen(), Graph.complete(3)):
        d = build_theta_dual(G)
        Y = BlockMatrix([np.eye(G.n) / G.n])
        assert d.is_feasible(Y)
        assert d.objective(Y) == pytest.approx(1.0)


def test_lambda_values_clique_convention():
    lambda_max, ratio = lambda_formulation_values(Graph.complete(3), np.eye(3) / 3.0)
    assert lambda_max == pytest.approx(1.0)
    assert ratio == pytest.approx(1.0)


def test_lambda_values_empty_graph():
    lambda_max, ratio = lambda_formulation_values(Graph.empty(3), np.ones((3, 3)) / 3.0)
    assert lambda_max == pytest.approx(3.0)
    assert ratio == pytest.approx(3.0)


def test_lambda_values_zero_diagonal_row():
    Y = np.zeros((3, 3))
    Y[:2, :2] = 0.5
    lambda_max, ratio = lambda_formulation_values(Graph.empty(3), Y)
    assert lambda_max == pytest.approx(2.0)
    assert ratio == pytest.approx(2.0)
    with pytest.raises(DegenerateInput):
        lambda_formulation_values(Graph.empty(3), np.zeros((2, 2)))


@pytest.mark.functional
def test_lambda_values_c5():
    G = Graph.cycle(5)
    dual = solved_dual(build_theta_dual(G))
    lambda_max, ratio = lambda_formulation_values(G, dual.Y)
    assert lambda_max == pytest.approx(SQRT5, abs=1e-3)
    assert ratio == pytest.approx(SQRT5, abs=1e-3)


def test_orthonormal_representation_empty_pair():
    U, value = orthonormal_representation(Graph.empty(2), np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert value == pytest.approx(2.0)
    assert np.allclose(np.abs(U[:, 0]), 1.0 / math.sqrt(2.0))
    assert abs(U[0] @ U[1]) <= 1e-9
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0)


def test_orthonormal_representation_clique():
    U, value = orthonormal_representation(Graph.complete(4), np.zeros((4, 4)))
    assert value == pytest.approx(1.0)
    assert U.shape == (4, 1)
    assert np.allclose(U, 1.0)


@pytest.mark.functional
def test_orthonormal_representation_c5():
    G = Graph.cycle(5)
    p, report = solved_primal(G)
    U, value = orthonormal_representation(G, p.slack(report.x))
    assert value == pytest.approx(SQRT5, abs=1e-3)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-6)
    for i, j in G.non_edges():
        assert abs(U[i - 1] @ U[j - 1]) <= 1e-6


@pytest.mark.functional
def test_theta_leaning_c5():
    G = Graph.cycle(5)
    prime = solved_dual(build_theta_prime(G))
    U, leaning = theta_leaning(G, prime.Y)
    assert leaning == pytest.approx(SQRT5, abs=1e-3)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-6)
    for i, j in G.edges:
        assert abs(U[i - 1] @ U[j - 1]) <= 1e-6


def test_theta_leaning_vanishing_vector():
    # vertex 2 carries no weight and gets its own coordinate
    Y = np.zeros((3, 3))
    Y[0, 0] = Y[0, 1] = Y[1, 0] = Y[1, 1] = 1.0
    U, leaning = theta_leaning(Graph(2, [(1, 2)]), Y)
    assert leaning == pytest.approx(1.0)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0)
    assert abs(U[0] @ U[1]) <= 1e-9


@pytest.mark.functional
def test_psi_first_level_is_theta():
    assert psi_r(Graph.cycle(5), 1) == pytest.approx(SQRT5, abs=1e-3)
    assert psi_r(Graph.complete(4), 1) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.functional
def test_psi_second_level_c5():
    G = Graph.cycle(5)
    psi1 = psi_r(G, 1)
    psi2 = psi_r(G, 2)
    chi_star = fractional_chromatic(G.complement())
    assert chi_star == pytest.approx(2.5, abs=1e-4)
    assert psi2 >= psi1 - 1e-5
    assert SQRT5 - 1e-4 <= psi2 <= chi_star + 1e-4


@pytest.mark.functional
def test_psi_second_level_clique():
    assert psi_r(Graph.complete(4), 2) == pytest.approx(1.0, abs=1e-4)


def test_psi_limits():
    with pytest.raises(DomainError):
        psi_r(Graph.cycle(5), 0)
    with pytest.raises(UnsupportedSize):
        psi_r(Graph.cycle(5), 3)
    with pytest.raises(UnsupportedSize):
        psi_r(Graph.cycle(11), 2)


@pytest.mark.functional
@pytest.mark.parametrize("graph, expected", [
    (Graph.cycle(5), 2.5),
    (Graph.complete(4), 4.0),
    (Graph.cycle(4), 2.0),
    (Graph.empty(3), 1.0),
])
def test_fractional_chromatic(graph, expected):
    assert fractional_chromatic(graph) == pytest.approx(expected, abs=1e-4)


def test_fractional_chromatic_limit():
    with pytest.raises(UnsupportedSize):
        fractional_chromatic(Graph.cycle(13))


@pytest.mark.parametrize("graph, alpha, cover", [
    (Graph.cycle(5), 2, 3),
    (Graph.complete(5), 1, 1),
    (Graph.empty(4), 4, 4),
    (Graph.petersen(), 4, 5),
    (Graph.cycle(7), 3, 4),
])
def test_bruteforce_oracles(graph, alpha, cover):
    assert alpha_bruteforce(graph) == alpha
    assert clique_cover_bruteforce(graph) == cover


def test_bruteforce_against_subsets():
    G = Graph.random(9, 0.4, seed=11)
    best = max(len(s) for k in range(1, G.n + 1)
               for s in itertools.combinations(G.vertices, k) if G.is_stable(s))
    assert alpha_bruteforce(G) == best


def test_bruteforce_limits():
    with pytest.raises(UnsupportedSize):
        alpha_bruteforce(Graph.cycle(21))
    with pytest.raises(UnsupportedSize):
        clique_cover_bruteforce(Graph.cycle(13))


@pytest.mark.functional
def test_phase1_on_theta_primal():
    x0, margin = phase1(build_theta_primal(Graph.cycle(5)))
    assert margin < 0
    assert build_theta_primal(Graph.cycle(5)).slack(x0).min_eigenvalue() > 0


@pytest.mark.functional
def test_theta_report_c5():
    report = theta_report(Graph.cycle(5))
    assert isinstance(report, ThetaReport)
    assert report.theta == pytest.approx(SQRT5, abs=1e-3)
    assert report.alpha == 2 and report.clique_cover == 3
    assert report.chi_star == pytest.approx(2.5, abs=1e-4)
    assert report.sandwich_holds
    data = report.json()
    assert set(data) == {"n", "m", "theta", "theta_primal", "theta_dual", "theta_prime", "theta_lambda_max",
                         "theta_lambda_ratio", "theta_orthonormal", "theta_leaning", "alpha", "clique_cover",
                         "chi_star"}


def _check_coherence(G):
    report = theta_report(G)
    values = [report[key] for key in ("theta_primal", "theta_dual", "theta_prime", "theta_lambda_max",
                                      "theta_lambda_ratio", "theta_orthonormal", "theta_leaning")]
    assert max(values) - min(values) <= 5e-3
    assert report.alpha <= report.theta + 1e-3
    assert report.theta <= report.chi_star + 1e-4
    assert report.chi_star <= report.clique_cover + 1e-4


@pytest.mark.functional
@pytest.mark.parametrize("graph", GRAPH_FIXTURES, ids=repr)
def test_theta_coherence_fixtures(graph):
    _check_coherence(graph)


@pytest.mark.slow
@pytest.mark.functional
@pytest.mark.parametrize("seed", range(20))
def test_theta_coherence_random(seed):
    _check_coherence(Graph.random(8, 0.4, seed=seed))
