"""
Lovász theta number of a graph and the bounds it is sandwiched between.

Graphs use vertices ``1..n``. The theta number is computed by several equivalent programs: the primal and dual
matrix programs, the bordered ``(n+1) x (n+1)`` moment program, two eigenvalue characterizations and two orthonormal
representations, the last four built from solved convex programs. ``psi_r`` gives the moment hierarchy
``theta = psi^1 <= psi^2 <= ... <= chi*`` for the first two levels.
"""
import itertools
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from sdpkit.impl import Base, DegenerateInput, DomainError, FactorizationFailure, NotPsd, NumericalTrouble, check_size
from sdpkit.schemas import SolveOptions
from sdpkit.sdpmodel import BlockMatrix, DualSdp, PrimalSdp, Sense, lp_as_sdp
from sdpkit.sdpsolve import SolveReport, solve, solve_dual
from sdpkit.symcore import GramMethod, gram_factor
from sdpkit.typedefs import Edge
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_ALPHA_ORDER = 20
MAX_COVER_ORDER = 12
MAX_CHI_STAR_ORDER = 12
MAX_PSI2_ORDER = 10
ZERO_DIAGONAL = 1e-9
GRAM_TOL = 1e-6


class Graph(object):
    """
    Simple undirected graph on vertices ``1..n``.
    """
    __slots__ = ("n", "edges")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if int(n) < 1:
            raise DomainError(f"Graph requires at least one vertex, got [{n}]")
        self.n = int(n)
        pairs = set()
        for edge in edges:
            i, j = (int(v) for v in edge)
            if i == j:
                raise DomainError(f"Loop on vertex [{i}] is not allowed")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise DomainError(f"Edge [{i}-{j}] has an endpoint outside [1..{self.n}]")
            pair = (min(i, j), max(i, j))
            if pair in pairs:
                raise DomainError(f"Duplicate edge [{pair[0]}-{pair[1]}]")
            pairs.add(pair)
        self.edges = frozenset(pairs)  # type: FrozenSet[Edge]

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def non_edges(self) -> List[Edge]:
        return [pair for pair in itertools.combinations(self.vertices, 2) if pair not in self.edges]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def is_clique(self, vertices: Iterable[int]) -> bool:
        return all(self.has_edge(i, j) for i, j in itertools.combinations(sorted(vertices), 2))

    def is_stable(self, vertices: Iterable[int]) -> bool:
        return not any(self.has_edge(i, j) for i, j in itertools.combinations(sorted(vertices), 2))

    def complement(self) -> "Graph":
        return Graph(self.n, self.non_edges())

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for i, j in self.edges:
            A[i - 1, j - 1] = A[j - 1, i - 1] = 1.0
        return A

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """
        Relabels the nodes of ``g`` to ``1..n`` following their sorted order.
        """
        labels = {node: index for index, node in enumerate(sorted(g.nodes), start=1)}
        return cls(len(labels), [(labels[u], labels[v]) for u, v in g.edges if u != v])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_networkx(nx.cycle_graph(n))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_networkx(nx.complete_graph(n))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def petersen(cls) -> "Graph":
        return cls.from_networkx(nx.petersen_graph())

    @classmethod
    def random(cls, n: int, p: float, seed: int) -> "Graph":
        return cls.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


class ThetaReport(Base):
    """
    Every computed formulation of the theta number together with the combinatorial bounds around it.
    """

    __fields__ = ("n", "m", "theta", "theta_primal", "theta_dual", "theta_prime", "theta_lambda_max",
                  "theta_lambda_ratio", "theta_orthonormal", "theta_leaning", "alpha", "clique_cover", "chi_star")

    @property
    def sandwich_holds(self) -> bool:
        values = [self[key] for key in ("theta_primal", "theta_dual", "theta_prime", "theta_lambda_max",
                                        "theta_lambda_ratio", "theta_orthonormal", "theta_leaning")]
        low = self.alpha if self.alpha is not None else -math.inf
        high = self.clique_cover if self.clique_cover is not None else math.inf
        return all(low <= value + 1e-4 <= high + 2e-4 for value in values)


def _pair_matrix(n: int, i: int, j: int, offset: int = 0) -> np.ndarray:
    """
    Symmetric unit matrix ``E_ij + E_ji`` for 1-indexed ``i, j`` shifted by ``offset`` rows.
    """
    mat = np.zeros((n, n))
    mat[i - 1 + offset, j - 1 + offset] = mat[j - 1 + offset, i - 1 + offset] = 1.0
    return mat


def build_theta_primal(G: Graph) -> PrimalSdp:
    """
    ``min t`` over a matrix with diagonal ``t - 1``, entries ``-1`` on non-edges and free entries on edges.

    Variables are ``t`` followed by one entry per edge, in sorted edge order.
    """
    n = G.n
    B = np.ones((n, n))
    A = [np.eye(n)]
    for i, j in G.sorted_edges():
        B[i - 1, j - 1] = B[j - 1, i - 1] = 0.0
        A.append(_pair_matrix(n, i, j))
    c = np.zeros(len(A))
    c[0] = 1.0
    return PrimalSdp(c, A, B)


def build_theta_dual(G: Graph) -> DualSdp:
    """
    ``max J.Y  s.t.  trace(Y) = 1``, ``Y_ij = 0`` on edges, ``Y >= 0``.
    """
    n = G.n
    A = [np.eye(n)] + [_pair_matrix(n, i, j) for i, j in G.sorted_edges()]
    c = np.zeros(len(A))
    c[0] = 1.0
    return DualSdp(np.ones((n, n)), A, c, sense=Sense.MAX)


def build_theta_prime(G: Graph) -> DualSdp:
    """
    Bordered program over ``Y`` of order ``n + 1`` indexed from 0: ``max sum_i y_0i`` with ``y_00 = 1``,
    ``y_ij = 0`` on edges and ``y_ii = y_0i``.
    """
    n = G.n
    size = n + 1
    B = np.zeros((size, size))
    B[0, 1:] = B[1:, 0] = 0.5
    first = np.zeros((size, size))
    first[0, 0] = 1.0
    A = [first]
    c = [1.0]
    for i, j in G.sorted_edges():
        A.append(_pair_matrix(size, i, j, offset=1))
        c.append(0.0)
    for i in G.vertices:
        mat = np.zeros((size, size))
        mat[i, i] = 1.0
        mat[0, i] = mat[i, 0] = -0.5
        A.append(mat)
        c.append(0.0)
    return DualSdp(B, A, c, sense=Sense.MAX)


def stable_set_witness(G: Graph, S: Iterable[int]) -> BlockMatrix:
    """
    Feasible matrix of :func:`build_theta_dual` equal to ``1/|S|`` on ``S x S``, with objective ``|S|``.
    """
    S = sorted(set(int(v) for v in S))
    if not S:
        raise DomainError("Stable set witness requires at least one vertex")
    if any(not 1 <= v <= G.n for v in S):
        raise DomainError(f"Vertices [{S}] are not all in [1..{G.n}]")
    if not G.is_stable(S):
        raise DomainError(f"Vertices [{S}] do not form a stable set")
    Y = np.zeros((G.n, G.n))
    index = np.array(S) - 1
    Y[np.ix_(index, index)] = 1.0 / len(S)
    return BlockMatrix([Y])


def _eigen_extremes(mat: np.ndarray) -> Tuple[float, float]:
    values = linalg.eigvalsh(mat)
    return float(values[0]), float(values[-1])


def lambda_formulation_values(G: Graph, Y_opt) -> Tuple[float, float]:
    """
    Maps an optimal matrix of :func:`build_theta_dual` to the two eigenvalue characterizations.

    ``Z`` scales row and column ``i`` of ``Y`` by ``1/sqrt(Y_ii)`` (an identity row where ``Y_ii`` vanishes) and
    ``X = Z - I``. Returns ``lambda_max(Z)`` and ``1 - lambda_max(X) / lambda_min(X)``, the ratio being ``1`` when
    ``X`` is zero.
    """
    Y = np.asarray(Y_opt[0] if isinstance(Y_opt, BlockMatrix) else Y_opt, dtype=float)
    n = G.n
    if Y.shape != (n, n):
        raise DegenerateInput(f"Expected a matrix of order [{n}], got shape [{Y.shape}]")
    diag = np.diag(Y)
    if np.all(diag <= ZERO_DIAGONAL):
        raise DegenerateInput("Matrix has a vanishing diagonal, cannot scale it to a unit diagonal")
    scale = np.sqrt(np.clip(diag, 0.0, None))
    alive = scale > math.sqrt(ZERO_DIAGONAL)
    Z = np.eye(n)
    index = np.flatnonzero(alive)
    Z[np.ix_(index, index)] = Y[np.ix_(index, index)] / np.outer(scale[index], scale[index])
    Z = (Z + Z.T) / 2.0
    np.fill_diagonal(Z, 1.0)
    for i, j in G.edges:
        Z[i - 1, j - 1] = Z[j - 1, i - 1] = 0.0
    _, lambda_max = _eigen_extremes(Z)
    X = Z - np.eye(n)
    low, high = _eigen_extremes(X)
    if abs(low) <= ZERO_DIAGONAL and abs(high) <= ZERO_DIAGONAL:
        ratio = 1.0
    else:
        ratio = 1.0 - high / low
    return lambda_max, ratio


def _factor(mat: np.ndarray) -> np.ndarray:
    try:
        return gram_factor(mat, GramMethod.EIGEN, tol=GRAM_TOL)
    except NotPsd as exc:
        raise FactorizationFailure(f"Cannot factor the optimal matrix: {exc}") from exc


def orthonormal_representation(G: Graph, Zbar_opt) -> Tuple[np.ndarray, float]:
    """
    Unit vectors ``u_i = [1; v_i] / sqrt(theta)`` (rows of the result) with ``v_i.v_j`` the entries of an optimal
    matrix of :func:`build_theta_primal`. They are orthogonal on non-edges and ``max_i 1/u_i1^2`` is returned as the
    value of the representation.
    """
    Zbar = np.asarray(Zbar_opt[0] if isinstance(Zbar_opt, BlockMatrix) else Zbar_opt, dtype=float)
    theta = float(np.mean(np.diag(Zbar))) + 1.0
    if theta <= 0:
        raise FactorizationFailure(f"Diagonal of the matrix gives a non-positive theta [{theta:.6g}]")
    V = _factor(Zbar)
    U = np.hstack([np.ones((G.n, 1)), V]) / math.sqrt(theta)
    value = float(np.max(1.0 / U[:, 0] ** 2))
    return U, value


def theta_leaning(G: Graph, Y_prime) -> Tuple[np.ndarray, float]:
    """
    Orthonormal representation of the complement of ``G`` built from an optimal matrix of
    :func:`build_theta_prime`, rotated so that its first vector is ``e_1``, and its leaning ``sum_i u_i1^2``.

    Vectors of vanishing norm are replaced by a unit vector along a new coordinate.
    """
    Y = np.asarray(Y_prime[0] if isinstance(Y_prime, BlockMatrix) else Y_prime, dtype=float)
    W = _factor(Y)
    head = W[0]
    length = float(np.linalg.norm(head))
    if length <= ZERO_DIAGONAL:
        raise DegenerateInput("Leading vector of the factor vanishes")
    basis = np.column_stack([head / length, np.eye(len(head))])
    Q, _ = linalg.qr(basis)
    Q = Q[:, :len(head)]
    if Q[:, 0] @ head < 0:
        Q[:, 0] = -Q[:, 0]
    rotated = W[1:] @ Q
    norms = np.linalg.norm(rotated, axis=1)
    vanished = [int(i) for i in np.flatnonzero(norms <= math.sqrt(ZERO_DIAGONAL))]
    U = np.zeros((G.n, rotated.shape[1] + len(vanished)))
    for i in range(G.n):
        if i in vanished:
            continue
        U[i, :rotated.shape[1]] = rotated[i] / norms[i]
    for extra, i in enumerate(vanished):
        U[i, rotated.shape[1] + extra] = 1.0
    leaning = float(np.sum(U[:, 0] ** 2))
    return U, leaning


def _psi_program(G: Graph, r: int) -> PrimalSdp:
    """
    Moment matrix ``M_r(y) = (y_{I u J})`` over the cliques of size at most ``r`` (with the empty set first).

    Index sets that are not cliques only have zero entries once ``y_ij = 0`` on non-edges, so they are left out;
    unions that are not cliques are zero, singletons are fixed to ``1`` and the remaining cliques are variables,
    ``y_empty`` being the first one.
    """
    cliques = [frozenset()]  # type: List[FrozenSet[int]]
    for size in range(1, r + 1):
        cliques += [frozenset(c) for c in itertools.combinations(G.vertices, size) if G.is_clique(c)]
    order = len(cliques)
    constant = np.zeros((order, order))
    entries = {frozenset(): []}  # type: Dict[FrozenSet[int], List[Tuple[int, int]]]
    for a, I in enumerate(cliques):
        for b, J in enumerate(cliques):
            union = I | J
            if len(union) == 1:
                constant[a, b] = 1.0
            elif not union or G.is_clique(union):
                entries.setdefault(union, []).append((a, b))
    A = []
    for union in sorted(entries, key=lambda s: (len(s), sorted(s))):
        mat = np.zeros((order, order))
        for a, b in entries[union]:
            mat[a, b] = 1.0
        A.append(mat)
    c = np.zeros(len(A))
    c[0] = 1.0
    LOGGER.debug("Moment matrix of level [%s] with order [%s] and [%s] variables", r, order, len(A))
    return PrimalSdp(c, A, -constant)


def _checked(report: SolveReport, name: str) -> SolveReport:
    if not report.converged:
        raise NumericalTrouble(f"Program [{name}] was not solved, status [{report.status}]")
    return report


def psi_r(G: Graph, r: int, opts: Optional[SolveOptions] = None) -> float:
    """
    Level ``r`` (1 or 2) of the moment hierarchy, ``min y_empty  s.t.  M_r(y) >= 0``, ``y_i = 1``,
    ``y_ij = 0`` on non-edges.
    """
    if r < 1:
        raise DomainError(f"Hierarchy level must be positive, got [{r}]")
    check_size("level", r, 2)
    if r == 2:
        check_size("vertices", G.n, MAX_PSI2_ORDER)
    report = _checked(solve(_psi_program(G, r), opts), f"psi{r}")
    return float(report.pobj)


def fractional_chromatic(Gbar: Graph, opts: Optional[SolveOptions] = None) -> float:
    """
    Fractional chromatic number of ``Gbar``: ``min sum_S l_S  s.t.  sum_{S ni i} l_S >= 1``, ``l >= 0`` over the
    maximal stable sets ``S`` of ``Gbar``, solved as a diagonal-block program.

    Called on the complement of ``G``, the stable sets are the cliques of ``G`` and the value bounds ``theta(G)``
    from above.
    """
    check_size("vertices", Gbar.n, MAX_CHI_STAR_ORDER)
    stables = sorted(sorted(s) for s in nx.find_cliques(Gbar.complement().to_networkx()))
    k = len(stables)
    rows = np.zeros((Gbar.n + k, k))
    for col, stable in enumerate(stables):
        for v in stable:
            rows[v - 1, col] = 1.0
    rows[Gbar.n:, :] = np.eye(k)
    h = np.concatenate([np.ones(Gbar.n), np.zeros(k)])
    LOGGER.debug("Fractional chromatic program over [%s] maximal stable sets", k)
    report = _checked(solve(lp_as_sdp(np.ones(k), rows, h), opts), "chi-star")
    return float(report.pobj)


def alpha_bruteforce(G: Graph) -> int:
    """
    Size of a maximum stable set, from the exhaustive list of maximal stable sets.
    """
    check_size("vertices", G.n, MAX_ALPHA_ORDER)
    return max(len(s) for s in nx.find_cliques(G.complement().to_networkx()))


def _colorable(neighbors: List[FrozenSet[int]], k: int) -> bool:
    colors = [-1] * len(neighbors)

    def assign(v: int, used: int) -> bool:
        if v == len(neighbors):
            return True
        taken = {colors[u] for u in neighbors[v] if colors[u] >= 0}
        for color in range(min(k, used + 1)):
            if color in taken:
                continue
            colors[v] = color
            if assign(v + 1, max(used, color + 1)):
                return True
        colors[v] = -1
        return False

    return assign(0, 0)


def clique_cover_bruteforce(G: Graph) -> int:
    """
    Smallest amount of cliques partitioning the vertices, found as the chromatic number of the complement by
    exhaustive backtracking over increasing color counts.
    """
    check_size("vertices", G.n, MAX_COVER_ORDER)
    conflicts = G.complement()
    neighbors = [frozenset(j - 1 for j in conflicts.vertices if conflicts.has_edge(i, j) and i != j)
                 for i in conflicts.vertices]
    for k in range(1, G.n + 1):
        if _colorable(neighbors, k):
            return k
    return G.n


def theta_report(G: Graph, opts: Optional[SolveOptions] = None) -> ThetaReport:
    """
    Solves the convex formulations, derives the constructive ones from their optima and adds the combinatorial
    bounds where the graph is small enough.
    """
    opts = opts or SolveOptions()
    primal = build_theta_primal(G)
    primal_report = _checked(solve(primal, opts), "theta-primal")
    dual_report = _checked(solve_dual(build_theta_dual(G), opts), "theta-dual")
    prime_report = _checked(solve_dual(build_theta_prime(G), opts), "theta-prime")
    lambda_max, lambda_ratio = lambda_formulation_values(G, dual_report.Y)
    _, orthonormal = orthonormal_representation(G, primal.slack(primal_report.x))
    _, leaning = theta_leaning(G, prime_report.Y)
    report = ThetaReport(
        n=G.n,
        m=len(G.edges),
        theta=primal_report.pobj,
        theta_primal=primal_report.pobj,
        theta_dual=dual_report.dobj,
        theta_prime=prime_report.dobj,
        theta_lambda_max=lambda_max,
        theta_lambda_ratio=lambda_ratio,
        theta_orthonormal=orthonormal,
        theta_leaning=leaning,
        alpha=alpha_bruteforce(G) if G.n <= MAX_ALPHA_ORDER else None,
        clique_cover=clique_cover_bruteforce(G) if G.n <= MAX_COVER_ORDER else None,
        chi_star=fractional_chromatic(G.complement(), opts) if G.n <= MAX_CHI_STAR_ORDER else None,
    )
    LOGGER.info("Theta of graph with [%s] vertices and [%s] edges is [%.8g]", G.n, len(G.edges), report.theta)
    return report
