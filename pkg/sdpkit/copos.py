"""
Inner and outer approximations of the copositive cone, and the stable set formulations built on them.

Verdicts always name the cone that was tested, since membership in the copositive cone itself is only bracketed::

    S+ cap N  <=  S+  <=  K(0) = S+ + N  <=  K(1)  <=  copositive  <=  ...  <=  P(r)  <=  P(1)
"""
import itertools
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy.special import comb

from sdpkit.impl import Base, DomainError, EnumNameHyphenCase, Infeasible, NumericalTrouble, check_size
from sdpkit.schemas import SolveOptions
from sdpkit.sdpmodel import BlockMatrix, DualSdp, PrimalSdp, Sense
from sdpkit.sdpsolve import solve, solve_dual
from sdpkit.sos import HomPoly, multiply_norm_power, sos_decompose
from sdpkit.symcore import SymMatrix, psd_check, sym_matrix
from sdpkit.theta import Graph
from sdpkit.typedefs import MatrixLike
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_SPLUS_ORDER = 30
MAX_K_LEVEL = 1
MAX_K1_ORDER = 8
MAX_OUTER_POINTS = 500000
MAX_QP_ORDER = 20
MAX_ALPHA0_ORDER = 20
ENTRY_TOL = 1e-9
MEMBER_TOL = 1e-6
CERTIFICATE_TOL = 1e-7
OUTER_TOL = 1e-9


class Cone(EnumNameHyphenCase):
    SPLUS_CAP_N = "splus-cap-n"
    SPLUS_PLUS_N = "splus-plus-n"
    K_R = "k-r"
    P_R_OUTER = "p-r-outer"


class ConeVerdict(Base):
    """
    Outcome of a membership test against one cone of the hierarchy.

    The certificate is ``{"S": ..., "N": ...}`` for decompositions, the SOS certificate for ``K(r)`` members and the
    violating integer vector ``z`` for outer approximation failures.
    """

    __fields__ = ("cone", "member", "r", "certificate", "margin")


def _matrix(M: MatrixLike) -> SymMatrix:
    return sym_matrix(M)


def horn_matrix() -> SymMatrix:
    """
    Copositive matrix outside of ``S+ + N``.
    """
    return SymMatrix([
        [1, -1, 1, 1, -1],
        [-1, 1, -1, 1, 1],
        [1, -1, 1, -1, 1],
        [1, 1, -1, 1, -1],
        [-1, 1, 1, -1, 1],
    ])


def p_matrix_poly(M: MatrixLike) -> HomPoly:
    return HomPoly.from_matrix(_matrix(M))


def in_dnn(M: MatrixLike) -> ConeVerdict:
    M = _matrix(M)
    verdict = psd_check(M)
    lowest_entry = float(np.min(M))
    member = bool(verdict.is_psd) and lowest_entry >= -ENTRY_TOL
    return ConeVerdict(cone=Cone.SPLUS_CAP_N, member=member, r=None, certificate=None,
                       margin=min(float(verdict.min_eigenvalue), lowest_entry))


def _splus_plus_n_program(M: SymMatrix) -> Tuple[PrimalSdp, List[Tuple[int, int]]]:
    """
    ``max t  s.t.  M - N - t I >= 0``, ``N_ij >= t`` for ``i < j``, ``diag(N) = 0``.

    Variables are the upper entries of ``N`` in row order followed by ``t``.
    """
    n = M.order
    pairs = list(itertools.combinations(range(n), 2))
    structure = [n] + [1] * len(pairs)
    A = []
    for k, (i, j) in enumerate(pairs):
        mats = [np.zeros((size, size)) for size in structure]
        mats[0][i, j] = mats[0][j, i] = -1.0
        mats[k + 1][0, 0] = 1.0
        A.append(BlockMatrix(mats))
    A.append(BlockMatrix([-np.eye(n)] + [[[-1.0]]] * len(pairs)))
    B = BlockMatrix([-np.asarray(M)] + [[[0.0]]] * len(pairs))
    c = np.zeros(len(A))
    c[-1] = 1.0
    return PrimalSdp(c, A, B, sense=Sense.MAX), pairs


def _splus_plus_n_certificate(M: SymMatrix, x: np.ndarray, pairs: List[Tuple[int, int]]) -> Tuple[dict, float]:
    n = M.order
    N = np.zeros((n, n))
    for value, (i, j) in zip(x, pairs):
        N[i, j] = N[j, i] = max(0.0, float(value))
    S = np.asarray(M) - N
    lowest = float(np.linalg.eigvalsh(S)[0]) if n else 0.0
    return {"S": S, "N": N}, lowest


def in_splus_plus_n(M: MatrixLike, opts: Optional[SolveOptions] = None) -> ConeVerdict:
    """
    Tests ``M = S + N`` with ``S`` positive semidefinite and ``N`` nonnegative with zero diagonal.

    The margin is the largest ``t`` for which ``S - t I`` and ``N - t`` (off the diagonal) stay feasible. A matrix
    with margin at least ``-MEMBER_TOL`` is a member only when the decomposition read from the solution keeps ``S``
    positive semidefinite within ``CERTIFICATE_TOL``; the program is solved once more with tighter tolerances before
    rejecting it.
    """
    M = _matrix(M)
    n = M.order
    check_size("order", n, MAX_SPLUS_ORDER)
    program, pairs = _splus_plus_n_program(M)
    opts = opts or SolveOptions()
    report = solve(program, opts)
    if not report.converged:
        raise NumericalTrouble(f"Decomposition program was not solved, status [{report.status}]")
    margin = float(report.pobj)
    certificate = None
    if margin >= -MEMBER_TOL:
        certificate, lowest = _splus_plus_n_certificate(M, report.x[:-1], pairs)
        if lowest < -CERTIFICATE_TOL:
            tighter = opts.copy(update={"tol": opts.tol / 100.0, "feas_tol": opts.feas_tol / 100.0,
                                        "max_iter": max(opts.max_iter, 400)})
            report = solve(program, tighter)
            if report.converged:
                margin = float(report.pobj)
                certificate, lowest = _splus_plus_n_certificate(M, report.x[:-1], pairs)
        if lowest < -CERTIFICATE_TOL:
            LOGGER.debug("Decomposition rejected, smallest eigenvalue of S is [%.3g]", lowest)
            certificate = None
    member = certificate is not None
    LOGGER.debug("Decomposition margin [%.6g] for matrix of order [%s]", margin, n)
    return ConeVerdict(cone=Cone.SPLUS_PLUS_N, member=member, r=0, certificate=certificate, margin=margin)


def k_r_member(M: MatrixLike, r: int, opts: Optional[SolveOptions] = None) -> ConeVerdict:
    """
    Tests whether ``(x_1^2 + ... + x_n^2)^r sum_ij M_ij x_i^2 x_j^2`` is a sum of squares.
    """
    M = _matrix(M)
    if r < 0:
        raise DomainError(f"Hierarchy level must be nonnegative, got [{r}]")
    check_size("hierarchy level", r, MAX_K_LEVEL)
    if r == 1:
        check_size("order", M.order, MAX_K1_ORDER)
    poly = multiply_norm_power(p_matrix_poly(M), r)
    try:
        cert = sos_decompose(poly, opts)
    except Infeasible as exc:
        return ConeVerdict(cone=Cone.K_R, member=False, r=r, certificate=None, margin=exc.margin)
    return ConeVerdict(cone=Cone.K_R, member=True, r=r, certificate=cert, margin=cert.margin)


def outer_points(n: int, r: int) -> np.ndarray:
    """
    Nonzero integer vectors ``z >= 0`` with ``sum(z) <= r``, in lexicographic order.
    """
    if r < 1 or n < 1:
        raise DomainError(f"Invalid outer approximation request [{n}, {r}]")
    check_size("outer points", int(comb(n + r, r, exact=True)) - 1, MAX_OUTER_POINTS)
    points = []
    for total in range(1, r + 1):
        for picks in itertools.combinations_with_replacement(range(n), total):
            z = [0] * n
            for i in picks:
                z[i] += 1
            points.append(tuple(z))
    return np.array(sorted(points), dtype=float)


def p_r_outer(M: MatrixLike, r: int) -> ConeVerdict:
    """
    Checks ``z^T M z >= 0`` over the integer points of :func:`outer_points`; the first violation is the certificate.
    """
    M = _matrix(M)
    Z = outer_points(M.order, r)
    values = np.einsum("ki,ij,kj->k", Z, np.asarray(M), Z)
    violated = np.flatnonzero(values < -OUTER_TOL)
    if len(violated):
        first = int(violated[0])
        z = Z[first].astype(int)
        LOGGER.debug("Outer approximation level [%s] violated at [%s]", r, z.tolist())
        return ConeVerdict(cone=Cone.P_R_OUTER, member=False, r=r, certificate=z, margin=float(values[first]))
    return ConeVerdict(cone=Cone.P_R_OUTER, member=True, r=r, certificate=None, margin=float(values.min()))


def _reduce_support(adj: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Moves the mass of one endpoint of each supported edge to the other until the support is stable.

    ``x^T (A + I) x`` is linear along such a move, so the endpoint with the lower neighbourhood weight receives
    everything (the lower index on ties) and the value never increases.
    """
    x = x.copy()
    while True:
        support = x > 0
        edges = np.argwhere(np.triu(adj * np.outer(support, support)) > 0)
        if not len(edges):
            return x
        i, j = (int(v) for v in edges[0])
        weights = adj @ x
        z_i = weights[i] - adj[i, j] * x[j]
        z_j = weights[j] - adj[j, i] * x[i]
        keep, drop = (i, j) if z_i <= z_j else (j, i)
        x[keep] += x[drop]
        x[drop] = 0.0


def _stable_from_seed(adj: np.ndarray, seed: List[int]) -> List[int]:
    x = np.zeros(len(adj))
    x[seed] = 1.0 / len(seed)
    return [int(i) for i in np.flatnonzero(_reduce_support(adj, x) > 0)]


def stable_via_qp(G: Graph) -> Tuple[float, np.ndarray]:
    """
    Minimum of ``x^T (A + I) x`` over the simplex, equal to ``1 / alpha(G)``.

    The support reduction runs from the uniform point on all vertices and from the uniform point on each vertex
    with its non-neighbours, keeping the largest stable support. Local search alone does not guarantee a maximum
    stable set, so the result is then confirmed by enumerating every stable set ``T`` of the current size (as
    cliques of the complement) and reducing from ``T`` together with the vertices not adjacent to ``T``. The
    enumeration is exponential in the worst case, which bounds the order to ``MAX_QP_ORDER``.
    """
    check_size("vertices", G.n, MAX_QP_ORDER)
    adj = G.adjacency()
    best = _stable_from_seed(adj, list(range(G.n)))
    for v in range(G.n):
        found = _stable_from_seed(adj, [u for u in range(G.n) if u == v or not adj[v, u]])
        if len(found) > len(best):
            best = found
    conflicts = G.complement().to_networkx()
    improved = True
    while improved:
        improved = False
        k = len(best)
        if k == G.n:
            break
        for clique in nx.enumerate_all_cliques(conflicts):
            if len(clique) < k:
                continue
            if len(clique) > k:
                break
            T = sorted(v - 1 for v in clique)
            closed = set(T) | {int(u) for t in T for u in np.flatnonzero(adj[t])}
            rest = [v for v in range(G.n) if v not in closed]
            if not rest:
                continue
            found = _stable_from_seed(adj, T + rest)
            if len(found) > k:
                LOGGER.debug("Stable support grew from [%s] to [%s]", k, len(found))
                best = found
                improved = True
                break
    x = np.zeros(G.n)
    x[best] = 1.0 / len(best)
    return 1.0 / len(best), x


def alpha0(G: Graph, opts: Optional[SolveOptions] = None) -> float:
    """
    ``max J.X  s.t.  trace(X) = 1``, ``X_ij = 0`` on edges, ``X >= 0`` entrywise, ``X`` positive semidefinite.

    Entries of non-edges are tied to one ``1 x 1`` block each to carry their sign.
    """
    check_size("vertices", G.n, MAX_ALPHA0_ORDER)
    n = G.n
    free = G.non_edges()
    structure = [n] + [1] * len(free)
    B = BlockMatrix([np.ones((n, n))] + [[[0.0]]] * len(free))
    A = [BlockMatrix([np.eye(n)] + [[[0.0]]] * len(free))]
    for i, j in G.sorted_edges():
        A.append(BlockMatrix.unit(structure, 0, i - 1, j - 1, 0.5))
    for k, (i, j) in enumerate(free):
        mats = [np.zeros((size, size)) for size in structure]
        mats[0][i - 1, j - 1] = mats[0][j - 1, i - 1] = 0.5
        mats[k + 1][0, 0] = -1.0
        A.append(BlockMatrix(mats))
    c = np.zeros(len(A))
    c[0] = 1.0
    report = solve_dual(DualSdp(B, A, c, sense=Sense.MAX), opts)
    if not report.converged:
        raise NumericalTrouble(f"Stable set relaxation was not solved, status [{report.status}]")
    return float(report.dobj)


def alpha_k0(G: Graph, opts: Optional[SolveOptions] = None) -> float:
    """
    ``min l  s.t.  l (I + A) - J in S+ + N``, written with one sign-constrained variable per vertex pair.
    """
    check_size("vertices", G.n, MAX_ALPHA0_ORDER)
    n = G.n
    A = [np.eye(n) + G.adjacency()]
    for i, j in itertools.combinations(range(n), 2):
        mat = np.zeros((n, n))
        mat[i, j] = mat[j, i] = -1.0
        A.append(mat)
    c = np.zeros(len(A))
    c[0] = 1.0
    program = PrimalSdp(c, A, np.ones((n, n)), nonneg_vars=frozenset(range(1, len(A))))
    report = solve(program, opts)
    if not report.converged:
        raise NumericalTrouble(f"Copositive stable set bound was not solved, status [{report.status}]")
    return float(report.pobj)
