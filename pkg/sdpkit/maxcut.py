"""
Maximum cut relaxation over unit vectors and random hyperplane rounding.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from sdpkit.impl import Base, DomainError, FactorizationFailure, NotPsd, NumericalTrouble, check_size
from sdpkit.schemas import RoundingOptions, SolveOptions
from sdpkit.sdpmodel import BlockMatrix, DualSdp, Sense
from sdpkit.sdpsolve import solve_dual
from sdpkit.symcore import GramMethod, SymMatrix, gram_factor, sym_matrix
from sdpkit.theta import Graph
from sdpkit.typedefs import MatrixLike, VectorLike
from sdpkit.utils import get_logger, trial_generator

LOGGER = get_logger(__name__)

MAX_SDP_ORDER = 40
MAX_BRUTE_ORDER = 22
BRUTE_CHUNK_BITS = 16
GRAM_TOL = 1e-6
DIAGONAL_TOL = 1e-6


class WeightedGraph(object):
    """
    Graph on vertices ``1..n`` given by its symmetric nonnegative weight matrix with zero diagonal.
    """
    __slots__ = ("n", "weights")

    def __init__(self, weights: MatrixLike):
        W = np.asarray(sym_matrix(weights))
        if np.any(W < 0):
            raise DomainError("Edge weights must be nonnegative")
        if np.any(np.diag(W) != 0):
            raise DomainError("Weight matrix must have a zero diagonal")
        self.n = W.shape[0]
        self.weights = W

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={len(self.edges())})"

    def __eq__(self, other):
        return isinstance(other, WeightedGraph) and np.array_equal(self.weights, other.weights)

    def edges(self) -> List[Tuple[int, int, float]]:
        rows, cols = np.nonzero(np.triu(self.weights))
        return [(int(i) + 1, int(j) + 1, float(self.weights[i, j])) for i, j in zip(rows, cols)]

    @property
    def total_weight(self) -> float:
        return float(np.triu(self.weights).sum())

    @classmethod
    def from_graph(cls, G: Graph, weight: float = 1.0) -> "WeightedGraph":
        return cls(weight * G.adjacency())

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Tuple[int, int, float]]) -> "WeightedGraph":
        if n < 1:
            raise DomainError(f"Graph requires at least one vertex, got [{n}]")
        W = np.zeros((n, n))
        for i, j, w in edges:
            if i == j or not (1 <= i <= n and 1 <= j <= n):
                raise DomainError(f"Invalid edge [{i}-{j}] for [{n}] vertices")
            if W[i - 1, j - 1]:
                raise DomainError(f"Duplicate edge [{i}-{j}]")
            W[i - 1, j - 1] = W[j - 1, i - 1] = w
        return cls(W)


class CutResult(Base):
    """
    Best cut over the rounding trials.

    ``expected`` is the mean cut value of the rounding in closed form, the sampled mean estimates it.
    """

    __fields__ = ("assignment", "value", "sdp_bound", "trials", "best_trial",
                  "best_over_trials", "mean_over_trials", "expected")


def build_gw_sdp(g: WeightedGraph) -> DualSdp:
    """
    ``max sum_{i<j} w_ij (1 - X_ij) / 2  s.t.  diag(X) = 1``, ``X`` positive semidefinite.
    """
    check_size("vertices", g.n, MAX_SDP_ORDER)
    n = g.n
    A = [BlockMatrix.unit([n], 0, i, i) for i in range(n)]
    return DualSdp(-g.weights / 4.0, A, np.ones(n), sense=Sense.MAX, offset=float(g.weights.sum()) / 4.0)


def gw_relaxation(g: WeightedGraph, opts: Optional[SolveOptions] = None) -> Tuple[float, SymMatrix]:
    """
    Optimal value and matrix of the relaxation.
    """
    report = solve_dual(build_gw_sdp(g), opts)
    if not report.converged:
        raise NumericalTrouble(f"Cut relaxation was not solved, status [{report.status}]")
    X = np.asarray(report.Y[0])
    LOGGER.info("Cut relaxation bound [%.8g] for [%s] vertices", report.dobj, g.n)
    return float(report.dobj), SymMatrix(X, tol=1e-8)


def cut_value(g: WeightedGraph, z: VectorLike) -> float:
    z = np.asarray(z, dtype=float)
    if len(z) != g.n:
        raise DomainError(f"Assignment of length [{len(z)}] for [{g.n}] vertices")
    return float(np.sum(g.weights * (1.0 - np.outer(z, z))) / 4.0)


def expected_cut(X: MatrixLike, g: WeightedGraph) -> float:
    """
    ``sum_{i<j} w_ij arccos(X_ij) / pi``, the mean cut of a uniform random hyperplane.
    """
    X = np.clip(np.asarray(X, dtype=float), -1.0, 1.0)
    return float(np.sum(np.triu(g.weights, 1) * np.arccos(X)) / math.pi)


def _vectors(X: MatrixLike) -> np.ndarray:
    X = sym_matrix(X, tol=1e-8)
    if np.max(np.abs(np.diag(X) - 1.0)) > DIAGONAL_TOL:
        raise DomainError("Rounding requires a matrix with unit diagonal")
    try:
        return gram_factor(X, GramMethod.EIGEN, GRAM_TOL)
    except NotPsd as exc:
        raise FactorizationFailure(f"Rounding matrix cannot be factored: {exc}") from exc


def _round_trials(V: np.ndarray,
                  g: WeightedGraph,
                  seed: int,
                  trials: Sequence[int],
                  ) -> List[Tuple[float, int, np.ndarray]]:
    results = []
    for trial in trials:
        direction = trial_generator(seed, trial).standard_normal(V.shape[1])
        z = np.where(V @ direction > 0, 1, -1)
        results.append((cut_value(g, z), trial, z))
    return results


def round_hyperplane(X: MatrixLike,
                     g: WeightedGraph,
                     seed: int = 0,
                     trials: int = 2000,
                     threads: int = 1,
                     sdp_bound: Optional[float] = None,
                     ) -> CutResult:
    """
    Cuts of random hyperplanes through the Gram vectors of ``X``: vertex ``i`` is on the side of the sign of
    ``v_i . r`` (``-1`` when zero).

    Every trial draws from a generator keyed by ``(seed, trial)`` and the best trial is the first one reaching the
    maximum, so the result does not depend on ``threads``.
    """
    if trials < 1:
        raise DomainError(f"At least one trial is required, got [{trials}]")
    V = _vectors(X)
    if V.shape[0] != g.n:
        raise DomainError(f"Matrix of order [{V.shape[0]}] for [{g.n}] vertices")
    workers = max(1, min(int(threads), trials))
    chunks = [range(start, trials, workers) for start in range(workers)]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="rounding") as executor:
        parts = list(executor.map(lambda chunk: _round_trials(V, g, seed, chunk), chunks))
    results = sorted((item for part in parts for item in part), key=lambda item: item[1])
    values = np.array([item[0] for item in results])
    best = int(np.argmax(values))
    value, trial, z = results[best]
    LOGGER.info("Best cut [%.8g] at trial [%s] of [%s], mean [%.8g]", value, trial, trials, values.mean())
    return CutResult(assignment=z, value=value, sdp_bound=sdp_bound, trials=trials, best_trial=trial,
                     best_over_trials=value, mean_over_trials=float(values.mean()), expected=expected_cut(X, g))


def maxcut_bruteforce(g: WeightedGraph) -> float:
    """
    Maximum cut by enumeration of the assignments with vertex ``1`` on the positive side.
    """
    n = g.n
    check_size("vertices", n, MAX_BRUTE_ORDER)
    if n == 1:
        return 0.0
    shifts = np.arange(n - 2, -1, -1)
    best = 0.0
    chunk = 1 << min(n - 1, BRUTE_CHUNK_BITS)
    for start in range(0, 1 << (n - 1), chunk):
        codes = np.arange(start, min(start + chunk, 1 << (n - 1)))
        signs = 1.0 - 2.0 * ((codes[:, None] >> shifts) & 1)
        Z = np.hstack([np.ones((len(codes), 1)), signs])
        values = (g.weights.sum() - np.einsum("ki,ij,kj->k", Z, g.weights, Z)) / 4.0
        best = max(best, float(values.max()))
    return best


def gw_ratio_function(alpha: float) -> float:
    """
    ``(2 / pi) alpha / (1 - cos(alpha))`` on ``(0, pi]``.
    """
    if not 0.0 < alpha <= math.pi:
        raise DomainError(f"Angle must lie in (0, pi], got [{alpha}]")
    return 2.0 / math.pi * alpha / (1.0 - math.cos(alpha))


def gw_ratio_minimum(step: float = 1e-4) -> Tuple[float, float]:
    """
    Grid minimum ``(alpha, value)`` of :func:`gw_ratio_function` over ``(0, pi]``.
    """
    if step <= 0:
        raise DomainError(f"Grid step must be positive, got [{step}]")
    grid = np.append(np.arange(step, math.pi, step), math.pi)
    values = 2.0 / math.pi * grid / (1.0 - np.cos(grid))
    k = int(np.argmin(values))
    return float(grid[k]), float(values[k])


def maxcut_solve(g: WeightedGraph,
                 opts: Optional[SolveOptions] = None,
                 rounding: Optional[RoundingOptions] = None,
                 ) -> CutResult:
    rounding = rounding or RoundingOptions()
    bound, X = gw_relaxation(g, opts)
    return round_hyperplane(X, g, rounding.seed, rounding.trials, rounding.threads, sdp_bound=bound)
