"""
Dense primal-dual interior point solver for block-diagonal semidefinite programs.

The method is an infeasible path-following scheme with the HKM search direction and a Mehrotra predictor-corrector
step. Blocks of order 1 are gathered in a diagonal (linear programming) part handled with vector operations.
"""
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import linalg

from sdpkit.impl import EnumNameHyphenCase, NumericalTrouble, check_size
from sdpkit.schemas import SolveOptions
from sdpkit.sdpmodel import BlockMatrix, DualSdp, PrimalSdp, SdpSolution, Sense, dualize
from sdpkit.symcore import SymMatrix, sym_matrix
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_EIGEN_ORDER = 40
SIGMA_MAX = 0.3
STALL_STEP = 1e-10
BACKTRACK_STEPS = 10
PHASE1_BOUND = -1.0
PHASE1_RADIUS = 1e4


class SolveStatus(EnumNameHyphenCase):
    OPTIMAL = "Optimal"
    NEAR_OPTIMAL = "NearOptimal"
    PRIMAL_INFEASIBLE_SUSPECTED = "PrimalInfeasibleSuspected"
    DUAL_INFEASIBLE_SUSPECTED = "DualInfeasibleSuspected"
    ITERATION_LIMIT = "IterationLimit"


class SolveReport(SdpSolution):
    """
    Outcome of a solve, with the objective values of the primal program and of its dual (offsets included).
    """

    __fields__ = ("status", "x", "Y", "pobj", "dobj", "gap", "iters",
                  "rel_gap", "primal_residual", "dual_residual", "gap_history")

    @property
    def converged(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.NEAR_OPTIMAL)

    def json(self, digits: Optional[int] = None):
        data = super(SolveReport, self).json(digits)
        return {
            "status": data["status"],
            "pobj": data["pobj"],
            "dobj": data["dobj"],
            "gap": data["gap"],
            "iters": data["iters"],
            "x": data["x"],
            "blocks": data["Y"],
        }


class _Parts(object):
    """
    Iterate of the solver: list of dense blocks and the vector of the diagonal part.
    """

    __slots__ = ("dense", "lp")

    def __init__(self, dense: List[np.ndarray], lp: np.ndarray):
        self.dense = dense
        self.lp = lp

    def __add__(self, other: "_Parts") -> "_Parts":
        return _Parts([a + b for a, b in zip(self.dense, other.dense)], self.lp + other.lp)

    def __sub__(self, other: "_Parts") -> "_Parts":
        return _Parts([a - b for a, b in zip(self.dense, other.dense)], self.lp - other.lp)

    def scaled(self, value: float) -> "_Parts":
        return _Parts([a * value for a in self.dense], self.lp * value)

    def dot(self, other: "_Parts") -> float:
        return float(sum(np.sum(a * b) for a, b in zip(self.dense, other.dense)) + self.lp @ other.lp)

    def norm(self) -> float:
        return math.sqrt(max(self.dot(self), 0.0))


class _Layout(object):
    """
    Problem data split into dense blocks and the diagonal part.
    """

    def __init__(self, p: PrimalSdp):
        self.n = p.n
        self.places = []  # type: List[Tuple[bool, int]]
        dense_idx = []
        lp_idx = []
        for b, size in enumerate(p.structure):
            if size == 1:
                self.places.append((False, len(lp_idx)))
                lp_idx.append(b)
            else:
                self.places.append((True, len(dense_idx)))
                dense_idx.append(b)
        self.A_dense = [np.array([np.asarray(mat[b]) for mat in p.A]).reshape(p.n, p.structure[b], p.structure[b])
                        for b in dense_idx]
        self.B_dense = [np.asarray(p.B[b]) for b in dense_idx]
        lp_cols = [[float(mat[b][0, 0]) for b in lp_idx] for mat in p.A]
        lp_rhs = [float(p.B[b][0, 0]) for b in lp_idx]
        # sign constraints become extra rows of the diagonal part
        self.extra = sorted(p.nonneg_vars)
        for row in lp_cols:
            row.extend([0.0] * len(self.extra))
        for k, i in enumerate(self.extra):
            lp_cols[i][len(lp_idx) + k] = 1.0
        lp_rhs.extend([0.0] * len(self.extra))
        self.A_lp = np.array(lp_cols, dtype=float).reshape(p.n, len(lp_rhs))
        self.B = _Parts(self.B_dense, np.array(lp_rhs, dtype=float))
        self.sizes = [mat.shape[0] for mat in self.B_dense]
        self.order = sum(self.sizes) + len(lp_rhs)

    def amap(self, x: np.ndarray) -> _Parts:
        return _Parts([np.tensordot(x, A, axes=1) for A in self.A_dense], x @ self.A_lp)

    def adjoint(self, Y: _Parts) -> np.ndarray:
        total = self.A_lp @ Y.lp
        for A, block in zip(self.A_dense, Y.dense):
            total = total + np.tensordot(A, block, axes=([1, 2], [0, 1]))
        return total

    def identity(self, dense_scale: List[float], lp_scale: float) -> _Parts:
        return _Parts([s * np.eye(k) for s, k in zip(dense_scale, self.sizes)], np.full(self.A_lp.shape[1], lp_scale))

    def to_blocks(self, Y: _Parts) -> BlockMatrix:
        blocks = []
        for is_dense, index in self.places:
            if is_dense:
                block = Y.dense[index]
                blocks.append((block + block.T) / 2.0)
            else:
                blocks.append([[Y.lp[index]]])
        return BlockMatrix(blocks)


def _start_point(layout: _Layout, c: np.ndarray) -> Tuple[_Parts, _Parts]:
    dense_y = []
    dense_s = []
    for A, B, k in zip(layout.A_dense, layout.B_dense, layout.sizes):
        norms = np.sqrt(np.sum(A * A, axis=(1, 2))) if layout.n else np.zeros(0)
        ratio = float(np.max((1.0 + np.abs(c)) / (1.0 + norms))) if layout.n else 1.0
        dense_y.append(max(10.0, math.sqrt(k), k * ratio))
        dense_s.append(max(10.0, math.sqrt(k), float(np.linalg.norm(B)), float(np.max(norms, initial=0.0))))
    norms = np.abs(layout.A_lp).max(axis=1) if layout.A_lp.size else np.zeros(layout.n)
    lp_y = max([10.0] + [float(np.max((1.0 + np.abs(c)) / (1.0 + norms)))] if layout.n else [10.0])
    lp_s = max(10.0, float(np.max(np.abs(layout.B.lp), initial=0.0)), float(np.max(norms, initial=0.0)))
    return layout.identity(dense_y, lp_y), layout.identity(dense_s, lp_s)


def _max_step(X: _Parts, D: _Parts) -> float:
    """
    Largest step ``a`` for which ``X + a D`` stays positive semidefinite.
    """
    step = np.inf
    for block, direction in zip(X.dense, D.dense):
        L = linalg.cholesky(block, lower=True)
        W = linalg.solve_triangular(L, linalg.solve_triangular(L, direction, lower=True).T, lower=True)
        lowest = float(linalg.eigvalsh((W + W.T) / 2.0)[0])
        if lowest < 0:
            step = min(step, -1.0 / lowest)
    negative = D.lp < 0
    if np.any(negative):
        step = min(step, float(np.min(-X.lp[negative] / D.lp[negative])))
    return step


class InteriorPointSolver(object):
    """
    Solves ``min c.x  s.t.  sum_i x_i A_i - B = S >= 0`` together with ``max B.Y  s.t.  A_i.Y = c_i, Y >= 0``.

    Maximization programs are solved through the negated objective. The iterate ``(x, S, Y)`` does not need to be
    feasible: the primal and dual residuals are reduced along with the complementarity ``Y.S``.
    """

    def __init__(self, p: PrimalSdp, opts: Optional[SolveOptions] = None):
        self.problem = p
        self.opts = opts or SolveOptions()
        self.layout = _Layout(p)
        self.c = p.c if p.sense is Sense.MIN else -p.c
        self.norm_b = self.layout.B.norm()
        self.norm_c = float(np.linalg.norm(self.c))

    def direction(self, x_res: _Parts, d_res: np.ndarray, Y: _Parts, S_inv: _Parts, M_factor, G: _Parts):
        """
        Newton direction with complementarity target ``G`` (``-Y`` for the predictor).

        ``dS = sum_i dx_i A_i + Rp`` and ``dY = G - Y dS S^-1`` (symmetrized) with ``dx`` solving the Schur system.
        """
        layout = self.layout
        rhs = -d_res
        for A, g, y, s_inv, r in zip(layout.A_dense, G.dense, Y.dense, S_inv.dense, x_res.dense):
            K = g - y @ r @ s_inv
            rhs = rhs + np.tensordot(A, K, axes=([1, 2], [0, 1]))
        rhs = rhs + layout.A_lp @ (G.lp - Y.lp * x_res.lp * S_inv.lp)
        dx = linalg.cho_solve(M_factor, rhs) if layout.n else np.zeros(0)
        dS = layout.amap(dx) + x_res
        dense = []
        for g, y, ds, s_inv in zip(G.dense, Y.dense, dS.dense, S_inv.dense):
            dy = g - y @ ds @ s_inv
            dense.append((dy + dy.T) / 2.0)
        dY = _Parts(dense, G.lp - Y.lp * dS.lp * S_inv.lp)
        return dx, dS, dY

    def schur_matrix(self, Y: _Parts, S_inv: _Parts) -> np.ndarray:
        layout = self.layout
        M = (layout.A_lp * (Y.lp * S_inv.lp)) @ layout.A_lp.T
        for A, y, s_inv in zip(layout.A_dense, Y.dense, S_inv.dense):
            P = np.matmul(np.matmul(y, A), s_inv)
            M = M + np.tensordot(A, P, axes=([1, 2], [1, 2]))
        return (M + M.T) / 2.0

    def run(self,
            x0: Optional[np.ndarray] = None,
            stop: Optional[Callable[[np.ndarray], bool]] = None,
            ) -> "SolveReport":
        """
        Iterates until convergence, divergence, stalling or the iteration limit.

        :param x0: primal start; its slack is used as the start of ``S`` when it is positive definite.
        :param stop: early termination test evaluated on the primal iterate.
        """
        opts = self.opts
        layout = self.layout
        Y, S = _start_point(layout, self.c)
        x = np.zeros(layout.n)
        if x0 is not None:
            start = layout.amap(np.asarray(x0, dtype=float)) - layout.B
            if all(float(linalg.eigvalsh(b)[0]) > 0 for b in start.dense) and np.all(start.lp > 0):
                x = np.asarray(x0, dtype=float).copy()
                S = start
        status = None
        history = []  # type: List[float]
        iters = 0
        metrics = {}
        while True:
            x_res = layout.amap(x) - layout.B - S
            d_res = self.c - layout.adjoint(Y)
            comp = Y.dot(S)
            mu = comp / layout.order
            pobj = float(self.c @ x)
            dobj = layout.B.dot(Y)
            metrics = {
                "gap": pobj - dobj,
                "rel_gap": abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj)),
                "primal_residual": x_res.norm() / (1.0 + self.norm_b),
                "dual_residual": float(np.linalg.norm(d_res)) / (1.0 + self.norm_c),
            }
            history.append(comp)
            LOGGER.debug("Iteration [%s]: pobj [%.10g] dobj [%.10g] mu [%.3g] residuals [%.3g, %.3g]",
                         iters, pobj, dobj, mu, metrics["primal_residual"], metrics["dual_residual"])
            if (metrics["rel_gap"] <= opts.tol and metrics["primal_residual"] <= opts.feas_tol
                    and metrics["dual_residual"] <= opts.feas_tol):
                status = SolveStatus.OPTIMAL
                break
            if stop is not None and stop(x):
                status = SolveStatus.NEAR_OPTIMAL
                break
            if dobj > opts.divergence_norm:
                status = SolveStatus.PRIMAL_INFEASIBLE_SUSPECTED
                break
            if pobj < -opts.divergence_norm:
                status = SolveStatus.DUAL_INFEASIBLE_SUSPECTED
                break
            if iters >= opts.max_iter:
                break
            try:
                x, S, Y = self.step(x, S, Y, x_res, d_res, mu)
            except (linalg.LinAlgError, NumericalTrouble) as exc:
                LOGGER.debug("Iterations stopped on numerical trouble: [%s]", exc)
                break
            iters += 1
        if status is None:
            near = math.sqrt(opts.tol)
            feas = math.sqrt(opts.feas_tol)
            if (metrics["rel_gap"] <= near and metrics["primal_residual"] <= feas
                    and metrics["dual_residual"] <= feas):
                status = SolveStatus.NEAR_OPTIMAL
            else:
                status = SolveStatus.ITERATION_LIMIT
        return self.report(status, x, Y, iters, metrics, history)

    def step(self, x: np.ndarray, S: _Parts, Y: _Parts, x_res: _Parts, d_res: np.ndarray, mu: float):
        layout = self.layout
        opts = self.opts
        S_inv = _Parts([linalg.cho_solve(linalg.cho_factor(s), np.eye(s.shape[0])) for s in S.dense], 1.0 / S.lp)
        M = self.schur_matrix(Y, S_inv)
        M_factor = linalg.cho_factor(M) if layout.n else None

        # predictor
        dx, dS, dY = self.direction(x_res, d_res, Y, S_inv, M_factor, Y.scaled(-1.0))
        a_p = min(1.0, _max_step(S, dS))
        a_d = min(1.0, _max_step(Y, dY))
        mu_aff = (Y + dY.scaled(a_d)).dot(S + dS.scaled(a_p)) / layout.order
        sigma = min(SIGMA_MAX, (max(mu_aff, 0.0) / mu) ** 3) if mu > 0 else 0.0

        # corrector
        G = _Parts(
            [sigma * mu * s_inv - y - dy @ ds @ s_inv
             for s_inv, y, dy, ds in zip(S_inv.dense, Y.dense, dY.dense, dS.dense)],
            sigma * mu * S_inv.lp - Y.lp - dY.lp * dS.lp * S_inv.lp,
        )
        dx, dS, dY = self.direction(x_res, d_res, Y, S_inv, M_factor, G)
        a_p = min(1.0, opts.step_fraction * _max_step(S, dS))
        a_d = min(1.0, opts.step_fraction * _max_step(Y, dY))
        comp = Y.dot(S)
        for _ in range(BACKTRACK_STEPS):
            if (Y + dY.scaled(a_d)).dot(S + dS.scaled(a_p)) <= comp:
                break
            a_p /= 2.0
            a_d /= 2.0
        if max(a_p, a_d) < STALL_STEP:
            raise NumericalTrouble(f"Step lengths [{a_p:.3g}, {a_d:.3g}] vanished")
        return x + a_p * dx, S + dS.scaled(a_p), Y + dY.scaled(a_d)

    def report(self, status, x, Y, iters, metrics, history) -> "SolveReport":
        p = self.problem
        Y_blocks = self.layout.to_blocks(Y)
        pobj = p.objective(x)
        dobj = dualize(p).objective(Y_blocks)
        gap = pobj - dobj if p.sense is Sense.MIN else dobj - pobj
        if status is SolveStatus.OPTIMAL:
            LOGGER.info("Solver stopped: [%s] after [%s] iterations with objective [%.10g]", status, iters, pobj)
        else:
            LOGGER.warning("Solver stopped: [%s] after [%s] iterations (pobj [%.6g], dobj [%.6g])",
                           status, iters, pobj, dobj)
        return SolveReport(status=status, x=x, Y=Y_blocks, pobj=pobj, dobj=dobj, gap=gap, iters=iters,
                           rel_gap=metrics["rel_gap"], primal_residual=metrics["primal_residual"],
                           dual_residual=metrics["dual_residual"], gap_history=history)


def _solve_fixed(p: PrimalSdp) -> "SolveReport":
    """
    Program without variables: optimal when ``-B`` is PSD, with the zero dual matrix.
    """
    Y = BlockMatrix.zeros(p.structure)
    lowest = (-p.B).min_eigenvalue()
    status = SolveStatus.OPTIMAL if lowest >= 0 else SolveStatus.PRIMAL_INFEASIBLE_SUSPECTED
    return SolveReport(status=status, x=np.zeros(0), Y=Y, pobj=p.offset, dobj=p.offset, gap=0.0, iters=0,
                       rel_gap=0.0, primal_residual=max(0.0, -lowest), dual_residual=0.0, gap_history=[])


def solve(p: PrimalSdp, opts: Optional[SolveOptions] = None) -> SolveReport:
    """
    Solves a primal-form program and its dual.

    With ``opts.warm_start``, :func:`phase1` first looks for a strictly feasible start; a positive margin reports
    the program as suspected infeasible without further iterations.
    """
    opts = opts or SolveOptions()
    if p.n == 0:
        return _solve_fixed(p)
    solver = InteriorPointSolver(p, opts)
    x0 = None
    if opts.warm_start:
        x0, margin = phase1(p, opts)
        if margin >= opts.feas_tol:
            LOGGER.warning("Phase 1 margin [%.6g] indicates an infeasible program", margin)
            return SolveReport(status=SolveStatus.PRIMAL_INFEASIBLE_SUSPECTED, x=x0, pobj=p.objective(x0), iters=0,
                               primal_residual=margin, gap_history=[])
        if margin >= 0:
            x0 = None
    return solver.run(x0)


def solve_dual(d: DualSdp, opts: Optional[SolveOptions] = None) -> SolveReport:
    """
    Solves a dual-form program through the primal program it is the dual of.

    The ``Y`` of the report solves ``d`` and ``dobj`` is its objective value.
    """
    return solve(d.partner(), opts)


def _phase1_problem(p: PrimalSdp) -> PrimalSdp:
    """
    ``min t  s.t.  sum_i x_i A_i - B + t I >= 0``, ``x_i + t >= 0`` for sign-constrained variables,
    ``t >= -1`` and ``|x_i| <= R``, over ``(x, t)``.
    """
    n = p.n
    radius = PHASE1_RADIUS * max(1.0, p.B.norm())
    signs = sorted(p.nonneg_vars)
    extra = len(signs) + 1 + 2 * n

    def bordered(mat: BlockMatrix, values: List[float]) -> BlockMatrix:
        return BlockMatrix(list(mat.blocks) + [[[value]] for value in values])

    A = []
    for i in range(n):
        values = [1.0 if j == i else 0.0 for j in signs] + [0.0]
        values += [1.0 if j == i else 0.0 for j in range(n)] + [-1.0 if j == i else 0.0 for j in range(n)]
        A.append(bordered(p.A[i], values))
    A.append(bordered(BlockMatrix.identity(p.structure), [1.0] * len(signs) + [1.0] + [0.0] * (2 * n)))
    B = bordered(p.B, [0.0] * len(signs) + [PHASE1_BOUND] + [-radius] * (2 * n))
    c = np.zeros(n + 1)
    c[-1] = 1.0
    LOGGER.debug("Phase 1 program with [%s] extra rows", extra)
    return PrimalSdp(c, A, B)


def _strict_margin(p: PrimalSdp, x: np.ndarray) -> float:
    lowest = p.slack(x).min_eigenvalue()
    for i in p.nonneg_vars:
        lowest = min(lowest, float(x[i]))
    return lowest


def phase1(p: PrimalSdp, opts: Optional[SolveOptions] = None) -> Tuple[np.ndarray, float]:
    """
    Looks for a strictly feasible point of ``p``.

    Returns ``(x0, margin)``: a negative margin is minus the smallest eigenvalue of the slack of ``x0`` (so ``x0``
    is strictly feasible), a nonnegative margin is the optimal shift ``t`` of the auxiliary program and the
    program is suspected infeasible when it exceeds the feasibility tolerance.
    """
    opts = opts or SolveOptions()
    aux = _phase1_problem(p)

    def found(z: np.ndarray) -> bool:
        return z[-1] < 0 and _strict_margin(p, z[:-1]) > 0

    report = InteriorPointSolver(aux, SolveOptions(tol=opts.tol, feas_tol=opts.feas_tol, max_iter=opts.max_iter)).run(
        stop=found
    )
    x0 = np.asarray(report.x[:-1], dtype=float)
    lowest = _strict_margin(p, x0)
    if lowest > 0:
        margin = -lowest
    else:
        margin = max(0.0, float(report.x[-1]))
    LOGGER.info("Phase 1 finished with margin [%.6g] after [%s] iterations", margin, report.iters)
    return x0, margin


def _eigen_program(X: SymMatrix, lowest: bool) -> PrimalSdp:
    n = X.order
    check_size("order", n, MAX_EIGEN_ORDER)
    if lowest:
        # max{t : X - t I >= 0}
        return PrimalSdp([1.0], [-np.eye(n)], -np.asarray(X), sense=Sense.MAX)
    # min{t : t I - X >= 0}
    return PrimalSdp([1.0], [np.eye(n)], np.asarray(X))


def _eigen_value(X, lowest: bool, opts: Optional[SolveOptions]) -> float:
    report = solve(_eigen_program(sym_matrix(X), lowest), opts)
    if not report.converged:
        raise NumericalTrouble(f"Eigenvalue program was not solved, status [{report.status}]")
    return float(report.pobj)


def min_eigen_via_sdp(X, opts: Optional[SolveOptions] = None) -> float:
    return _eigen_value(X, True, opts)


def max_eigen_via_sdp(X, opts: Optional[SolveOptions] = None) -> float:
    return _eigen_value(X, False, opts)
