"""
Quadratic convex reformulation of equality constrained 0-1 quadratic programs.

The objective ``x^T Q x + c^T x`` is perturbed with multiples of ``x_i^2 - x_i`` and of redundant quadratic
equalities, all vanishing on the feasible binary points, so that it becomes convex. The best perturbation is read
from the dual of the moment relaxation over ``Z = [[1, x^T], [x, X]]``; the convex objective then gives the node
bounds of an exact branch and bound.
"""
import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import linprog, minimize

from sdpkit.impl import (
    Base,
    DegenerateInput,
    DimensionMismatch,
    InfeasibleModel,
    NotConvexified,
    NotPositiveOnNullspace,
    NotPsdOnNullspace,
    NumericalTrouble,
    check_size,
)
from sdpkit.schemas import BnbOptions, SchemeOption, SolveOptions
from sdpkit.sdpmodel import BlockMatrix, DualSdp, Sense, svec
from sdpkit.sdpsolve import SolveReport, solve_dual
from sdpkit.symcore import SymMatrix, lowest_psd_shift, sym_matrix
from sdpkit.typedefs import MatrixLike, VectorLike
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_LIFTED_ORDER = 40
MAX_BNB_ORDER = 25
MAX_BRUTE_ORDER = 22
BRUTE_CHUNK_BITS = 16
FEASIBILITY_TOL = 1e-9
NULLSPACE_TOL = 1e-9
DEPENDENT_ROW_TOL = 1e-9
EXTRACTION_GAP = 1e-5
FLOOR_LIMIT = 1e-5
FLOOR_MARGIN = 1e-7
PRUNE_TOL = 1e-9
LAMBDA_TOL = 1e-7

FALLBACK_SCHEMES = {
    SchemeOption.R1: (SchemeOption.R1, SchemeOption.R2, SchemeOption.NONE),
    SchemeOption.R2: (SchemeOption.R2, SchemeOption.NONE),
    SchemeOption.NONE: (SchemeOption.NONE, ),
}


@dataclass
class BinQp:
    """
    ``min x^T Q x + c^T x  s.t.  A x = b``, ``x`` binary.

    ``A`` must have full row rank; a program without constraints has ``A`` of shape ``(0, n)``.
    """

    Q: SymMatrix
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.Q = sym_matrix(self.Q)
        n = self.Q.order
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if len(self.c) != n:
            raise DimensionMismatch(f"Linear term has [{len(self.c)}] entries for [{n}] variables")
        if len(self.b) != self.A.shape[0]:
            raise DimensionMismatch(f"Got [{self.A.shape[0]}] constraint rows for [{len(self.b)}] right-hand sides")
        if self.p and np.linalg.matrix_rank(self.A) < self.p:
            raise DegenerateInput(f"Constraint matrix of [{self.p}] rows does not have full row rank")

    @property
    def n(self) -> int:
        return self.Q.order

    @property
    def p(self) -> int:
        return self.A.shape[0]

    def objective(self, x: VectorLike) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ np.asarray(self.Q) @ x + self.c @ x)

    def is_feasible(self, x: VectorLike, tol: float = FEASIBILITY_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        binary = bool(np.all((x == 0.0) | (x == 1.0)))
        return binary and (not self.p or float(np.max(np.abs(self.A @ x - self.b))) <= tol)


class QuadConstraint(NamedTuple):
    """
    ``x^T B x + d^T x + e = 0``.
    """
    B: np.ndarray
    d: np.ndarray
    e: float

    def value(self, x: VectorLike) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.B @ x + self.d @ x + self.e)


class ConvexifiedQp(Base):
    """
    Convex objective ``x^T Qc x + cc^T x + k`` equal to the original one on every feasible binary point.

    ``mu`` holds the multipliers of ``x_i^2 = x_i``, ``lam`` those of the redundant constraints of the scheme
    (shape ``(p, n)`` for products, one entry for the aggregated constraint) and ``floor`` the diagonal shift added
    to absorb a slightly indefinite ``Qc``.
    """

    __fields__ = ("Qc", "cc", "k", "mu", "lam", "floor", "scheme")

    def value(self, x: VectorLike) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ np.asarray(self.Qc) @ x + np.asarray(self.cc) @ x + self.k)


class BnbReport(Base):
    __fields__ = ("best_x", "best_obj", "nodes", "root_bound", "sdp_bound", "scheme")


def redundant_r1(A: MatrixLike, b: VectorLike) -> QuadConstraint:
    """
    Single aggregated constraint ``|A x - b|^2 = 0``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    return QuadConstraint(A.T @ A, -2.0 * A.T @ b, float(b @ b))


def redundant_r2(A: MatrixLike, b: VectorLike) -> List[QuadConstraint]:
    """
    Products ``x_j (a_i^T x - b_i) = 0`` for every row ``i`` and variable ``j``, rows first.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    p, n = len(b), A.shape[1]
    constraints = []
    for i, j in itertools.product(range(p), range(n)):
        unit = np.zeros(n)
        unit[j] = 1.0
        B = (np.outer(unit, A[i]) + np.outer(A[i], unit)) / 2.0
        constraints.append(QuadConstraint(B, -b[i] * unit, 0.0))
    return constraints


def _lift(B: np.ndarray, d: np.ndarray, e: float) -> np.ndarray:
    """
    Matrix ``L`` with ``L.Z = B.X + d^T x + e``.
    """
    n = len(d)
    L = np.zeros((n + 1, n + 1))
    L[0, 0] = e
    L[0, 1:] = L[1:, 0] = d / 2.0
    L[1:, 1:] = B
    return L


class _MomentRows(NamedTuple):
    mats: List[np.ndarray]
    rhs: List[float]
    diag: List[int]
    redundant: List[Optional[int]]
    box: List[int]


def _independent(candidate: np.ndarray, basis: List[np.ndarray]) -> bool:
    vec = svec(BlockMatrix([candidate]))
    norm = float(np.linalg.norm(vec))
    for q in basis:
        vec = vec - (q @ vec) * q
    rest = float(np.linalg.norm(vec))
    if rest <= DEPENDENT_ROW_TOL * max(1.0, norm):
        return False
    basis.append(vec / rest)
    return True


def _moment_rows(q: BinQp, scheme: SchemeOption, box: bool) -> _MomentRows:
    """
    Rows in order: ``Z_00 = 1``, ``A x = b``, ``X_ii = x_i``, the lifted redundant constraints, then the box rows.

    Lifted redundant constraints that are combinations of earlier rows are dropped (their entry in ``redundant``
    is ``None``), which keeps the constraint matrices independent.
    """
    n = q.n
    mats = []
    rhs = []
    basis = []

    def add(mat: np.ndarray, value: float, optional: bool = False) -> Optional[int]:
        if not _independent(mat, basis):
            if optional:
                return None
            raise DegenerateInput("Moment relaxation rows are linearly dependent")
        mats.append(mat)
        rhs.append(value)
        return len(mats) - 1

    top = np.zeros((n + 1, n + 1))
    top[0, 0] = 1.0
    add(top, 1.0)
    for i in range(q.p):
        add(_lift(np.zeros((n, n)), q.A[i], 0.0), float(q.b[i]))
    diag = []
    for i in range(n):
        unit = np.zeros(n)
        unit[i] = 1.0
        diag.append(add(_lift(np.diag(unit), -unit, 0.0), 0.0))
    if scheme is SchemeOption.R1 and q.p:
        constraints = [redundant_r1(q.A, q.b)]
    elif scheme is SchemeOption.R2:
        constraints = redundant_r2(q.A, q.b)
    else:
        constraints = []
    redundant = [add(_lift(*quad), 0.0, optional=True) for quad in constraints]
    box_rows = []
    if box:
        count = len(mats)
        for i in range(n):
            upper = np.zeros((n + 1, n + 1))
            upper[0, i + 1] = upper[i + 1, 0] = 0.5
            mats.extend([upper, -upper])
            rhs.extend([1.0, 0.0])
        box_rows = list(range(count, len(mats)))
    dropped = sum(index is None for index in redundant)
    if dropped:
        LOGGER.debug("Dropped [%s] dependent redundant rows of scheme [%s]", dropped, scheme)
    return _MomentRows(mats, rhs, diag, redundant, box_rows)


def build_qcr_sdp(q: BinQp, scheme: SchemeOption = SchemeOption.R2, box: bool = False) -> DualSdp:
    """
    Moment relaxation ``min [[0, c^T/2], [c/2, Q]].Z`` over ``Z >= 0`` with ``Z_00 = 1``, ``A x = b``,
    ``X_ii = x_i`` and the lifted redundant constraints of ``scheme``; ``box`` adds ``0 <= x_i <= 1``.
    """
    check_size("lifted order", q.n + 1, MAX_LIFTED_ORDER)
    scheme = SchemeOption(str(scheme))
    rows = _moment_rows(q, scheme, box)
    objective = _lift(np.asarray(q.Q), q.c, 0.0)
    LOGGER.debug("Moment relaxation of order [%s] with [%s] rows", q.n + 1, len(rows.mats))
    return DualSdp(objective, rows.mats, rows.rhs, inequality_rows=frozenset(rows.box), sense=Sense.MIN)


def extract_convexification(q: BinQp, dual: SolveReport,
                            scheme: SchemeOption = SchemeOption.R2) -> ConvexifiedQp:
    """
    Reads the convex objective from the multipliers ``y`` of a solved (non-boxed) moment relaxation.

    With ``M(y) = B + sum_k y_k A_k`` positive semidefinite, ``(1, x) M(y) (1, x)^T - c^T y`` is convex and
    differs from the objective by ``sum_k y_k (A_k.zz^T - c_k)``, which vanishes on the feasible binary points.

    :raises NotConvexified: when the relaxation is not solved closely enough or the Hessian is too indefinite.
    """
    scheme = SchemeOption(str(scheme))
    rows = _moment_rows(q, scheme, box=False)
    y = np.asarray(dual.x, dtype=float) if dual.x is not None else np.zeros(0)
    if len(y) != len(rows.mats):
        raise DimensionMismatch(f"Got [{len(y)}] multipliers for [{len(rows.mats)}] relaxation rows")
    rel_gap = dual.rel_gap if dual.rel_gap is not None else math.inf
    if not dual.converged and rel_gap > EXTRACTION_GAP:
        raise NotConvexified(f"Relaxation stopped with status [{dual.status}] and relative gap [{rel_gap:.3g}]")
    M = _lift(np.asarray(q.Q), q.c, 0.0) + sum(value * mat for value, mat in zip(y, rows.mats))
    Qc = M[1:, 1:]
    cc = 2.0 * M[1:, 0]
    k = float(M[0, 0] - y @ np.asarray(rows.rhs))
    lowest = float(linalg.eigvalsh(Qc)[0]) if q.n else 0.0
    floor = 0.0
    if lowest < 0.0:
        if lowest < -FLOOR_LIMIT * max(1.0, float(np.linalg.norm(Qc))):
            raise NotConvexified(f"Convexified Hessian has eigenvalue [{lowest:.3g}]")
        # x_i^2 = x_i on binaries
        floor = FLOOR_MARGIN - lowest
        Qc = Qc + floor * np.eye(q.n)
        cc = cc - floor
        LOGGER.warning("Convexified Hessian floored by [%.3g]", floor)
    if scheme is SchemeOption.R2:
        lam = np.array([y[i] if i is not None else 0.0 for i in rows.redundant]).reshape(q.p, q.n)
    else:
        lam = np.array([y[i] if i is not None else 0.0 for i in rows.redundant])
    return ConvexifiedQp(Qc=SymMatrix(Qc, tol=1e-9), cc=cc, k=k, mu=y[rows.diag], lam=lam, floor=floor,
                         scheme=scheme)


def _nullspace(A: np.ndarray, n: int) -> np.ndarray:
    if not A.shape[0]:
        return np.eye(n)
    return linalg.null_space(A)


def convexify_lambda(Q: MatrixLike, A: MatrixLike, b: VectorLike, S: MatrixLike) -> float:
    """
    Smallest ``l >= 0`` (up to bisection) with ``Q + l A^T S A`` positive semidefinite.

    :raises NotPositiveOnNullspace: when ``Q`` is not positive definite on the null space of ``A``.
    """
    Q = sym_matrix(Q)
    n = Q.order
    A = np.asarray(A, dtype=float).reshape(-1, n)
    S = sym_matrix(S)
    if S.order != A.shape[0]:
        raise DimensionMismatch(f"Weight of order [{S.order}] for [{A.shape[0]}] constraint rows")
    N = _nullspace(A, n)
    if N.shape[1]:
        projected = linalg.eigvalsh(N.T @ np.asarray(Q) @ N)[0]
        if projected <= NULLSPACE_TOL * max(1.0, float(np.linalg.norm(Q))):
            raise NotPositiveOnNullspace(f"Smallest eigenvalue on the null space is [{projected:.3g}]")
    penalty = A.T @ np.asarray(S) @ A

    def shifted(value: float) -> np.ndarray:
        return np.asarray(Q) + value * penalty

    hi = 1.0
    while linalg.eigvalsh(shifted(hi))[0] < -1e-8:
        hi *= 2.0
        if hi > 1e12:
            raise NumericalTrouble("No penalty weight found below [1e12]")
    return lowest_psd_shift(shifted, 0.0, hi, tol=LAMBDA_TOL, psd_tol=1e-8)


def convexify_W(Q: MatrixLike, A: MatrixLike) -> np.ndarray:
    """
    Matrix ``W`` (``n x p``) with ``Q + A^T W^T + W A`` positive semidefinite.

    With ``A^T = U R``, the columns ``v_i`` of ``V = W R^T`` are built one orthonormal direction ``u_i`` at a time:
    ``v_i = -(Q + P_i^T) u_i + z u_i`` with ``z = u_i^T Q u_i / 2`` and ``P_i = sum_{k<i} v_k u_k^T``. Each step
    moves ``u_i`` into the null space of the updated matrix, which ends as ``N N^T Q N N^T`` for ``N`` an orthonormal
    basis of the null space of ``A``.

    :raises DegenerateInput: when ``A`` does not have full row rank.
    :raises NotPsdOnNullspace: when ``Q`` is not positive semidefinite on the null space of ``A``.
    """
    Q = np.asarray(sym_matrix(Q))
    n = Q.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n)
    p = A.shape[0]
    if p and np.linalg.matrix_rank(A) < p:
        raise DegenerateInput(f"Constraint matrix of [{p}] rows does not have full row rank")
    N = _nullspace(A, n)
    if N.shape[1]:
        projected = linalg.eigvalsh(N.T @ Q @ N)[0]
        if projected < -NULLSPACE_TOL * max(1.0, float(np.linalg.norm(Q))):
            raise NotPsdOnNullspace(f"Smallest eigenvalue on the null space is [{projected:.3g}]")
    if not p:
        return np.zeros((n, 0))
    U, R = linalg.qr(A.T, mode="economic")
    V = np.zeros((n, p))
    for i in range(p):
        u = U[:, i]
        P = V[:, :i] @ U[:, :i].T
        z = 0.5 * float(u @ Q @ u)
        V[:, i] = -(Q + P.T) @ u + z * u
    return linalg.solve_triangular(R, V.T, lower=False).T


def _linearized_bound(q: BinQp, conv: ConvexifiedQp, x: np.ndarray, free: List[int], rhs: np.ndarray) -> float:
    """
    ``f(x) + min grad f(x)^T (t - x)`` over the free box-and-affine node set, below the node minimum for any ``x``.
    """
    grad = (2.0 * np.asarray(conv.Qc) @ x + np.asarray(conv.cc))[free]
    lp = linprog(grad, A_eq=q.A[:, free] if q.p else None, b_eq=rhs if q.p else None,
                 bounds=[(0.0, 1.0)] * len(free), method="highs")
    if not lp.success:
        raise NumericalTrouble(f"Node bound program failed: {lp.message}")
    return float(conv.value(x) + grad @ (lp.x - x[free]))


def _node_relaxation(q: BinQp, conv: ConvexifiedQp, fixed: Dict[int, int],
                     iterations: int = 500) -> Optional[Tuple[float, np.ndarray]]:
    """
    Lower bound of the convex objective over ``A x = b``, ``0 <= x <= 1`` with the ``fixed`` coordinates pinned,
    and the approximate minimizer it was computed at.

    The minimizer comes from SLSQP, the bound from the linearization at that point, so an early stop of the local
    solver only weakens the bound. Returns ``None`` when the node admits no point.
    """
    n = q.n
    free = [j for j in range(n) if j not in fixed]
    base = np.zeros(n)
    for j, value in fixed.items():
        base[j] = value
    rhs = q.b - q.A @ base
    if not free:
        if q.p and float(np.max(np.abs(rhs))) > FEASIBILITY_TOL:
            return None
        return conv.value(base), base
    A_free = q.A[:, free]
    lp = linprog(np.zeros(len(free)), A_eq=A_free if q.p else None, b_eq=rhs if q.p else None,
                 bounds=[(0.0, 1.0)] * len(free), method="highs")
    if lp.status == 2:
        return None
    if not lp.success:
        raise NumericalTrouble(f"Node feasibility check failed: {lp.message}")
    Qc = np.asarray(conv.Qc)
    cc = np.asarray(conv.cc)

    def embed(t: np.ndarray) -> np.ndarray:
        x = base.copy()
        x[free] = t
        return x

    def fun(t: np.ndarray) -> float:
        return conv.value(embed(t))

    def jac(t: np.ndarray) -> np.ndarray:
        return (2.0 * Qc @ embed(t) + cc)[free]

    x0 = np.clip(lp.x, 0.0, 1.0)
    constraints = []
    if q.p and np.any(A_free):
        P = linalg.orth(A_free.T)
        target = P.T @ x0
        constraints.append({"type": "eq", "fun": lambda t: P.T @ t - target, "jac": lambda t: P.T})
    res = minimize(fun, x0, jac=jac, method="SLSQP", bounds=[(0.0, 1.0)] * len(free), constraints=constraints,
                   options={"ftol": 1e-12, "maxiter": iterations})
    if not res.success:
        LOGGER.warning("Node relaxation did not converge ([%s]), bounding at its last point", res.message)
    x = embed(np.clip(res.x, 0.0, 1.0))
    bound = _linearized_bound(q, conv, x, free, rhs)
    if bound < float(res.fun) - 1e-6 * max(1.0, abs(float(res.fun))):
        LOGGER.debug("Node bound [%.8g] below the local minimum [%.8g] after [%s] iterations",
                     bound, res.fun, res.nit)
    return bound, x


def continuous_bound(q: BinQp, conv: ConvexifiedQp, fixed: Optional[Dict[int, int]] = None) -> float:
    """
    Lower bound of the binary program over the node ``fixed``, ``inf`` when the node is empty.
    """
    found = _node_relaxation(q, conv, dict(fixed or {}))
    return math.inf if found is None else found[0]


def branch_and_bound(q: BinQp, conv: ConvexifiedQp, opts: Optional[BnbOptions] = None) -> BnbReport:
    """
    Depth-first branch and bound on the most fractional coordinate (lowest index on ties), exploring first the
    child closest to the relaxed value.

    A node whose relaxed point is an integral feasible point offers it as incumbent and is only closed once its
    bound reaches that value; otherwise it is split on its lowest free coordinate.

    :raises InfeasibleModel: when no binary point satisfies the constraints.
    """
    check_size("variables", q.n, MAX_BNB_ORDER)
    opts = opts or BnbOptions()
    best_x = None
    best_obj = math.inf
    root_bound = None
    nodes = 0
    stack = [({}, -math.inf)]  # type: List[Tuple[Dict[int, int], float]]
    while stack:
        fixed, parent_bound = stack.pop()
        if parent_bound >= best_obj - PRUNE_TOL:
            continue
        nodes += 1
        if nodes > opts.max_nodes:
            raise NumericalTrouble(f"Branch and bound exceeded [{opts.max_nodes}] nodes")
        found = _node_relaxation(q, conv, fixed, opts.node_iterations)
        if found is None:
            if root_bound is None:
                raise InfeasibleModel("No binary point satisfies the constraints")
            continue
        bound, x = found
        if root_bound is None:
            root_bound = bound
        LOGGER.debug("Node [%s] with [%s] fixed variables has bound [%.8g]", nodes, len(fixed), bound)
        if bound >= best_obj - PRUNE_TOL:
            continue
        free = np.array([j not in fixed for j in range(q.n)])
        distance = np.where(free, np.minimum(x, 1.0 - x), 0.0)
        if np.all(distance <= opts.integrality_tol):
            candidate = np.round(x)
            if q.is_feasible(candidate):
                value = q.objective(candidate)
                if value < best_obj:
                    best_x, best_obj = candidate, value
                    LOGGER.debug("New incumbent [%.8g] at node [%s]", value, nodes)
                if bound >= best_obj - PRUNE_TOL or not np.any(free):
                    continue
            if not np.any(free):
                continue
            distance = np.where(free, np.abs(x - candidate) + 0.5, -1.0)
        j = int(np.argmax(distance))
        near = int(round(float(x[j])))
        stack.append(({**fixed, j: 1 - near}, bound))
        stack.append(({**fixed, j: near}, bound))
    if best_x is None:
        raise InfeasibleModel("No binary point satisfies the constraints")
    LOGGER.info("Branch and bound finished with [%s] nodes, optimum [%.10g]", nodes, best_obj)
    return BnbReport(best_x=best_x.astype(int), best_obj=best_obj, nodes=nodes, root_bound=root_bound,
                     sdp_bound=None, scheme=conv.scheme)


def brute_force(q: BinQp) -> Tuple[np.ndarray, float]:
    """
    Exhaustive minimum over the binary points in increasing binary order (``x_1`` most significant).

    :raises InfeasibleModel: when no binary point satisfies the constraints.
    """
    n = q.n
    check_size("variables", n, MAX_BRUTE_ORDER)
    shifts = np.arange(n - 1, -1, -1)
    Q = np.asarray(q.Q)
    best_x = None
    best_obj = math.inf
    chunk = 1 << min(n, BRUTE_CHUNK_BITS)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n))
        X = ((codes[:, None] >> shifts) & 1).astype(float)
        values = np.einsum("ki,ij,kj->k", X, Q, X) + X @ q.c
        if q.p:
            feasible = np.max(np.abs(X @ q.A.T - q.b), axis=1) <= FEASIBILITY_TOL
            values = np.where(feasible, values, math.inf)
        k = int(np.argmin(values))
        if values[k] < best_obj:
            best_x, best_obj = X[k].astype(int), float(values[k])
    if best_x is None:
        raise InfeasibleModel("No binary point satisfies the constraints")
    return best_x, best_obj


def _convexify(q: BinQp, scheme: SchemeOption, opts: SolveOptions) -> Tuple[SolveReport, ConvexifiedQp]:
    program = build_qcr_sdp(q, scheme)
    report = solve_dual(program, opts)
    try:
        return report, extract_convexification(q, report, scheme)
    except NotConvexified as exc:
        LOGGER.warning("Convexification failed (%s), retrying with a tighter tolerance", exc)
    tighter = opts.copy(update={"tol": opts.tol / 100.0, "feas_tol": opts.feas_tol / 100.0,
                                "max_iter": max(opts.max_iter, 400)})
    report = solve_dual(program, tighter)
    return report, extract_convexification(q, report, scheme)


def qcr_solve(q: BinQp,
              scheme: SchemeOption = SchemeOption.R2,
              opts: Optional[SolveOptions] = None,
              bnb: Optional[BnbOptions] = None,
              ) -> BnbReport:
    """
    Solves the moment relaxation, convexifies the objective from its multipliers and runs the branch and bound.

    An extraction failure is retried once with a hundred times tighter solver tolerance. When the relaxation of the
    requested scheme still cannot be convexified, the schemes of ``FALLBACK_SCHEMES`` are tried in turn and the
    report names the one that was used.
    """
    opts = opts or SolveOptions()
    scheme = SchemeOption(str(scheme))
    failure = None
    for candidate in FALLBACK_SCHEMES[scheme]:
        if failure is not None:
            LOGGER.warning("Falling back to scheme [%s]: %s", candidate, failure)
        try:
            report, conv = _convexify(q, candidate, opts)
            break
        except NotConvexified as exc:
            failure = NotConvexified(f"scheme [{candidate}] failed, {exc}")
    else:
        raise failure
    result = branch_and_bound(q, conv, bnb)
    result.sdp_bound = report.dobj
    LOGGER.info("Relaxation bound [%.8g], root bound [%.8g], optimum [%.8g]",
                report.dobj, result.root_bound, result.best_obj)
    return result
