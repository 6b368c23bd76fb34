"""
Primal and dual semidefinite programs over block-diagonal matrices.

The primal form is ``min/max c.x  s.t.  sum_i x_i A_i - B >= 0`` (PSD) with optional sign constraints on some
``x_i``, the dual form is ``max/min B.Y  s.t.  A_i.Y = c_i`` (``<=`` for inequality rows) with ``Y >= 0`` (PSD).
Both carry a constant ``offset`` added to their objective so that conversions keep objective values identical.
"""
import math
from dataclasses import dataclass
from enum import auto
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from sdpkit.impl import (
    Base,
    DependentConstraintMatrices,
    DimensionMismatch,
    EnumNameHyphenCase,
    InfeasibleArgument,
    InfeasibleLinearSystem,
    VariableCountMismatch,
)
from sdpkit.symcore import SymMatrix, gram_factor, sym_matrix
from sdpkit.typedefs import MatrixLike, VectorLike
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

RANK_RTOL = 1e-10
FEASIBILITY_TOL = 1e-7


class Sense(EnumNameHyphenCase):
    MIN = auto()
    MAX = auto()

    @property
    def flipped(self) -> "Sense":
        return Sense.MAX if self is Sense.MIN else Sense.MIN


class BlockMatrix(object):
    """
    Block-diagonal symmetric matrix, stored as its list of diagonal blocks.

    A block of order 1 encodes a scalar (linear) constraint.
    """

    __slots__ = ("blocks", )

    def __init__(self, blocks: Iterable[MatrixLike]):
        self.blocks = tuple(sym_matrix(block) for block in blocks)  # type: Tuple[SymMatrix, ...]

    def __repr__(self):
        return f"BlockMatrix(structure={self.structure})"

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, index: int) -> SymMatrix:
        return self.blocks[index]

    @property
    def structure(self) -> Tuple[int, ...]:
        return tuple(block.order for block in self.blocks)

    @property
    def order(self) -> int:
        return sum(self.structure)

    def _check_structure(self, other: "BlockMatrix") -> None:
        if self.structure != other.structure:
            raise DimensionMismatch(f"Block structures differ: [{self.structure}] and [{other.structure}]")

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_structure(other)
        return BlockMatrix(a + b for a, b in zip(self.blocks, other.blocks))

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_structure(other)
        return BlockMatrix(a - b for a, b in zip(self.blocks, other.blocks))

    def __mul__(self, scalar: float) -> "BlockMatrix":
        return BlockMatrix(float(scalar) * block for block in self.blocks)

    __rmul__ = __mul__

    def __neg__(self) -> "BlockMatrix":
        return self * -1.0

    def dot(self, other: "BlockMatrix") -> float:
        """
        Frobenius product over all blocks.
        """
        self._check_structure(other)
        return float(sum(np.sum(np.asarray(a) * np.asarray(b)) for a, b in zip(self.blocks, other.blocks)))

    def dense(self) -> np.ndarray:
        return linalg.block_diag(*[np.asarray(block) for block in self.blocks])

    def min_eigenvalue(self) -> float:
        return min(float(linalg.eigvalsh(np.asarray(block))[0]) for block in self.blocks)

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def allclose(self, other: "BlockMatrix", atol: float = 1e-9) -> bool:
        return self.structure == other.structure and all(
            np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks)
        )

    def json(self) -> List[List[List[float]]]:
        return [np.asarray(block).tolist() for block in self.blocks]

    @classmethod
    def zeros(cls, structure: Sequence[int]) -> "BlockMatrix":
        return cls(np.zeros((size, size)) for size in structure)

    @classmethod
    def identity(cls, structure: Sequence[int]) -> "BlockMatrix":
        return cls(np.eye(size) for size in structure)

    @classmethod
    def unit(cls, structure: Sequence[int], block: int, i: int, j: int, value: float = 1.0) -> "BlockMatrix":
        """
        Block matrix with ``value`` at ``(i, j)`` and ``(j, i)`` of the given block (0-indexed), zero elsewhere.
        """
        mats = [np.zeros((size, size)) for size in structure]
        mats[block][i, j] = value
        mats[block][j, i] = value
        return cls(mats)

    @classmethod
    def from_dense(cls, matrix: MatrixLike, structure: Sequence[int]) -> "BlockMatrix":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (sum(structure), sum(structure)):
            raise DimensionMismatch(f"Matrix of shape [{matrix.shape}] does not match structure [{structure}]")
        blocks = []
        start = 0
        for size in structure:
            blocks.append(matrix[start:start + size, start:start + size])
            start += size
        return cls(blocks)


def as_block(value) -> BlockMatrix:
    if isinstance(value, BlockMatrix):
        return value
    return BlockMatrix([value])


def _check_problem(A: Sequence[BlockMatrix], B: BlockMatrix, c: np.ndarray, indices: FrozenSet[int]) -> None:
    if len(A) != len(c):
        raise VariableCountMismatch(f"Got [{len(A)}] constraint matrices for [{len(c)}] objective coefficients")
    for i, mat in enumerate(A):
        if mat.structure != B.structure:
            raise DimensionMismatch(f"Matrix [{i}] has block structure [{mat.structure}], expected [{B.structure}]")
    for index in indices:
        if not 0 <= index < len(c):
            raise DimensionMismatch(f"Index [{index}] out of range for [{len(c)}] variables")


@dataclass
class PrimalSdp:
    """
    ``min (or max) c.x + offset  s.t.  sum_i x_i A_i - B >= 0``, ``x_i >= 0`` for ``i`` in ``nonneg_vars``.

    Variable indices are 0-based.
    """

    c: np.ndarray
    A: List[BlockMatrix]
    B: BlockMatrix
    nonneg_vars: FrozenSet[int] = frozenset()
    sense: Sense = Sense.MIN
    offset: float = 0.0

    def __post_init__(self):
        self.B = as_block(self.B)
        self.A = [as_block(mat) for mat in self.A]
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.nonneg_vars = frozenset(int(i) for i in self.nonneg_vars)
        self.sense = Sense(str(self.sense))
        self.offset = float(self.offset)
        _check_problem(self.A, self.B, self.c, self.nonneg_vars)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def structure(self) -> Tuple[int, ...]:
        return self.B.structure

    def slack(self, x: VectorLike) -> BlockMatrix:
        x = self._vector(x)
        total = -self.B
        for value, mat in zip(x, self.A):
            if value != 0.0:
                total = total + mat * value
        return total

    def objective(self, x: VectorLike) -> float:
        return float(self.c @ self._vector(x)) + self.offset

    def residuals(self, x: VectorLike) -> Dict[str, float]:
        """
        Infeasibility measures of ``x``: most negative slack eigenvalue and sign-constraint violation.
        """
        x = self._vector(x)
        nonneg = [x[i] for i in self.nonneg_vars]
        return {
            "min_eigenvalue": self.slack(x).min_eigenvalue(),
            "nonneg_violation": max([0.0] + [-value for value in nonneg]),
        }

    def is_feasible(self, x: VectorLike, tol: float = FEASIBILITY_TOL) -> bool:
        res = self.residuals(x)
        return res["min_eigenvalue"] >= -tol and res["nonneg_violation"] <= tol

    def _vector(self, x: VectorLike) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if len(x) != self.n:
            raise DimensionMismatch(f"Expected [{self.n}] variables, got [{len(x)}]")
        return x


@dataclass
class DualSdp:
    """
    ``max (or min) B.Y + offset  s.t.  A_i.Y = c_i`` (``A_i.Y <= c_i`` for ``inequality_rows``), ``Y >= 0``.

    Row indices are 0-based.
    """

    B: BlockMatrix
    A: List[BlockMatrix]
    c: np.ndarray
    inequality_rows: FrozenSet[int] = frozenset()
    sense: Sense = Sense.MAX
    offset: float = 0.0

    def __post_init__(self):
        self.B = as_block(self.B)
        self.A = [as_block(mat) for mat in self.A]
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.inequality_rows = frozenset(int(i) for i in self.inequality_rows)
        self.sense = Sense(str(self.sense))
        self.offset = float(self.offset)
        _check_problem(self.A, self.B, self.c, self.inequality_rows)

    @property
    def m(self) -> int:
        return len(self.c)

    @property
    def structure(self) -> Tuple[int, ...]:
        return self.B.structure

    def objective(self, Y: BlockMatrix) -> float:
        return self.B.dot(Y) + self.offset

    def residuals(self, Y: BlockMatrix) -> Dict[str, float]:
        """
        Infeasibility measures of ``Y``: equality residual, inequality violation and most negative eigenvalue.
        """
        values = np.array([mat.dot(Y) for mat in self.A]) - self.c
        equality = [abs(values[i]) for i in range(self.m) if i not in self.inequality_rows]
        inequality = [values[i] for i in self.inequality_rows]
        return {
            "equality": max([0.0] + equality),
            "inequality": max([0.0] + inequality),
            "min_eigenvalue": Y.min_eigenvalue(),
        }

    def is_feasible(self, Y: BlockMatrix, tol: float = FEASIBILITY_TOL) -> bool:
        res = self.residuals(Y)
        return res["equality"] <= tol and res["inequality"] <= tol and res["min_eigenvalue"] >= -tol

    def partner(self) -> PrimalSdp:
        """
        Primal program whose dual is this program (inverse of :func:`dualize`).
        """
        if self.sense is Sense.MAX:
            return PrimalSdp(self.c, self.A, self.B, self.inequality_rows, Sense.MIN, self.offset)
        return PrimalSdp(-self.c, self.A, -self.B, self.inequality_rows, Sense.MAX, self.offset)


class SdpSolution(Base):
    """
    Primal point, dual matrix and their objective values, any of which may be missing.
    """

    __fields__ = ("x", "Y", "pobj", "dobj")


def dualize(p: PrimalSdp) -> DualSdp:
    """
    Lagrangian dual: one equality row per free variable, one inequality row per sign-constrained variable.
    """
    if p.sense is Sense.MIN:
        return DualSdp(p.B, p.A, p.c, p.nonneg_vars, Sense.MAX, p.offset)
    return DualSdp(-p.B, p.A, -p.c, p.nonneg_vars, Sense.MIN, p.offset)


def svec(mat: BlockMatrix) -> np.ndarray:
    """
    Upper triangle of every block with off-diagonal entries scaled by ``sqrt(2)``, so that the Euclidean product
    of two vectors equals the Frobenius product of the matrices.
    """
    parts = []
    for block in mat.blocks:
        rows, cols = np.triu_indices(block.order)
        scale = np.where(rows == cols, 1.0, math.sqrt(2.0))
        parts.append(np.asarray(block)[rows, cols] * scale)
    return np.concatenate(parts) if parts else np.zeros(0)


def smat(vec: np.ndarray, structure: Sequence[int]) -> BlockMatrix:
    blocks = []
    start = 0
    for size in structure:
        rows, cols = np.triu_indices(size)
        count = len(rows)
        values = vec[start:start + count] / np.where(rows == cols, 1.0, math.sqrt(2.0))
        block = np.zeros((size, size))
        block[rows, cols] = values
        block[cols, rows] = values
        blocks.append(block)
        start += count
    return BlockMatrix(blocks)


def nullspace_basis(mats: Sequence[BlockMatrix], structure: Optional[Sequence[int]] = None) -> List[BlockMatrix]:
    """
    Orthonormal basis (under the Frobenius product) of the symmetric block matrices orthogonal to all ``mats``.
    """
    if structure is None:
        if not mats:
            raise ValueError("Structure is required when no matrix is provided")
        structure = mats[0].structure
    structure = tuple(structure)
    size = sum(k * (k + 1) // 2 for k in structure)
    if mats:
        M = np.vstack([svec(mat) for mat in mats])
        basis = linalg.null_space(M, rcond=RANK_RTOL)
    else:
        basis = np.eye(size)
    return [smat(basis[:, j], structure) for j in range(basis.shape[1])]


def _canonical_infeasible(sense: Sense) -> PrimalSdp:
    return PrimalSdp([0.0], [BlockMatrix([[[0.0]]])], BlockMatrix([[[1.0]]]), sense=sense)


def dual_to_primal_form(d: DualSdp, strict: bool = False) -> Tuple[PrimalSdp, float]:
    """
    Rewrites a dual-form program in primal form with the null-space construction ``Y = -B' + sum_j x'_j A'_j``.

    Inequality rows are first turned into equalities with a ``1 x 1`` slack block each. ``-B'`` is the
    minimum-norm solution of the equalities and the ``A'_j`` an orthonormal basis of their null space. The returned
    program keeps the sense of ``d`` and its objective carries ``origin_constant = -B.B'`` in its offset, so both
    programs report identical objective values on corresponding points.

    When the equalities have no solution, a canonical infeasible program is returned (or
    :class:`InfeasibleLinearSystem` is raised with ``strict``).
    """
    slack_rows = sorted(d.inequality_rows)
    structure = d.structure + (1, ) * len(slack_rows)

    def bordered(mat: BlockMatrix, row: Optional[int]) -> BlockMatrix:
        extra = [[[1.0 if row is not None and slack_rows[k] == row else 0.0]] for k in range(len(slack_rows))]
        return BlockMatrix(list(mat.blocks) + extra)

    A = [bordered(mat, i) for i, mat in enumerate(d.A)]
    B = bordered(d.B, None)
    size = sum(k * (k + 1) // 2 for k in structure)
    if A:
        M = np.vstack([svec(mat) for mat in A])
        y0 = linalg.lstsq(M, d.c)[0]
        mismatch = float(np.linalg.norm(M @ y0 - d.c))
    else:
        y0 = np.zeros(size)
        mismatch = 0.0
    if mismatch > 1e-9 * max(1.0, float(np.linalg.norm(d.c))):
        if strict:
            raise InfeasibleLinearSystem(f"Dual equality system has no solution (residual [{mismatch:.3g}])")
        LOGGER.warning("Dual equality system has no solution (residual [%s]), using canonical infeasible program",
                       mismatch)
        return _canonical_infeasible(d.sense), 0.0
    Y0 = smat(y0, structure)
    basis = nullspace_basis(A, structure)
    c = np.array([B.dot(mat) for mat in basis])
    origin_constant = B.dot(Y0)
    LOGGER.debug("Dual program of [%s] rows rewritten with [%s] primal variables", d.m, len(basis))
    return PrimalSdp(c, basis, -Y0, frozenset(), d.sense, origin_constant + d.offset), origin_constant


def _vectorize_plain(mat: BlockMatrix) -> np.ndarray:
    """
    Unscaled vectorization, per block: diagonal entries first, then off-diagonal upper entries row by row.
    """
    parts = []
    for block in mat.blocks:
        rows, cols = np.triu_indices(block.order, 1)
        parts.append(np.diag(block))
        parts.append(np.asarray(block)[rows, cols])
    return np.concatenate(parts)


def _plain_positions(structure: Sequence[int]) -> List[Tuple[int, int, int]]:
    positions = []
    for b, size in enumerate(structure):
        positions.extend((b, i, i) for i in range(size))
        rows, cols = np.triu_indices(size, 1)
        positions.extend((b, int(i), int(j)) for i, j in zip(rows, cols))
    return positions


def _devectorize_coefficients(coeffs: np.ndarray, structure: Sequence[int]) -> BlockMatrix:
    """
    Matrix ``G`` with ``G.Y = sum_k coeffs[k] * y_k`` for the plain vectorization of ``Y``.
    """
    mats = [np.zeros((size, size)) for size in structure]
    for value, (b, i, j) in zip(coeffs, _plain_positions(structure)):
        if value == 0.0:
            continue
        if i == j:
            mats[b][i, i] = value
        else:
            mats[b][i, j] = mats[b][j, i] = value / 2.0
    return BlockMatrix(mats)


def primal_to_dual_form(p: PrimalSdp) -> DualSdp:
    """
    Rewrites a primal-form program in dual form over the slack matrix ``Y = sum_i x_i A_i - B``.

    The variables are expressed from ``n`` pivot entries of ``Y`` (chosen greedily in vectorization order), the
    remaining entries become equality rows and sign-constrained variables become inequality rows.

    :raises DependentConstraintMatrices: when the ``A_i`` are linearly dependent.
    """
    structure = p.structure
    Abar = np.column_stack([_vectorize_plain(mat) for mat in p.A]) if p.n else np.zeros((len(_vectorize_plain(p.B)), 0))
    Bbar = _vectorize_plain(p.B)
    scale = float(np.max(np.abs(Abar))) if Abar.size else 0.0
    pivots = []  # type: List[int]
    for k in range(Abar.shape[0]):
        if len(pivots) == p.n:
            break
        candidate = Abar[pivots + [k], :]
        if np.linalg.matrix_rank(candidate, tol=RANK_RTOL * max(scale, 1.0)) == len(pivots) + 1:
            pivots.append(k)
    if len(pivots) < p.n:
        raise DependentConstraintMatrices(
            f"Constraint matrices span a space of dimension [{len(pivots)}] for [{p.n}] variables"
        )
    T = np.linalg.inv(Abar[pivots, :]) if p.n else np.zeros((0, 0))
    N = Abar.shape[0]
    gamma = np.zeros(N)
    gamma[pivots] = T.T @ p.c
    objective = _devectorize_coefficients(gamma, structure)
    offset = float(p.c @ T @ Bbar[pivots]) + p.offset if p.n else p.offset

    rows = []
    rhs = []
    pivot_set = set(pivots)
    for k in range(N):
        if k in pivot_set:
            continue
        weights = Abar[k, :] @ T if p.n else np.zeros(0)
        coeffs = np.zeros(N)
        coeffs[k] = 1.0
        coeffs[pivots] -= weights
        value = float(weights @ Bbar[pivots]) - Bbar[k] if p.n else -Bbar[k]
        coeffs[np.abs(coeffs) < 1e-14] = 0.0
        if value < 0:
            coeffs, value = -coeffs, -value
        rows.append(_devectorize_coefficients(coeffs, structure))
        rhs.append(value)
    inequality_rows = []
    for i in sorted(p.nonneg_vars):
        # x_i = T_i (Y_P + B_P) >= 0  <=>  -T_i Y_P <= T_i B_P
        coeffs = np.zeros(N)
        coeffs[pivots] = -T[i, :]
        inequality_rows.append(len(rows))
        rows.append(_devectorize_coefficients(coeffs, structure))
        rhs.append(float(T[i, :] @ Bbar[pivots]))
    return DualSdp(objective, rows, np.array(rhs), frozenset(inequality_rows), p.sense, offset)


def aggregate(constraints: Sequence[Tuple[Sequence[MatrixLike], MatrixLike]]) -> Tuple[List[BlockMatrix], BlockMatrix]:
    """
    Stacks several linear matrix inequalities ``sum_i x_i A_i^k >= B^k`` into a single block-diagonal one.
    """
    if not constraints:
        raise ValueError("At least one constraint is required")
    count = len(constraints[0][0])
    for k, (mats, _) in enumerate(constraints):
        if len(mats) != count:
            raise VariableCountMismatch(f"Constraint [{k}] has [{len(mats)}] matrices, expected [{count}]")
    A = []
    for i in range(count):
        blocks = []
        for mats, _ in constraints:
            blocks.extend(as_block(mats[i]).blocks)
        A.append(BlockMatrix(blocks))
    B = BlockMatrix(block for _, rhs in constraints for block in as_block(rhs).blocks)
    return A, B


def duality_gap(p: PrimalSdp, x: VectorLike, Y: BlockMatrix, tol: float = FEASIBILITY_TOL) -> float:
    """
    Gap ``Y.(sum_i x_i A_i - B)`` plus the sign-constrained terms, equal to the difference of the objectives of
    a feasible pair (primal minus dual for minimization, dual minus primal for maximization).

    :raises InfeasibleArgument: when ``x`` or ``Y`` is infeasible beyond ``tol``.
    """
    d = dualize(p)
    if not p.is_feasible(x, tol):
        raise InfeasibleArgument(f"Primal point is infeasible: {p.residuals(x)}")
    if not d.is_feasible(Y, tol):
        raise InfeasibleArgument(f"Dual point is infeasible: {d.residuals(Y)}")
    x = np.asarray(x, dtype=float).reshape(-1)
    gap = p.slack(x).dot(Y)
    for i in p.nonneg_vars:
        gap += x[i] * (d.c[i] - p.A[i].dot(Y))
    return float(gap)


def lp_as_sdp(c: VectorLike, G: MatrixLike, h: VectorLike) -> PrimalSdp:
    """
    Linear program ``min c.x  s.t.  G x >= h`` as a primal program with one ``1 x 1`` block per row.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).reshape(-1)
    if G.shape[0] != len(h):
        raise DimensionMismatch(f"Got [{G.shape[0]}] rows for [{len(h)}] right-hand sides")
    A = [BlockMatrix([[[value]] for value in G[:, i]]) for i in range(G.shape[1])]
    return PrimalSdp(c, A, BlockMatrix([[[value]] for value in h]))


def convex_qp_as_sdp(Q_list: Sequence[MatrixLike], q_list: Sequence[VectorLike], r_list: Sequence[float]) -> PrimalSdp:
    """
    Convex quadratically constrained program as a primal program over ``(x, t)``.

    Minimizes ``x'Q_0x + q_0'x + r_0`` subject to ``x'Q_kx + q_k'x + r_k <= 0`` for ``k >= 1``. Each quadratic
    ``Q_k = L_k L_k'`` gives the Schur block ``[[I, L_k'x], [x'L_k, s - q_k'x - r_k]] >= 0`` with ``s = t`` for the
    objective and ``s = 0`` for the constraints, so the program has one block per quadratic. The last variable
    is the epigraph ``t``.
    """
    if not len(Q_list) == len(q_list) == len(r_list) or not Q_list:
        raise VariableCountMismatch("Quadratic, linear and constant terms must be given for the same functions")
    n = np.asarray(Q_list[0]).shape[0]
    constraints = []
    for k, (Q, q, r) in enumerate(zip(Q_list, q_list, r_list)):
        L = gram_factor(Q)  # n x rank
        q = np.asarray(q, dtype=float).reshape(-1)
        if L.shape[0] != n or len(q) != n:
            raise DimensionMismatch(f"Function [{k}] does not have [{n}] variables")
        rank = L.shape[1]
        mats = []
        for j in range(n):
            mat = np.zeros((rank + 1, rank + 1))
            mat[:rank, rank] = mat[rank, :rank] = L[j, :]
            mat[rank, rank] = -q[j]
            mats.append(mat)
        t_mat = np.zeros((rank + 1, rank + 1))
        if k == 0:
            t_mat[rank, rank] = 1.0
        mats.append(t_mat)
        rhs = np.zeros((rank + 1, rank + 1))
        rhs[:rank, :rank] = -np.eye(rank)
        rhs[rank, rank] = float(r)
        constraints.append((mats, rhs))
    A, B = aggregate(constraints)
    c = np.zeros(n + 1)
    c[-1] = 1.0
    return PrimalSdp(c, A, B)


def nonzero_gap_pair() -> Tuple[PrimalSdp, np.ndarray, BlockMatrix]:
    """
    Primal program of order 4 with optimum 1 whose dual has optimum 0, with an optimal point of each.
    """
    structure = (4, )
    A1 = BlockMatrix.unit(structure, 0, 0, 0)
    A2 = BlockMatrix.unit(structure, 0, 0, 1) + BlockMatrix.unit(structure, 0, 2, 2)
    A3 = BlockMatrix.unit(structure, 0, 3, 3) - BlockMatrix.unit(structure, 0, 2, 3)
    B = -BlockMatrix.unit(structure, 0, 2, 3)
    p = PrimalSdp([0.0, 0.0, 1.0], [A1, A2, A3], B)
    return p, np.array([0.0, 0.0, 1.0]), BlockMatrix.unit(structure, 0, 3, 3)


def unbounded_dual_example() -> PrimalSdp:
    """
    ``min x  s.t.  [[x, 0], [0, -x]] >= I``: infeasible, its dual is unbounded.
    """
    return PrimalSdp([1.0], [BlockMatrix([np.diag([1.0, -1.0])])], BlockMatrix([np.eye(2)]))
