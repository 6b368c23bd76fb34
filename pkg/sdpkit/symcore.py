"""
Dense symmetric matrix kernel.

Every other module works on :class:`SymMatrix` values and relies on the decompositions and positive semidefinite
tests defined here.
"""
import itertools
import math
from enum import auto
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg

from sdpkit.impl import (
    AsymmetricInput,
    Base,
    DimensionMismatch,
    EnumNameHyphenCase,
    LeadingBlockNotPd,
    NotPositiveDefinite,
    NotPsd,
    NumericalTrouble,
    check_size,
)
from sdpkit.typedefs import MatrixLike
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
MAX_MINORS_ORDER = 14


class SymMatrix(np.ndarray):
    """
    Read-only dense real symmetric matrix.

    Construction averages the input with its transpose so that entries are exactly symmetric. Inputs with an
    asymmetry larger than ``tol`` (relative to the largest entry) are rejected.
    Results of arithmetic or slicing are plain :class:`numpy.ndarray` since they are not symmetric in general.
    """

    def __new__(cls, values: MatrixLike, tol: float = SYMMETRY_TOL) -> "SymMatrix":
        arr = np.array(values, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"Symmetric matrix must be square, got shape [{arr.shape}]")
        if arr.shape[0] < 1:
            raise DimensionMismatch("Symmetric matrix must have order of at least [1]")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Symmetric matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(arr))))
        skew = float(np.max(np.abs(arr - arr.T)))
        if skew > tol * scale:
            raise AsymmetricInput(f"Matrix asymmetry [{skew:.3g}] exceeds tolerance [{tol * scale:.3g}]")
        sym = ((arr + arr.T) / 2.0).view(cls)
        sym.flags.writeable = False
        return sym

    def __array_wrap__(self, obj, context=None, return_scalar=False):
        if obj.shape == ():
            return obj[()]
        return obj.view(np.ndarray)

    def __getitem__(self, key):
        item = super(SymMatrix, self).__getitem__(key)
        if isinstance(item, np.ndarray):
            return item.view(np.ndarray)
        return item

    @property
    def order(self) -> int:
        return int(self.shape[0])

    @classmethod
    def from_array(cls, values: MatrixLike, tol: float = SYMMETRY_TOL) -> "SymMatrix":
        return cls(values, tol)

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    @classmethod
    def ones(cls, n: int) -> "SymMatrix":
        return cls(np.ones((n, n)))

    @classmethod
    def zeros(cls, n: int) -> "SymMatrix":
        return cls(np.zeros((n, n)))


def sym_matrix(values: MatrixLike, tol: float = SYMMETRY_TOL) -> SymMatrix:
    if isinstance(values, SymMatrix):
        return values
    return SymMatrix(values, tol)


class EigenDecomp(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class CholFactor(NamedTuple):
    lower: np.ndarray
    rank: int


class PsdVerdict(Base):
    __fields__ = ("is_psd", "is_pd", "min_eigenvalue", "witness")


class GramMethod(EnumNameHyphenCase):
    CHOLESKY = auto()
    EIGEN = auto()
    SQRT = auto()


def _off_diagonal_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def eig_decompose(A: MatrixLike, tol: float = JACOBI_TOL) -> EigenDecomp:
    """
    Eigendecomposition ``A = U diag(values) U^T`` by cyclic Jacobi rotations.

    Values are sorted ascending and each eigenvector is oriented so that its first non-negligible component is
    positive, which makes the output deterministic (the identity gives ``U = I``).

    :raises NumericalTrouble: when the off-diagonal mass does not vanish within the sweep cap.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got [{tol}]")
    a = np.array(sym_matrix(A), dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    sweeps = 0
    while _off_diagonal_norm(a) > target:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NumericalTrouble(f"Jacobi rotations did not converge after [{sweeps}] sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    LOGGER.debug("Jacobi eigendecomposition of order [%s] converged in [%s] sweeps", n, sweeps)
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for j in range(n):
        lead = np.flatnonzero(np.abs(vectors[:, j]) > 1e-8)
        if lead.size and vectors[lead[0], j] < 0:
            vectors[:, j] = -vectors[:, j]
    return EigenDecomp(values, vectors)


def psd_threshold(A: np.ndarray, tol: float = PSD_TOL) -> float:
    return tol * max(1.0, float(np.linalg.norm(A)))


def psd_check(A: MatrixLike, tol: float = PSD_TOL) -> PsdVerdict:
    """
    Positive semidefinite status from the smallest eigenvalue.

    The tolerance is scaled by ``max(1, |A|_F)``. The witness is the unit eigenvector of the smallest eigenvalue.
    """
    if tol < 0:
        raise ValueError(f"Tolerance must be non-negative, got [{tol}]")
    A = sym_matrix(A)
    values, vectors = eig_decompose(A)
    threshold = psd_threshold(A, tol)
    lowest = float(values[0])
    return PsdVerdict(
        is_psd=lowest >= -threshold,
        is_pd=lowest > threshold,
        min_eigenvalue=lowest,
        witness=vectors[:, 0].copy(),
    )


def is_psd(A: MatrixLike, tol: float = PSD_TOL) -> bool:
    return bool(psd_check(A, tol).is_psd)


def sylvester_pd(A: MatrixLike) -> bool:
    A = sym_matrix(A)
    scale = max(1.0, float(np.max(np.abs(A))))
    for k in range(1, A.order + 1):
        if np.linalg.det(A[:k, :k]) <= 1e-14 * scale ** k:
            return False
    return True


def all_principal_minors_nonneg(A: MatrixLike) -> bool:
    A = sym_matrix(A)
    n = A.order
    check_size("order", n, MAX_MINORS_ORDER)
    scale = max(1.0, float(np.max(np.abs(A))))
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(n), k):
            idx = np.array(subset)
            if np.linalg.det(A[np.ix_(idx, idx)]) < -1e-10 * scale ** k:
                return False
    return True


def chol_pd(A: MatrixLike) -> CholFactor:
    """
    Unique Cholesky factor with strictly positive diagonal, built row by row.
    """
    A = sym_matrix(A)
    n = A.order
    floor = 1e-14 * max(1.0, float(np.max(np.abs(A))))
    lower = np.zeros((n, n))
    for i in range(n):
        row = linalg.solve_triangular(lower[:i, :i], A[:i, i], lower=True) if i else np.zeros(0)
        pivot = A[i, i] - float(row @ row)
        if pivot <= floor:
            raise NotPositiveDefinite(f"Cholesky pivot [{i + 1}] is [{pivot:.3g}], matrix is not positive definite")
        lower[i, :i] = row
        lower[i, i] = math.sqrt(pivot)
    return CholFactor(lower, n)


def chol_psd(A: MatrixLike, tol: float = PSD_TOL) -> CholFactor:
    """
    Cholesky factor of a positive semidefinite matrix following the row induction.

    Each row solves the (possibly underdetermined) system against the leading factor with a minimum-norm
    least-squares solution, then ``r_ii = sqrt(alpha)`` where ``alpha`` is the remaining diagonal mass. Pivots that
    fall within the tolerance are set to zero, so the columns of zero pivots stay zero.

    :raises NotPsd: when a pivot is below ``-tol`` or a row cannot be matched by the leading factor.
    """
    A = sym_matrix(A)
    n = A.order
    tol_abs = psd_threshold(A, tol)
    lower = np.zeros((n, n))
    rank = 0
    for i in range(n):
        if i:
            lead = lower[:i, :i]
            row = linalg.lstsq(lead, A[:i, i])[0]
            mismatch = float(np.linalg.norm(lead @ row - A[:i, i]))
            if mismatch > 10.0 * math.sqrt(tol_abs):
                raise NotPsd(f"Cholesky row [{i + 1}] is not in the range of the leading factor "
                             f"(mismatch [{mismatch:.3g}]), matrix is not PSD")
        else:
            row = np.zeros(0)
        alpha = A[i, i] - float(row @ row)
        if alpha < -tol_abs:
            raise NotPsd(f"Cholesky pivot [{i + 1}] is [{alpha:.3g}], matrix is not PSD")
        lower[i, :i] = row
        if alpha > tol_abs:
            lower[i, i] = math.sqrt(alpha)
            rank += 1
    return CholFactor(lower, rank)


def gram_schmidt_qr(A: MatrixLike, tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rank-revealing QR by modified Gram-Schmidt with one re-orthogonalization pass.

    Columns whose projected residual is below ``tol`` times their norm are treated as the zero vector, so ``Q`` has
    ``p = rank(A)`` columns and ``R`` is ``p x m`` in row echelon (upper-triangular) form.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n, m = A.shape
    basis = []
    coeffs = np.zeros((min(n, m), m))
    for j in range(m):
        column = A[:, j]
        residual = column.copy()
        for _ in range(2):
            for k, q in enumerate(basis):
                h = float(q @ residual)
                coeffs[k, j] += h
                residual -= h * q
        length = float(np.linalg.norm(residual))
        if length > tol * float(np.linalg.norm(column)) and length > 0.0:
            coeffs[len(basis), j] = length
            basis.append(residual / length)
    p = len(basis)
    Q = np.column_stack(basis) if p else np.zeros((n, 0))
    return Q, coeffs[:p, :]


def principal_sqrt(A: MatrixLike, tol: float = PSD_TOL) -> SymMatrix:
    A = sym_matrix(A)
    values, vectors = eig_decompose(A)
    if values[0] < -psd_threshold(A, tol):
        raise NotPsd(f"Principal square root requires a PSD matrix, smallest eigenvalue is [{values[0]:.3g}]")
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T
    return SymMatrix((root + root.T) / 2.0)


def schur_complement(M: MatrixLike, split: int) -> SymMatrix:
    """
    Complement ``C - B A^-1 B^T`` of the leading ``split x split`` block ``A``.
    """
    M = sym_matrix(M)
    if not 1 <= split < M.order:
        raise DimensionMismatch(f"Split [{split}] must be within [1, {M.order - 1}]")
    try:
        factor = chol_pd(M[:split, :split])
    except NotPositiveDefinite as exc:
        raise LeadingBlockNotPd(f"Leading block of order [{split}] is not positive definite: {exc!s}") from exc
    W = linalg.solve_triangular(factor.lower, M[:split, split:], lower=True)
    C = M[split:, split:] - W.T @ W
    return SymMatrix((C + C.T) / 2.0)


def gershgorin_interval(A: MatrixLike) -> Tuple[float, float]:
    A = sym_matrix(A)
    diag = np.diag(A)
    radius = np.sum(np.abs(A), axis=1) - np.abs(diag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def frobenius_norm(A: MatrixLike) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=float)))


def frobenius_dot(A: MatrixLike, B: MatrixLike) -> float:
    return float(np.sum(np.asarray(A, dtype=float) * np.asarray(B, dtype=float)))


def gram_factor(A: MatrixLike, method: GramMethod = GramMethod.EIGEN, tol: float = PSD_TOL) -> np.ndarray:
    """
    Factor ``V`` with ``V V^T = A``.

    The ``eigen`` method keeps only the columns of strictly positive eigenvalues, so rank-deficient inputs give a
    narrow factor.
    """
    A = sym_matrix(A)
    method = GramMethod(str(method))
    if method is GramMethod.CHOLESKY:
        return chol_psd(A, tol).lower
    if method is GramMethod.SQRT:
        return np.asarray(principal_sqrt(A, tol))
    values, vectors = eig_decompose(A)
    threshold = psd_threshold(A, tol)
    if values[0] < -threshold:
        raise NotPsd(f"Gram factor requires a PSD matrix, smallest eigenvalue is [{values[0]:.3g}]")
    keep = values > threshold
    return vectors[:, keep] * np.sqrt(values[keep])


def rank_of(A: MatrixLike, tol: float = PSD_TOL) -> int:
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got [{tol}]")
    values, _ = eig_decompose(A)
    return int(np.sum(np.abs(values) > tol))


def congruence(S: MatrixLike, Q: MatrixLike) -> SymMatrix:
    Q = np.asarray(Q, dtype=float)
    T = Q.T @ np.asarray(S, dtype=float) @ Q
    return SymMatrix((T + T.T) / 2.0)


def all_ones_shift(n: int, z: float) -> SymMatrix:
    """
    Matrix ``z I - (J - I)`` with ``J`` the all-ones matrix, PSD exactly when ``z >= n - 1``.
    """
    return SymMatrix(z * np.eye(n) - (np.ones((n, n)) - np.eye(n)))


def lowest_psd_shift(builder: Callable[[float], MatrixLike],
                     lo: float,
                     hi: float,
                     tol: float = 1e-9,
                     psd_tol: Optional[float] = None,
                     ) -> float:
    """
    Bisection for the lowest ``z`` in ``[lo, hi]`` for which ``builder(z)`` is PSD.

    The family must be monotone (PSD at ``hi`` and above the returned value, not PSD at ``lo``).
    """
    psd_tol = PSD_TOL if psd_tol is None else psd_tol
    if not is_psd(builder(hi), psd_tol):
        raise ValueError(f"Upper bracket [{hi}] does not give a PSD matrix")
    if is_psd(builder(lo), psd_tol):
        return lo
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if is_psd(builder(mid), psd_tol):
            hi = mid
        else:
            lo = mid
    return hi
