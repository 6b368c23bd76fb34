"""
Sum of squares certificates of homogeneous polynomials of even degree.

A polynomial of degree ``2d`` is a sum of squares exactly when it can be written ``xb^T G xb`` with ``G`` positive
semidefinite, ``xb`` being the vector of the monomials of degree ``d``. The Gram matrices form an affine family; the
decision looks for the member with the largest smallest eigenvalue.
"""
import itertools
from collections import defaultdict
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from sdpkit.impl import (
    Base,
    DimensionMismatch,
    DomainError,
    Infeasible,
    NotPsd,
    NumericalTrouble,
    ParseError,
    check_size,
)
from sdpkit.schemas import SolveOptions
from sdpkit.sdpmodel import PrimalSdp, Sense
from sdpkit.sdpsolve import solve
from sdpkit.symcore import SymMatrix, chol_psd
from sdpkit.typedefs import Exponent, MatrixLike, VectorLike
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_BASIS_COUNT = 5000
MAX_GRAM_ORDER = 60
SOS_TOL = 1e-6
RANK_TOL = 1e-7
COEFF_TOL = 1e-12


class HomPoly(object):
    """
    Homogeneous polynomial stored as a map from exponent vectors to nonzero coefficients.
    """
    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, coeffs: Mapping[Sequence[int], float], degree: Optional[int] = None):
        if int(nvars) < 1:
            raise DomainError(f"Polynomial requires at least one variable, got [{nvars}]")
        self.nvars = int(nvars)
        terms = {}  # type: Dict[Exponent, float]
        for key, value in coeffs.items():
            exponent = tuple(int(e) for e in key)
            if len(exponent) != self.nvars:
                raise DimensionMismatch(f"Exponent [{exponent}] does not have [{self.nvars}] entries")
            if any(e < 0 for e in exponent):
                raise DomainError(f"Exponent [{exponent}] has a negative entry")
            value = float(value)
            if value != 0.0:
                terms[exponent] = terms.get(exponent, 0.0) + value
        degrees = {sum(exponent) for exponent in terms}
        if len(degrees) > 1:
            raise DomainError(f"Polynomial is not homogeneous, found degrees [{sorted(degrees)}]")
        if degree is None:
            if not degrees:
                raise DomainError("Degree of the zero polynomial must be given")
            degree = degrees.pop()
        elif degrees and degrees.pop() != degree:
            raise DomainError(f"Terms do not have the declared degree [{degree}]")
        self.degree = int(degree)
        self.coeffs = {key: val for key, val in terms.items() if val != 0.0}

    def __repr__(self):
        return f"HomPoly(nvars={self.nvars}, degree={self.degree}, terms={len(self.coeffs)})"

    def __eq__(self, other):
        return (isinstance(other, HomPoly) and self.nvars == other.nvars and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __call__(self, x: VectorLike) -> float:
        return self.evaluate(x)

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check_compatible(other)
        terms = dict(self.coeffs)
        for key, val in other.coeffs.items():
            terms[key] = terms.get(key, 0.0) + val
        return HomPoly(self.nvars, terms, self.degree)

    def __mul__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return HomPoly(self.nvars, {key: val * float(other) for key, val in self.coeffs.items()}, self.degree)
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"Cannot multiply polynomials in [{self.nvars}] and [{other.nvars}] variables")
        terms = defaultdict(float)  # type: Dict[Exponent, float]
        for (ka, va), (kb, vb) in itertools.product(self.coeffs.items(), other.coeffs.items()):
            terms[tuple(a + b for a, b in zip(ka, kb))] += va * vb
        return HomPoly(self.nvars, terms, self.degree + other.degree)

    __rmul__ = __mul__

    def _check_compatible(self, other: "HomPoly") -> None:
        if other.nvars != self.nvars or other.degree != self.degree:
            raise DimensionMismatch(f"Polynomials of shape [{self.nvars}, {self.degree}] "
                                    f"and [{other.nvars}, {other.degree}] do not match")

    def evaluate(self, x: VectorLike) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        if len(x) != self.nvars:
            raise DimensionMismatch(f"Expected [{self.nvars}] values, got [{len(x)}]")
        return float(sum(val * np.prod(x ** np.array(key)) for key, val in self.coeffs.items()))

    def allclose(self, other: "HomPoly", atol: float = 1e-6) -> bool:
        self._check_compatible(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(key, 0.0) - other.coeffs.get(key, 0.0)) <= atol for key in keys)

    def terms(self) -> List[Tuple[Exponent, float]]:
        return sorted(self.coeffs.items(), reverse=True)

    def json(self):
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "terms": [{"exponent": list(key), "coeff": val} for key, val in self.terms()],
        }

    @classmethod
    def from_matrix(cls, M: MatrixLike) -> "HomPoly":
        """
        Quartic ``sum_ij M_ij x_i^2 x_j^2``.
        """
        M = SymMatrix(M)
        n = M.order
        terms = defaultdict(float)  # type: Dict[Exponent, float]
        for i, j in itertools.product(range(n), repeat=2):
            exponent = [0] * n
            exponent[i] += 2
            exponent[j] += 2
            terms[tuple(exponent)] += float(M[i, j])
        return cls(n, terms, 4)

    @classmethod
    def from_text(cls, text: str) -> "HomPoly":
        """
        One term per line as ``coeff e_1 e_2 ... e_n``, blank lines and ``#`` comments are skipped.
        """
        terms = {}
        nvars = None
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                coeff = float(fields[0])
                exponent = tuple(int(e) for e in fields[1:])
            except ValueError as exc:
                raise ParseError(number, f"invalid term [{line}]: {exc}") from exc
            if not exponent:
                raise ParseError(number, "term without exponents")
            if nvars is None:
                nvars = len(exponent)
            elif len(exponent) != nvars:
                raise ParseError(number, f"expected [{nvars}] exponents, got [{len(exponent)}]")
            if exponent in terms:
                raise ParseError(number, f"duplicate exponent [{exponent}]")
            terms[exponent] = coeff
        if nvars is None:
            raise ParseError(0, "no polynomial term found")
        try:
            return cls(nvars, terms)
        except (DomainError, DimensionMismatch) as exc:
            raise ParseError(0, str(exc)) from exc

    def to_text(self) -> str:
        lines = [" ".join([repr(val)] + [str(e) for e in key]) for key, val in self.terms()]
        return "\n".join(lines) + "\n"


class SosCertificate(Base):
    """
    Gram matrix over the monomial basis and the squares it factors into.

    ``squares[k]`` holds the coefficients over ``basis`` of the ``k``-th squared polynomial, and ``margin`` is the
    largest ``t`` for which some Gram matrix of the polynomial minus ``t I`` is positive semidefinite.
    """

    __fields__ = ("nvars", "basis", "gram", "squares", "margin")

    @property
    def rank(self) -> int:
        return len(self.squares)


def monomial_count(nvars: int, d: int, exact: bool = True) -> int:
    if exact:
        return int(comb(nvars + d - 1, d, exact=True))
    return int(comb(nvars + d, d, exact=True))


def monomial_basis(nvars: int, d: int, exact: bool = True) -> List[Exponent]:
    """
    Exponent vectors of the monomials of degree ``d`` (or at most ``d``), sorted in decreasing lexicographic order
    so that ``x_1^d`` comes first.
    """
    if nvars < 1 or d < 0:
        raise DomainError(f"Invalid monomial basis request [{nvars}, {d}]")
    check_size("monomial basis", monomial_count(nvars, d, exact), MAX_BASIS_COUNT)
    degrees = [d] if exact else range(d + 1)
    basis = []
    for degree in degrees:
        for picks in itertools.combinations_with_replacement(range(nvars), degree):
            exponent = [0] * nvars
            for var in picks:
                exponent[var] += 1
            basis.append(tuple(exponent))
    return sorted(basis, reverse=True)


def multiply_norm_power(p: HomPoly, r: int) -> HomPoly:
    """
    Product ``(x_1^2 + ... + x_n^2)^r p``.
    """
    if r < 0:
        raise DomainError(f"Power must be nonnegative, got [{r}]")
    squares = HomPoly(p.nvars, {tuple(2 if k == i else 0 for k in range(p.nvars)): 1.0 for i in range(p.nvars)})
    result = p
    for _ in range(r):
        result = result * squares
    return result


def _gram_program(p: HomPoly, basis: List[Exponent]) -> Tuple[PrimalSdp, np.ndarray, List[np.ndarray]]:
    """
    ``max t  s.t.  G0 + sum_k s_k D_k - t I >= 0``: ``G0`` is one Gram matrix of ``p`` and the ``D_k`` span the
    directions keeping ``xb^T G xb`` unchanged, one per extra pair of basis monomials sharing a product.
    """
    size = len(basis)
    groups = defaultdict(list)  # type: Dict[Exponent, List[Tuple[int, int]]]
    for a, b in itertools.combinations_with_replacement(range(size), 2):
        groups[tuple(x + y for x, y in zip(basis[a], basis[b]))].append((a, b))
    G0 = np.zeros((size, size))
    directions = []
    for key in sorted(groups, reverse=True):
        pairs = sorted(groups[key], key=lambda pair: (pair[0] != pair[1], pair))
        first = pairs[0]
        weight = 1.0 if first[0] == first[1] else 2.0
        value = p.coeffs.get(key, 0.0) / weight
        G0[first] = G0[first[::-1]] = value
        for pair in pairs[1:]:
            D = np.zeros((size, size))
            D[pair] = D[pair[::-1]] = 1.0
            other = 1.0 if pair[0] == pair[1] else 2.0
            D[first] = D[first[::-1]] = -other / weight
            directions.append(D)
    A = directions + [-np.eye(size)]
    c = np.zeros(len(A))
    c[-1] = 1.0
    LOGGER.debug("Gram program of order [%s] with [%s] free directions", size, len(directions))
    return PrimalSdp(c, A, -G0, sense=Sense.MAX), G0, directions


def sos_decompose(p: HomPoly, opts: Optional[SolveOptions] = None) -> SosCertificate:
    """
    Finds a sum of squares decomposition of ``p`` over the monomials of degree ``p.degree / 2``.

    :raises Infeasible: when the best Gram matrix has a smallest eigenvalue below ``-SOS_TOL``; the margin and the
        final solver residuals are attached.
    """
    if p.degree % 2 or p.degree == 0:
        raise DomainError(f"Degree must be even and positive, got [{p.degree}]")
    basis = monomial_basis(p.nvars, p.degree // 2, exact=True)
    check_size("gram order", len(basis), MAX_GRAM_ORDER)
    program, G0, directions = _gram_program(p, basis)
    report = solve(program, opts)
    residuals = {"primal_residual": report.primal_residual, "dual_residual": report.dual_residual,
                 "rel_gap": report.rel_gap}
    if not report.converged:
        raise NumericalTrouble(f"Gram program was not solved, status [{report.status}]")
    margin = float(report.pobj)
    if margin < -SOS_TOL:
        LOGGER.info("Polynomial is not a sum of squares, margin [%.6g]", margin)
        raise Infeasible(f"Polynomial is not a sum of squares, best Gram margin is [{margin:.6g}]",
                         margin=margin, residuals=residuals)
    x = np.asarray(report.x, dtype=float)
    gram = G0 + sum((val * D for val, D in zip(x[:-1], directions)), np.zeros_like(G0))
    gram = (gram + gram.T) / 2.0
    try:
        factor = chol_psd(gram, tol=max(RANK_TOL, 10.0 * max(0.0, -margin)))
    except NotPsd as exc:
        raise Infeasible(f"Gram matrix could not be factored: {exc}", margin=margin, residuals=residuals) from exc
    columns = [k for k in range(len(basis)) if np.any(factor.lower[:, k] != 0.0)]
    squares = [factor.lower[:, k].copy() for k in columns]
    LOGGER.info("Sum of squares found with [%s] squares and margin [%.6g]", len(squares), margin)
    return SosCertificate(nvars=p.nvars, basis=basis, gram=SymMatrix(gram, tol=1e-9), squares=squares,
                          margin=margin)


def expand_certificate(cert: SosCertificate) -> HomPoly:
    """
    Exact expansion of ``sum_k (sum_a squares[k][a] x^a)^2``.
    """
    basis = [tuple(e) for e in cert.basis]
    degree = 2 * sum(basis[0]) if basis else 0
    total = HomPoly(cert.nvars, {}, degree)
    for square in cert.squares:
        poly = HomPoly(cert.nvars, {key: val for key, val in zip(basis, square)}, degree // 2)
        total = total + poly * poly
    cleaned = {key: val for key, val in total.coeffs.items() if abs(val) > COEFF_TOL}
    return HomPoly(cert.nvars, cleaned, degree)
