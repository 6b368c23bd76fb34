import numpy as np
import pytest

from sdpkit.impl import DimensionMismatch, DomainError, Infeasible, ParseError, UnsupportedSize
from sdpkit.sos import (
    HomPoly,
    SosCertificate,
    expand_certificate,
    monomial_basis,
    monomial_count,
    multiply_norm_power,
    sos_decompose,
)
from sdpkit.symcore import is_psd


def quartic_sample():
    # x1^4 + x2^4 + 3 x1^2 x2^2
    return HomPoly(2, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): 3.0})


def test_hompoly_validation():
    with pytest.raises(DomainError):
        HomPoly(0, {})
    with pytest.raises(DomainError):
        HomPoly(2, {(2, 0): 1.0, (1, 0): 1.0})
    with pytest.raises(DimensionMismatch):
        HomPoly(2, {(2, 0, 0): 1.0})
    with pytest.raises(DomainError):
        HomPoly(2, {(-1, 3): 1.0})
    with pytest.raises(DomainError):
        HomPoly(2, {})
    zero = HomPoly(2, {(2, 0): 0.0}, 2)
    assert zero.coeffs == {}
    assert zero.degree == 2


def test_hompoly_evaluate():
    p = HomPoly(2, {(2, 1): 1.0})
    assert p.evaluate([2, 3]) == pytest.approx(12.0)
    assert p([2, 3]) == pytest.approx(12.0)
    with pytest.raises(DimensionMismatch):
        p.evaluate([1, 2, 3])


def test_hompoly_arithmetic():
    p = HomPoly(2, {(1, 0): 1.0, (0, 1): 1.0})
    square = p * p
    assert square == HomPoly(2, {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0})
    assert (square * 2.0).coeffs[(1, 1)] == pytest.approx(4.0)
    assert (square + square).coeffs[(2, 0)] == pytest.approx(2.0)
    with pytest.raises(DimensionMismatch):
        square + p


def test_hompoly_from_matrix():
    p = HomPoly.from_matrix([[1.0, -1.0], [-1.0, 2.0]])
    assert p.degree == 4
    assert p.coeffs == {(4, 0): 1.0, (2, 2): -2.0, (0, 4): 2.0}
    x = np.array([0.3, -1.2])
    y = x ** 2
    assert p(x) == pytest.approx(y @ np.array([[1.0, -1.0], [-1.0, 2.0]]) @ y)


def test_hompoly_text():
    text = "# quartic\n1 4 0\n3 2 2\n\n1 0 4\n"
    p = HomPoly.from_text(text)
    assert p == quartic_sample()
    assert HomPoly.from_text(p.to_text()) == p
    with pytest.raises(ParseError) as err:
        HomPoly.from_text("1 4 0\n1 2\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        HomPoly.from_text("1 4 0\nfoo 2 2\n")
    with pytest.raises(ParseError):
        HomPoly.from_text("1 4 0\n2 4 0\n")
    with pytest.raises(ParseError):
        HomPoly.from_text("# nothing\n")
    with pytest.raises(ParseError):
        HomPoly.from_text("1 4 0\n1 1 0\n")


@pytest.mark.parametrize("nvars, d, exact, expected", [
    (2, 2, True, 3),
    (1, 3, True, 1),
    (3, 2, True, 6),
    (2, 2, False, 6),
    (5, 2, True, 15),
])
def test_monomial_basis_counts(nvars, d, exact, expected):
    basis = monomial_basis(nvars, d, exact)
    assert len(basis) == expected == monomial_count(nvars, d, exact)
    assert len(set(basis)) == expected


def test_monomial_basis_order():
    assert monomial_basis(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert monomial_basis(2, 1, exact=False)[0] == (1, 0)
    with pytest.raises(UnsupportedSize):
        monomial_basis(30, 4)
    with pytest.raises(DomainError):
        monomial_basis(0, 2)


def test_multiply_norm_power():
    p = HomPoly(2, {(2, 0): 1.0})
    assert multiply_norm_power(p, 0) == p
    assert multiply_norm_power(p, 1) == HomPoly(2, {(4, 0): 1.0, (2, 2): 1.0})
    twice = multiply_norm_power(p, 2)
    assert twice == HomPoly(2, {(6, 0): 1.0, (4, 2): 2.0, (2, 4): 1.0})
    with pytest.raises(DomainError):
        multiply_norm_power(p, -1)


def test_sos_quartic_sample():
    p = quartic_sample()
    cert = sos_decompose(p)
    assert isinstance(cert, SosCertificate)
    assert cert.basis == [(2, 0), (1, 1), (0, 2)]
    assert cert.margin > 0
    assert is_psd(cert.gram, tol=1e-6)
    assert expand_certificate(cert).allclose(p, atol=1e-6)
    # the gram [[1, 0, 1], [0, 1, 0], [1, 0, 1]] over (x1^2, x1 x2, x2^2) is one valid choice
    gram = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
    basis = np.array([[4.0, 2.0, 1.0]])
    assert is_psd(gram)
    assert p([2.0, 1.0]) == pytest.approx(float(basis @ gram @ basis.T))


def test_sos_single_square():
    p = HomPoly(1, {(2, ): 1.0})
    cert = sos_decompose(p)
    assert cert.rank == 1
    assert abs(cert.squares[0][0]) == pytest.approx(1.0, abs=1e-6)
    assert expand_certificate(cert).allclose(p)


def test_sos_product_square():
    p = HomPoly(2, {(2, 2): 1.0})
    cert = sos_decompose(p)
    assert expand_certificate(cert).allclose(p, atol=1e-6)


def test_sos_rejects_negative_values():
    # value -1 at (1, 1)
    p = HomPoly(2, {(4, 0): 1.0, (2, 2): -3.0, (0, 4): 1.0})
    with pytest.raises(Infeasible) as err:
        sos_decompose(p)
    assert err.value.margin < 0
    assert "rel_gap" in err.value.residuals


@pytest.mark.slow
def test_sos_rejects_nonnegative_form_outside_cone():
    # homogeneous motzkin form, nonnegative but without sum of squares decomposition
    p = HomPoly(3, {(4, 2, 0): 1.0, (2, 4, 0): 1.0, (0, 0, 6): 1.0, (2, 2, 2): -3.0})
    rng = np.random.default_rng(0)
    assert min(p(x) for x in rng.normal(size=(200, 3))) >= -1e-9
    with pytest.raises(Infeasible):
        sos_decompose(p)


def test_sos_domain():
    with pytest.raises(DomainError):
        sos_decompose(HomPoly(2, {(2, 1): 1.0}))


def test_sos_of_squared_norm_power():
    p = multiply_norm_power(HomPoly(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0}), 1)
    cert = sos_decompose(p)
    assert expand_certificate(cert).allclose(p, atol=1e-6)
    assert cert.json()["margin"] > 0
