import math

import numpy as np
import pytest

from sdpkit.impl import AsymmetricInput, LeadingBlockNotPd, NotPositiveDefinite, NotPsd, UnsupportedSize
from sdpkit.symcore import (
    GramMethod,
    SymMatrix,
    all_ones_shift,
    all_principal_minors_nonneg,
    chol_pd,
    chol_psd,
    congruence,
    eig_decompose,
    frobenius_dot,
    frobenius_norm,
    gershgorin_interval,
    gram_factor,
    gram_schmidt_qr,
    lowest_psd_shift,
    principal_sqrt,
    psd_check,
    rank_of,
    schur_complement,
    sylvester_pd,
)

SINGULAR_CHOL = [[1, 1, 2], [1, 1, 2], [2, 2, 13]]


def random_symmetric(rng, n):
    a = rng.uniform(-1, 1, size=(n, n))
    return (a + a.T) / 2


def random_spectrum_matrix(rng, values):
    n = len(values)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return SymMatrix(q @ np.diag(values) @ q.T, tol=1e-9)


def test_sym_matrix_symmetrizes_and_is_read_only():
    m = SymMatrix([[1, 2], [2, 3]])
    assert m.order == 2
    assert not m.flags.writeable
    with pytest.raises(ValueError):
        m[0, 0] = 3
    assert type(m + m) is np.ndarray  # results are not assumed symmetric
    assert type(m[0:1, :]) is np.ndarray


def test_sym_matrix_rejects_asymmetry():
    with pytest.raises(AsymmetricInput):
        SymMatrix([[1, 2], [2.1, 3]])
    m = SymMatrix([[1, 2], [2 + 1e-14, 3]])
    assert m[0, 1] == m[1, 0]


def test_eig_decompose_identity_is_canonical():
    values, vectors = eig_decompose(np.eye(3))
    np.testing.assert_allclose(values, [1, 1, 1])
    np.testing.assert_allclose(vectors, np.eye(3))


@pytest.mark.parametrize("matrix, expected", [
    (all_ones_shift(3, 2), [0, 3, 3]),
    ([[0, 1], [1, 0]], [-1, 1]),
    (np.zeros((2, 2)), [0, 0]),
])
def test_eig_decompose_examples(matrix, expected):
    values, vectors = eig_decompose(matrix)
    np.testing.assert_allclose(values, expected, atol=1e-10)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(len(expected)), atol=1e-10)


def test_eig_decompose_reconstruction_random():
    rng = np.random.default_rng(11)
    for trial in range(100):
        n = 1 + trial % 30
        a = random_symmetric(rng, n)
        values, vectors = eig_decompose(a)
        assert np.all(np.diff(values) >= 0)
        assert np.max(np.abs(vectors @ np.diag(values) @ vectors.T - a)) <= 1e-9
        assert np.max(np.abs(vectors.T @ vectors - np.eye(n))) <= 1e-10
        np.testing.assert_allclose(values, np.linalg.eigvalsh(a), atol=1e-9)


def test_psd_check_all_ones_shift():
    verdict = psd_check(all_ones_shift(3, 2))
    assert verdict.is_psd and not verdict.is_pd
    verdict = psd_check(all_ones_shift(3, 1.9))
    assert not verdict.is_psd
    assert verdict.min_eigenvalue == pytest.approx(-0.1, abs=1e-10)
    np.testing.assert_allclose(verdict.witness, np.ones(3) / math.sqrt(3), atol=1e-8)
    witness = verdict.witness
    assert abs(witness @ all_ones_shift(3, 1.9) @ witness - verdict.min_eigenvalue) <= 1e-8


def test_psd_check_zero_matrix():
    verdict = psd_check(np.zeros((2, 2)))
    assert verdict.is_psd
    assert not verdict.is_pd
    assert verdict.min_eigenvalue == 0
    assert verdict.json()["is_psd"] is True


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_lowest_psd_shift_threshold_at_order_minus_one(n):
    z = lowest_psd_shift(lambda value: all_ones_shift(n, value), 0.0, float(n))
    assert z == pytest.approx(n - 1, abs=1e-6)


@pytest.mark.parametrize("matrix, expected", [
    ([[2, 1], [1, 2]], True),
    ([[1, 1], [1, 1]], False),
    ([[0, 1], [1, 0]], False),
])
def test_sylvester_pd(matrix, expected):
    assert sylvester_pd(matrix) is expected


@pytest.mark.parametrize("matrix, expected", [
    ([[1, 1], [1, 1]], True),
    ([[0, 1], [1, 0]], False),
    (all_ones_shift(3, 2), True),
])
def test_all_principal_minors_nonneg(matrix, expected):
    assert all_principal_minors_nonneg(matrix) is expected


def test_all_principal_minors_unsupported_size():
    with pytest.raises(UnsupportedSize):
        all_principal_minors_nonneg(np.eye(15))


def test_psd_criteria_agree_on_random_inputs():
    rng = np.random.default_rng(5)
    for trial in range(500):
        n = 2 + trial % 6
        kind = trial % 3
        values = rng.uniform(0.5, 2.0, size=n)
        if kind == 1:
            values[0] = 0.0  # singular PSD
        elif kind == 2:
            values[0] = -1.0  # indefinite
        a = random_spectrum_matrix(rng, values)
        verdict = psd_check(a)
        assert verdict.is_psd is (kind != 2)
        assert all_principal_minors_nonneg(a) is verdict.is_psd
        if kind == 0:
            assert sylvester_pd(a) is verdict.is_pd is True
        elif kind == 2:
            assert sylvester_pd(a) is verdict.is_pd is False
        else:
            assert not verdict.is_pd


def test_interlacing_random():
    rng = np.random.default_rng(3)
    for trial in range(100):
        n = 2 + trial % 9
        a = random_symmetric(rng, n)
        full, _ = eig_decompose(a)
        minor, _ = eig_decompose(a[:-1, :-1])
        assert full[0] - 1e-8 <= minor[0] <= full[1] + 1e-8
        assert full[-2] - 1e-8 <= minor[-1] <= full[-1] + 1e-8


def test_congruence_preserves_psd_status():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        values = rng.uniform(0.5, 2.0, size=n)
        if rng.random() < 0.5:
            values[0] = -1.0
        s = random_spectrum_matrix(rng, values)
        v = rng.normal(size=(n, n))
        q = v @ v.T + n * np.eye(n)
        assert psd_check(s).is_psd is psd_check(congruence(s, q)).is_psd


def test_product_trace_of_psd_pairs():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        v, w = rng.normal(size=(n, n)), rng.normal(size=(n, n))
        assert frobenius_dot(v @ v.T, w @ w.T) >= -1e-9
    u = np.array([1.0, 1.0, 0.0])
    v = np.array([1.0, -1.0, 2.0])
    a, b = np.outer(u, u), np.outer(v, v)
    assert abs(frobenius_dot(a, b)) <= 1e-9
    assert np.max(np.abs(a @ b)) <= 1e-6


def test_zero_diagonal_forces_zero_row():
    v = np.array([[1.0, 2.0], [0.0, 0.0], [3.0, -1.0]])
    a = v @ v.T
    assert psd_check(a).is_psd
    np.testing.assert_allclose(a[1], 0, atol=1e-9)
    bumped = a.copy()
    bumped[0, 1] = bumped[1, 0] = 1e-3
    assert not psd_check(bumped).is_psd


def test_chol_pd_examples():
    np.testing.assert_allclose(chol_pd(np.eye(2)).lower, np.eye(2))
    factor = chol_pd([[4, 2], [2, 5]])
    np.testing.assert_allclose(factor.lower, [[2, 0], [1, 2]])
    assert factor.rank == 2
    with pytest.raises(NotPositiveDefinite):
        chol_pd([[1, 1], [1, 1]])


def test_chol_psd_examples():
    factor = chol_psd([[1, 1], [1, 1]])
    np.testing.assert_allclose(factor.lower, [[1, 0], [1, 0]], atol=1e-12)
    assert factor.rank == 1
    factor = chol_psd(SINGULAR_CHOL)
    np.testing.assert_allclose(factor.lower, [[1, 0, 0], [1, 0, 0], [2, 0, 3]], atol=1e-10)
    assert factor.rank == 2
    factor = chol_psd(np.zeros((3, 3)))
    np.testing.assert_allclose(factor.lower, 0)
    assert factor.rank == 0


def test_chol_psd_rejects_indefinite():
    with pytest.raises(NotPsd):
        chol_psd([[0, 1], [1, 0]])
    with pytest.raises(NotPsd):
        chol_psd([[1, 0], [0, -1]])


def test_chol_psd_rank_matches_eigen_rank():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        r = int(rng.integers(0, n))
        v = rng.normal(size=(n, r))
        a = v @ v.T
        factor = chol_psd(a)
        assert np.max(np.abs(factor.lower @ factor.lower.T - a)) <= 1e-8
        assert np.all(np.diag(factor.lower) >= 0)
        assert factor.rank == rank_of(a, tol=1e-7) == r


@pytest.mark.parametrize("matrix, q_expected, r_expected", [
    (np.eye(2), np.eye(2), np.eye(2)),
    ([[1, 1], [1, 1]], np.ones((2, 1)) / math.sqrt(2), [[math.sqrt(2), math.sqrt(2)]]),
    ([[3, 0], [4, 0]], [[0.6], [0.8]], [[5, 0]]),
])
def test_gram_schmidt_qr(matrix, q_expected, r_expected):
    q, r = gram_schmidt_qr(matrix)
    np.testing.assert_allclose(q, q_expected, atol=1e-12)
    np.testing.assert_allclose(r, r_expected, atol=1e-12)
    np.testing.assert_allclose(q @ r, matrix, atol=1e-9)


def test_gram_schmidt_qr_random_rank():
    rng = np.random.default_rng(4)
    for _ in range(30):
        a = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 5))
        q, r = gram_schmidt_qr(a)
        assert q.shape == (6, 3)
        assert np.max(np.abs(q.T @ q - np.eye(3))) <= 1e-10
        assert np.max(np.abs(q @ r - a)) <= 1e-9


@pytest.mark.parametrize("matrix, expected", [
    (np.eye(3), np.eye(3)),
    ([[4, 0], [0, 9]], [[2, 0], [0, 3]]),
    (np.ones((2, 2)), np.ones((2, 2)) / math.sqrt(2)),
])
def test_principal_sqrt(matrix, expected):
    root = principal_sqrt(matrix)
    np.testing.assert_allclose(root, expected, atol=1e-10)
    np.testing.assert_allclose(root @ root, matrix, atol=1e-8)


def test_principal_sqrt_uniqueness_cross_check():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        v = rng.normal(size=(n, n))
        a = v @ v.T
        root = principal_sqrt(a)
        values, vectors = np.linalg.eigh(a)
        other = vectors @ np.diag(np.sqrt(np.clip(values, 0, None))) @ vectors.T
        np.testing.assert_allclose(root, other, atol=1e-7)
        assert psd_check(root).is_psd


def test_principal_sqrt_rejects_indefinite():
    with pytest.raises(NotPsd):
        principal_sqrt([[0, 1], [1, 0]])


@pytest.mark.parametrize("matrix, split, expected", [
    ([[1, 1], [1, 2]], 1, [[1]]),
    (np.eye(4), 2, np.eye(2)),
    ([[2, 1, 0], [1, 2, 1], [0, 1, 2]], 1, [[1.5, 1], [1, 2]]),
])
def test_schur_complement(matrix, split, expected):
    np.testing.assert_allclose(schur_complement(matrix, split), expected, atol=1e-12)


def test_schur_complement_requires_pd_leading_block():
    with pytest.raises(LeadingBlockNotPd):
        schur_complement([[0, 1], [1, 0]], 1)


def test_schur_complement_psd_equivalence():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        values = rng.uniform(0.5, 2.0, size=n)
        if rng.random() < 0.5:
            values[int(rng.integers(0, n))] = -0.5
        m = random_spectrum_matrix(rng, values)
        split = int(rng.integers(1, n))
        if not psd_check(m[:split, :split]).is_pd:
            continue
        assert psd_check(m).is_psd is psd_check(schur_complement(m, split)).is_psd


@pytest.mark.parametrize("matrix, expected", [
    (all_ones_shift(3, 2), (0, 4)),
    (np.eye(5), (1, 1)),
    (np.diag([1, 5]), (1, 5)),
])
def test_gershgorin_interval(matrix, expected):
    lo, hi = gershgorin_interval(matrix)
    assert (lo, hi) == pytest.approx(expected)
    values, _ = eig_decompose(matrix)
    assert lo - 1e-12 <= values[0] and values[-1] <= hi + 1e-12


@pytest.mark.parametrize("matrix, expected", [
    (all_ones_shift(3, 0), math.sqrt(6)),
    (np.zeros((3, 3)), 0),
    (np.eye(4), 2),
])
def test_frobenius_norm(matrix, expected):
    norm = frobenius_norm(matrix)
    assert norm == pytest.approx(expected)
    values, _ = eig_decompose(matrix)
    assert np.all(np.abs(values) <= norm + 1e-12)
    assert float(np.sum(values ** 2)) == pytest.approx(norm ** 2, abs=1e-8)


def test_frobenius_norm_bounds_all_ones_spectrum():
    # zero diagonal, -1 elsewhere: spectrum {-2, 1, 1}, largest magnitude n - 1 below the norm sqrt(6)
    values, _ = eig_decompose(all_ones_shift(3, 0))
    assert float(np.max(np.abs(values))) == pytest.approx(2)
    assert frobenius_norm(all_ones_shift(3, 0)) >= 2


@pytest.mark.parametrize("method", list(GramMethod))
def test_gram_factor_methods_reconstruct(method):
    rng = np.random.default_rng(6)
    v = rng.normal(size=(4, 2))
    a = v @ v.T
    factor = gram_factor(a, method)
    np.testing.assert_allclose(factor @ factor.T, a, atol=1e-8)
    np.testing.assert_allclose(gram_factor(np.eye(2), method) @ gram_factor(np.eye(2), method).T, np.eye(2))


def test_gram_factor_examples():
    np.testing.assert_allclose(gram_factor(np.ones((2, 2)), GramMethod.EIGEN), [[1], [1]], atol=1e-10)
    np.testing.assert_allclose(gram_factor(SINGULAR_CHOL, "cholesky"), chol_psd(SINGULAR_CHOL).lower)
    with pytest.raises(NotPsd):
        gram_factor([[0, 1], [1, 0]])


@pytest.mark.parametrize("matrix, expected", [
    (np.ones((3, 3)), 1),
    (np.eye(3), 3),
    (np.zeros((3, 3)), 0),
])
def test_rank_of(matrix, expected):
    assert rank_of(matrix) == expected
