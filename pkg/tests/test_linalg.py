import numpy as np
import pytest
from numpy.testing import assert_allclose

from compart_h2 import linalg
from compart_h2.exceptions import NotSchur

from helpers import random_schur


def test_kron_identity_factor():
    block = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = linalg.kron(np.eye(2), block)
    expected = np.zeros((4, 4))
    expected[:2, :2] = block
    expected[2:, 2:] = block
    assert_allclose(out, expected)


def test_kron_scalar_factor():
    m = np.array([[1.0, -2.0], [0.5, 3.0]])
    assert_allclose(linalg.kron(np.array([[2.0]]), m), 2.0 * m)


def test_kron_sparse_pattern():
    out = linalg.kron(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[1.0]]))
    assert_allclose(out, np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_vec_is_column_major():
    assert_allclose(linalg.vec(np.array([[1.0, 3.0], [2.0, 4.0]])), [1, 2, 3, 4])


def test_vec_of_column_vector_is_itself():
    v = np.array([[1.0], [2.0], [3.0]])
    assert_allclose(linalg.vec(v), [1, 2, 3])


def test_vec_mat_round_trip():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((3, 2))
    assert_allclose(linalg.mat(linalg.vec(m), 3, 2), m)


def test_mat_rejects_wrong_length():
    with pytest.raises(ValueError):
        linalg.mat(np.arange(5.0), 2, 3)


def test_vec_of_product_identity():
    # vec(a X b) = (b^T kron a) vec(X) for conformable triples
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = rng.standard_normal((3, 4))
        x = rng.standard_normal((4, 2))
        b = rng.standard_normal((2, 5))
        lhs = linalg.vec(a @ x @ b)
        rhs = linalg.kron(b.T, a) @ linalg.vec(x)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(1.0, np.linalg.norm(rhs))


def test_dlyap_scalar_recursion():
    # p = 0.25 p + 1 entrywise on the diagonal gives p = 4/3
    p = linalg.solve_dlyap_T(0.5 * np.eye(2), np.eye(2))
    assert_allclose(p, (4.0 / 3.0) * np.eye(2), atol=1e-12)
    p2 = linalg.solve_dlyap(0.5 * np.eye(2), np.eye(2))
    assert_allclose(p2, (4.0 / 3.0) * np.eye(2), atol=1e-12)


def test_dlyap_zero_map_returns_rhs():
    q = np.array([[1.0, 2.0], [-3.0, 4.0]])  # nonsymmetric on purpose
    assert_allclose(linalg.solve_dlyap_T(np.zeros((2, 2)), q), q)


def test_dlyap_matches_truncated_series():
    f = random_schur(5, 0.8, seed=3)
    rng = np.random.default_rng(4)
    half = rng.standard_normal((5, 5))
    q = half @ half.T
    p = linalg.solve_dlyap_T(f, q)
    series = np.zeros((5, 5))
    power = np.eye(5)
    for _ in range(400):  # 0.8^(2*400) is far below 1e-8
        series += power.T @ q @ power
        power = f @ power
    assert_allclose(p, series, rtol=1e-8, atol=1e-8)


def test_dlyap_residuals_on_random_batch():
    rng = np.random.default_rng(5)
    for seed in range(8):
        n = int(rng.integers(2, 7))
        f = random_schur(n, 0.85, seed=seed)
        q = np.asarray(rng.standard_normal((n, n)))
        p = linalg.solve_dlyap_T(f, q)
        resid = np.linalg.norm(f.T @ p @ f - p + q)
        assert resid <= 1e-10 * max(1.0, np.linalg.norm(q))


def test_dlyap_symmetric_rhs_gives_symmetric_psd():
    f = random_schur(6, 0.7, seed=9)
    rng = np.random.default_rng(10)
    half = rng.standard_normal((6, 6))
    q = half @ half.T
    p = linalg.solve_dlyap_T(f, q)
    assert np.linalg.norm(p - p.T) <= 1e-10 * np.linalg.norm(p)
    assert np.min(np.linalg.eigvalsh(0.5 * (p + p.T))) >= -1e-10


def test_dlyap_transpose_relation():
    f = random_schur(4, 0.6, seed=12)
    q = np.random.default_rng(13).standard_normal((4, 4))
    assert_allclose(linalg.solve_dlyap(f, q), linalg.solve_dlyap_T(f.T, q), atol=1e-12)


def test_dlyap_rejects_unstable_map():
    with pytest.raises(NotSchur):
        linalg.solve_dlyap_T(np.eye(3), np.eye(3))
    with pytest.raises(NotSchur):
        linalg.solve_dlyap_T((1.0 - 1e-10) * np.eye(2), np.eye(2))


def test_shared_factorization_solves_both_orientations():
    f = random_schur(4, 0.75, seed=20)
    rng = np.random.default_rng(21)
    solver = linalg.DlyapSolver(f)
    for _ in range(3):
        q = rng.standard_normal((4, 4))
        assert_allclose(solver.solve_transposed(q), linalg.solve_dlyap_T(f, q), atol=1e-12)
        assert_allclose(solver.solve(q), linalg.solve_dlyap(f, q), atol=1e-12)


def test_spectral_radius_nilpotent():
    assert linalg.spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0


def test_spectral_radius_diagonal():
    assert_allclose(linalg.spectral_radius(np.diag([0.5, -0.9])), 0.9)


def test_spectral_radius_requires_square():
    with pytest.raises(ValueError):
        linalg.spectral_radius(np.ones((2, 3)))


def test_sym_eig_sorts_ascending():
    eig = linalg.sym_eig(np.diag([3.0, 1.0]))
    assert_allclose(eig.eigenvalues, [1.0, 3.0])
    assert_allclose(np.abs(eig.eigenvectors), np.eye(2)[:, ::-1], atol=1e-14)


def test_sym_eig_identity():
    eig = linalg.sym_eig(np.eye(4))
    assert_allclose(eig.eigenvalues, np.ones(4))


@pytest.mark.parametrize("n", [5, 60])
def test_sym_eig_reconstruction(n):
    rng = np.random.default_rng(n)
    half = rng.standard_normal((n, n))
    sym = 0.5 * (half + half.T)
    eig = linalg.sym_eig(sym)
    q, w = eig.eigenvectors, eig.eigenvalues
    recon = (q * w) @ q.T
    assert np.linalg.norm(recon - sym) <= 1e-10 * max(1.0, np.linalg.norm(sym))
    assert np.linalg.norm(q.T @ q - np.eye(n)) <= 1e-10
    assert np.all(np.diff(w) >= 0)
