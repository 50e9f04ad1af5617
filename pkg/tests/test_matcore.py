import numpy as np
import pytest

from buresgeo import matcore
from buresgeo.errors import DimensionMismatch, NotHermitian, NotPSD


def test_hermitize_fixed_point():
    h = np.array([[1.0, 2 - 1j], [2 + 1j, -3.0]])
    np.testing.assert_allclose(matcore.hermitize(h), h)


def test_hermitize_antihermitian_killed():
    k = np.array([[1j, 2 + 1j], [-2 + 1j, -3j]])
    assert np.max(np.abs(k + k.conj().T)) < 1e-15  # anti-Hermitian by construction
    np.testing.assert_allclose(matcore.hermitize(k), np.zeros((2, 2)), atol=1e-15)


def test_hermitize_explicit():
    a = np.array([[1.0, 2j], [0.0, 1.0]])
    expected = np.array([[1.0, 1j], [-1j, 1.0]])
    np.testing.assert_allclose(matcore.hermitize(a), expected)


def test_eig_identity():
    spec = matcore.eig_hermitian(np.eye(3, dtype=complex))
    np.testing.assert_allclose(spec.eigenvalues, [1, 1, 1])
    v = spec.eigenvectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_eig_already_diagonal():
    spec = matcore.eig_hermitian(np.diag([0.2, 0.8]).astype(complex))
    np.testing.assert_allclose(spec.eigenvalues, [0.2, 0.8])
    # columns are basis vectors up to order/phase
    assert np.allclose(np.abs(spec.eigenvectors), np.eye(2), atol=1e-12)


def test_eig_pauli_x():
    # characteristic polynomial x^2 - 1 by hand: eigenvalues -1, 1
    spec = matcore.eig_hermitian(np.array([[0, 1], [1, 0]], dtype=complex))
    np.testing.assert_allclose(spec.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_eig_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        matcore.eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eig_ascending_and_reconstructs():
    # 1000 random Hermitian matrices with entries in [-1, 1] across n = 2, 3, 4
    rng = np.random.default_rng(11)
    for n in (2, 3, 4):
        for _ in range(334):
            g = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
            a = (g + g.conj().T) / 2
            spec = matcore.eig_hermitian(a)
            assert np.all(np.diff(spec.eigenvalues) >= 0)
            v = spec.eigenvectors
            assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12
            err = np.linalg.norm(spec.reconstruct() - a)
            assert err <= 1e-11 * np.linalg.norm(a)


def test_sqrt_identity():
    np.testing.assert_allclose(matcore.mat_sqrt_psd(np.eye(2, dtype=complex)),
                               np.eye(2), atol=1e-14)


def test_sqrt_diagonal():
    np.testing.assert_allclose(matcore.mat_sqrt_psd(np.diag([4.0, 9.0]).astype(complex)),
                               np.diag([2.0, 3.0]), atol=1e-13)


def test_sqrt_projector_idempotent():
    v = np.array([1.0, 1j, -2.0]) / np.sqrt(6)
    p = np.outer(v, v.conj())
    np.testing.assert_allclose(matcore.mat_sqrt_psd(p), p, atol=1e-13)


def test_sqrt_rejects_indefinite():
    with pytest.raises(NotPSD):
        matcore.mat_sqrt_psd(np.diag([1.0, -0.5]).astype(complex))


def test_sqrt_clamps_tiny_negative():
    a = np.diag([1.0, -5e-13]).astype(complex)
    b = matcore.mat_sqrt_psd(a)
    np.testing.assert_allclose(b, np.diag([1.0, 0.0]), atol=1e-6)


def test_mat_func_identity_function():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a = (g + g.conj().T) / 2
    np.testing.assert_allclose(matcore.mat_func_hermitian(a, lambda w: w), a, atol=1e-12)


def test_mat_func_cos_of_zero():
    out = matcore.mat_func_hermitian(np.zeros((3, 3), dtype=complex), np.cos)
    np.testing.assert_allclose(out, np.eye(3), atol=1e-14)


def test_mat_func_exp_of_zero_exact():
    out = matcore.mat_func_hermitian(np.zeros((2, 2), dtype=complex), np.exp)
    assert np.max(np.abs(out - np.eye(2))) <= 1e-14


def test_mat_func_sinc_sqrt_rank_one():
    # f(x) = sinc(sqrt(x)) on a rank-1 B B^dag with |B| = pi/2 has the
    # closed form I + (sin|B|/|B| - 1) B B^dag / |B|^2 = I + (2/pi - 1) B B^dag/|B|^2.
    b = (np.pi / 2) * np.array([0.6, 0.8j])
    bb = np.outer(b, b.conj())
    norm2 = (np.pi / 2) ** 2

    def f(w):
        w = np.maximum(w, 0.0)
        r = np.sqrt(w)
        return np.where(r < 1e-30, 1.0, np.sin(r) / np.where(r == 0, 1.0, r))

    out = matcore.mat_func_hermitian(bb, f)
    expected = np.eye(2) + (2 / np.pi - 1) * bb / norm2
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_sqrt_squares_back_on_random_psd():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        for _ in range(40):
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a = g.conj().T @ g
            b = matcore.mat_sqrt_psd(a)
            assert np.linalg.norm(b @ b - a) <= 1e-10 * max(1.0, np.linalg.norm(a))


def test_trace_det_examples():
    assert matcore.trace(np.eye(3, dtype=complex)) == pytest.approx(3)
    assert matcore.det(np.diag([2.0, 3.0, 4.0]).astype(complex)) == pytest.approx(24)


def test_det_multiplicative():
    rng = np.random.default_rng(9)
    for _ in range(60):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = matcore.det(matcore.mul(a, b))
        rhs = matcore.det(a) * matcore.det(b)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_dagger_involution():
    rng = np.random.default_rng(13)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_allclose(matcore.dagger(matcore.dagger(a)), a)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        matcore.mul(np.eye(2, dtype=complex), np.eye(3, dtype=complex))
    with pytest.raises(DimensionMismatch):
        matcore.add(np.eye(2, dtype=complex), np.eye(3, dtype=complex))
    with pytest.raises(DimensionMismatch):
        matcore.as_matrix(np.zeros((2, 3)))
