import numpy as np
import pytest
import scipy.linalg

from vbe import linalg
from vbe.pauli import PauliString, string_to_dense

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


class TestKron:
    def test_identity(self):
        assert np.allclose(linalg.kron(I2, I2), np.eye(4))

    def test_z_x_blocks(self):
        zx = linalg.kron(Z, X)
        expected = np.block([[X, np.zeros((2, 2))], [np.zeros((2, 2)), -X]])
        assert np.allclose(zx, expected)

    def test_xy_squares_to_identity(self):
        # oracle: direct dense multiplication
        m = linalg.kron(X, Y)
        assert np.allclose(m @ m, np.eye(4), atol=1e-14)

    def test_associativity(self, rng):
        for _ in range(5):
            a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            left = linalg.kron(linalg.kron(a, b), c)
            right = linalg.kron(a, linalg.kron(b, c))
            assert np.max(np.abs(left - right)) < 1e-12


class TestFrobeniusNorm:
    def test_zero(self):
        assert linalg.frobenius_norm(np.zeros((3, 3))) == 0.0

    def test_identity4(self):
        assert linalg.frobenius_norm(np.eye(4)) == pytest.approx(2.0)

    def test_all_ones(self):
        # oracle: elementwise sum of squared magnitudes
        assert linalg.frobenius_norm(np.ones((2, 2))) == pytest.approx(2.0)


class TestSpectralNorm:
    def test_pauli_z(self):
        assert linalg.spectral_norm(Z) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        assert linalg.spectral_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, abs=1e-12)

    def test_heisenberg_two_sites(self):
        # H = XX + YY + ZZ = 2*SWAP - I; eigenvalues {1, 1, 1, -3}
        h = linalg.kron(X, X) + linalg.kron(Y, Y) + linalg.kron(Z, Z)
        ev = np.linalg.eigvalsh(h)
        assert linalg.spectral_norm(h) == pytest.approx(max(abs(ev)), abs=1e-10)
        assert linalg.spectral_norm(h) == pytest.approx(3.0, abs=1e-10)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            linalg.spectral_norm(np.ones((2, 3)))

    def test_unitary_invariance(self, rng):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        for _ in range(5):
            u = linalg.random_unitary(8, rng)
            v = linalg.random_unitary(8, rng)
            assert linalg.spectral_norm(u @ a @ v) == pytest.approx(
                linalg.spectral_norm(a), abs=1e-9
            )


class TestMatrixExp:
    def test_zero(self):
        assert np.allclose(linalg.matrix_exp_antihermitian(np.zeros((4, 4))), np.eye(4))

    def test_z_rotation(self):
        got = linalg.matrix_exp_antihermitian(1j * (np.pi / 2) * Z)
        assert np.allclose(got, np.diag([1j, -1j]), atol=1e-12)

    def test_commuting_strings_product(self):
        # exp(i 0.3 (ZZ + XX)) must match the product of the single-string
        # exponentials cos(t) I + i sin(t) P since ZZ and XX commute.
        t = 0.3
        zz = linalg.kron(Z, Z)
        xx = linalg.kron(X, X)
        got = linalg.matrix_exp_antihermitian(1j * t * (zz + xx))
        single = lambda p: np.cos(t) * np.eye(4) + 1j * np.sin(t) * p
        assert np.max(np.abs(got - single(zz) @ single(xx))) < 1e-12

    def test_matches_scipy_expm(self, rng):
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        h = h + h.conj().T
        g = 1j * h
        assert np.max(np.abs(linalg.matrix_exp_antihermitian(g) - scipy.linalg.expm(g))) < 1e-10

    def test_inverse_pair(self, rng):
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        g = 1j * (h + h.conj().T)
        u = linalg.matrix_exp_antihermitian(g)
        w = linalg.matrix_exp_antihermitian(-g)
        assert linalg.frobenius_norm(u @ w - np.eye(4)) < 1e-10

    def test_rejects_non_antihermitian(self):
        with pytest.raises(ValueError):
            linalg.matrix_exp_antihermitian(np.diag([1.0, 2.0]))

    def test_pauli_string_involution(self, rng):
        # exp(i t P) == cos(t) I + i sin(t) P for any Pauli string P
        for letters in ["XZ", "YYX", "ZIZ"]:
            p = string_to_dense(PauliString.from_letters(letters))
            t = float(rng.uniform(-np.pi, np.pi))
            got = linalg.matrix_exp_antihermitian(1j * t * p)
            want = np.cos(t) * np.eye(p.shape[0]) + 1j * np.sin(t) * p
            assert np.max(np.abs(got - want)) < 1e-12


class TestPredicates:
    def test_identity(self):
        assert linalg.is_unitary(np.eye(4))
        assert linalg.is_hermitian(np.eye(4))

    def test_x(self):
        assert linalg.is_unitary(X)
        assert linalg.is_hermitian(X)

    def test_diag12(self):
        d = np.diag([1.0, 2.0])
        assert not linalg.is_unitary(d)
        assert linalg.is_hermitian(d)

    def test_random_unitary_is_unitary(self, rng):
        assert linalg.is_unitary(linalg.random_unitary(16, rng), tol=1e-10)
