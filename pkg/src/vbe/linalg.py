"""Dense complex linear algebra primitives shared by the whole package.

Matrices are plain ``numpy.ndarray`` values with ``complex128`` dtype and
row-major semantics.  Everything here is a pure function of its inputs, so
all operations are safe to call concurrently.

Bit-order contract: qubit 0 is the leftmost tensor factor, i.e. the most
significant bit of the computational basis index.  Ancilla qubits always
occupy the lowest qubit indices, which places the encoded block in the
top-left corner of the circuit unitary.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array and check all entries are finite."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def eye(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def kron(a, b, *rest) -> np.ndarray:
    """Kronecker product of two or more matrices, left factor most significant."""
    out = np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))
    for m in rest:
        out = np.kron(out, np.asarray(m, dtype=np.complex128))
    return out


def frobenius_norm(a) -> float:
    """sqrt of the sum of squared entry magnitudes."""
    return float(np.linalg.norm(np.asarray(a)))


def spectral_norm(a) -> float:
    """Largest singular value of a square matrix.

    Computed through the eigenvalues of A†A; at the dimensions handled here
    (<= 512) this is both accurate and cheap, so no iterative scheme is used.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral_norm expects a square matrix, got {m.shape}")
    if m.shape[0] == 0:
        return 0.0
    w = np.linalg.eigvalsh(m.conj().T @ m)
    return float(np.sqrt(max(w[-1], 0.0)))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("is_hermitian expects a square matrix")
    return frobenius_norm(m - m.conj().T) <= tol


def is_unitary(a, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("is_unitary expects a square matrix")
    return frobenius_norm(m.conj().T @ m - eye(m.shape[0])) <= tol


def matrix_exp_antihermitian(g, tol: float = DEFAULT_TOL) -> np.ndarray:
    """exp(G) for anti-hermitian G, via eigendecomposition of the hermitian iG.

    The result is unitary by construction.  Raises if G is not anti-hermitian
    within ``tol``.
    """
    m = as_matrix(g)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix_exp_antihermitian expects a square matrix")
    if frobenius_norm(m + m.conj().T) > tol:
        raise ValueError("matrix is not anti-hermitian within tolerance")
    h = 1j * m  # hermitian
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)) @ v.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR decomposition of a Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # fix the phase convention so the distribution does not depend on QR details
    return q * (np.diag(r) / np.abs(np.diag(r)))
