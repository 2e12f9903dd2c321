"""Small dense complex matrix helpers for two-qubit work (2x2 and 4x4)."""

from typing import NamedTuple

import numpy as np

from cfl.errors import NotHermitian

HERMITIAN_TOL = 1e-10
TIE_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues with eigenvectors stored column-wise."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def kron(a, b):
    """Tensor product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m):
    return np.conj(np.asarray(m)).T


def partial_transpose(m, subsystem="B"):
    """Transpose one tensor factor of a 4x4 operator on two qubits.

    Args:
        m: 4x4 matrix, or a stack of them with shape ``(..., 4, 4)``.
        subsystem: ``"A"`` (first qubit) or ``"B"`` (second qubit).
    """
    m = np.asarray(m)
    t = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    # axes: (..., a, b, a', b')
    if subsystem == "B":
        t = t.swapaxes(-3, -1)
    elif subsystem == "A":
        t = t.swapaxes(-4, -2)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(m.shape)


def phase_normalize(v, tol=1e-10):
    """Rotate the global phase so the first non-negligible entry is real positive."""
    v = np.asarray(v, dtype=complex)
    for z in v:
        if abs(z) > tol:
            return v * (abs(z) / z)
    return v


def _tie_key(v):
    return tuple(x for z in v for x in (round(z.real, 12), round(z.imag, 12)))


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Eigenvalues come back ascending. Every eigenvector is phase-normalized
    (first non-negligible entry real and positive); inside a cluster of
    eigenvalues closer than ``1e-12`` the vectors are ordered
    lexicographically by their ``(real, imag)`` entries.

    Raises:
        NotHermitian: if ``max|m - m^dagger| > 1e-10``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotHermitian("matrix has non-finite entries")
    if np.max(np.abs(m - dagger(m))) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    h = 0.5 * (m + dagger(m))
    w, v = np.linalg.eigh(h)
    vecs = [phase_normalize(v[:, i]) for i in range(len(w))]

    order = []
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and w[j] - w[j - 1] < TIE_TOL:
            j += 1
        order.extend(sorted(range(i, j), key=lambda k: _tie_key(vecs[k])))
        i = j
    return EigenDecomposition(w[order], np.column_stack([vecs[k] for k in order]))


def reduced_states(psi):
    """Both single-qubit reduced density matrices of a two-qubit vector."""
    a = np.asarray(psi, dtype=complex).reshape(2, 2)
    return a @ dagger(a), (a.T @ a.conj())


def is_maximally_entangled(psi, tol=1e-8):
    """True if both reduced states of the unit vector ``psi`` are within ``tol`` of I/2."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    ra, rb = reduced_states(psi)
    return bool(np.max(np.abs(ra - I2 / 2)) <= tol and np.max(np.abs(rb - I2 / 2)) <= tol)
