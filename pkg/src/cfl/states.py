"""Two-qubit pure states in Schmidt form, density matrices and correlations."""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from cfl.errors import InvalidDensityMatrix, NonRealCorrelation, check_range
from cfl.linalg import PAULIS, dagger, kron

STATE_TOL = 1e-10


@dataclass(frozen=True)
class SchmidtState:
    """The pure state ``alpha|00> + beta|11>`` with real ``alpha >= beta > 0``.

    ``alpha2`` (the squared coefficient of ``|00>``) is the only stored
    parameter; ``alpha2 == 0.5`` is the Bell state ``|Phi+>``.
    """

    alpha2: float

    def __post_init__(self):
        check_range("alpha2", self.alpha2, 0.5, 1.0, hi_open=True)

    @property
    def alpha(self):
        return sqrt(self.alpha2)

    @property
    def beta(self):
        return sqrt(1.0 - self.alpha2)

    @property
    def vector(self):
        return np.array([self.alpha, 0, 0, self.beta], dtype=complex)

    @property
    def concurrence(self):
        return 2.0 * self.alpha * self.beta


def schmidt_state(alpha2):
    """Build ``sqrt(alpha2)|00> + sqrt(1 - alpha2)|11>``; ``alpha2`` in [1/2, 1)."""
    return SchmidtState(float(alpha2))


PHI_PLUS = SchmidtState(0.5)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def density_of(chi):
    """Rank-one density matrix of a :class:`SchmidtState` (or a raw 4-vector)."""
    vec = chi.vector if isinstance(chi, SchmidtState) else np.asarray(chi, dtype=complex)
    return projector(vec / np.linalg.norm(vec))


def check_density_matrix(rho, tol=STATE_TOL, error=InvalidDensityMatrix):
    """Validate a 4x4 density matrix and return it as a complex array.

    Checks Hermiticity, unit trace and positivity, each to ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise error(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise error("density matrix has non-finite entries")
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise error("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise error(f"density matrix trace {np.trace(rho).real:.3g} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] < -tol:
        raise error("density matrix has a negative eigenvalue")
    return rho


def correlation_matrix(rho):
    """Real 3x3 matrix ``t_ij = Tr[rho sigma_i (x) sigma_j]``.

    Raises:
        NonRealCorrelation: if any trace has an imaginary part above 1e-10.
    """
    rho = check_density_matrix(rho)
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            z = np.trace(rho @ kron(si, sj))
            if abs(z.imag) > STATE_TOL:
                raise NonRealCorrelation(f"Tr[rho s{i} s{j}] has imaginary part {z.imag:.3g}")
            t[i, j] = z.real
    return t


_S = 1 / sqrt(2)
# Columns: |Phi+>, i|Phi->, i|Psi+>, |Psi->. Maximally entangled states have
# real coordinates (up to a global phase) in this basis.
MAGIC_BASIS = np.array(
    [
        [_S, 1j * _S, 0, 0],
        [0, 0, 1j * _S, _S],
        [0, 0, 1j * _S, -_S],
        [_S, -1j * _S, 0, 0],
    ],
    dtype=complex,
)


def magic_basis():
    """The magic basis as the columns of a 4x4 unitary."""
    return MAGIC_BASIS.copy()
