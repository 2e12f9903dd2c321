"""Fidelity and entanglement functionals for two-qubit density matrices.

The fully entangled fraction (FEF) is available three ways:
:func:`fef_magic` is the general routine, :func:`fef_t_formula` the
correlation-matrix shortcut for states with diagonal ``T`` and
``det T < 0``, and :func:`fef_sampled` a brute-force search used to
cross-check both.
"""

import warnings
from dataclasses import dataclass
from math import cos, sin, sqrt
from typing import NamedTuple, Optional

import numpy as np

from cfl._optimize import golden_section_max
from cfl.errors import FormulaInapplicable, check_range
from cfl.linalg import I2, PAULIS, SY, hermitian_eig, is_maximally_entangled, kron, partial_transpose
from cfl.states import MAGIC_BASIS, check_density_matrix, correlation_matrix

FEF_TOL = 1e-10
SYY = kron(SY, SY)


class FefClampWarning(UserWarning):
    """An FEF estimate fell marginally outside [1/4, 1] and was clamped."""


@dataclass(frozen=True, eq=False)
class FefResult:
    value: float
    method: str
    optimizer_state: Optional[np.ndarray] = None


def _clamp_fef(value):
    if value < 0.25 - FEF_TOL or value > 1.0 + FEF_TOL:
        raise ValueError(f"fully entangled fraction {value!r} outside [1/4, 1]")
    clamped = min(max(value, 0.25), 1.0)
    if clamped != value:
        warnings.warn(f"FEF {value!r} clamped to {clamped!r}", FefClampWarning, stacklevel=3)
    return clamped


def fef_t_formula(rho):
    """``(1 + sum_i |t_ii|) / 4``, valid only for diagonal ``T`` with ``det T < 0``.

    Raises:
        FormulaInapplicable: if ``T`` has off-diagonal entries above 1e-9 or
            ``det T >= 0``.
    """
    t = correlation_matrix(rho)
    off = t - np.diag(np.diag(t))
    if np.max(np.abs(off)) > 1e-9:
        raise FormulaInapplicable("correlation matrix is not diagonal")
    if np.prod(np.diag(t)) >= 0:
        raise FormulaInapplicable("det T is not negative")
    return 0.25 * (1.0 + float(np.sum(np.abs(np.diag(t)))))


def fef_magic(rho):
    """Fully entangled fraction via the magic basis.

    In the magic basis every maximally entangled state has real
    coordinates, so the maximum overlap is the top eigenvalue of the real
    part of ``rho`` written in that basis.
    """
    rho = check_density_matrix(rho)
    in_magic = MAGIC_BASIS.conj().T @ rho @ MAGIC_BASIS
    eig = hermitian_eig(in_magic.real)
    v = eig.eigenvectors[:, -1].real
    psi = MAGIC_BASIS @ v
    return FefResult(_clamp_fef(float(eig.eigenvalues[-1])), "magic_eig", psi)


def haar_unitaries(n, rng):
    """``n`` Haar-random 2x2 unitaries, shape ``(n, 2, 2)``."""
    z = (rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))) / sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def _overlap(rho, u):
    # (U (x) I)|Phi+> is the row-major flattening of U over sqrt(2)
    psi = u.reshape(-1)
    return 0.5 * float(np.real(np.vdot(psi, rho @ psi)))


def fef_sampled(rho, n=10_000, seed=0, max_iter=200):
    """Brute-force lower bound on the fully entangled fraction.

    Evaluates ``<Psi|rho|Psi>`` on ``(U (x) I)|Phi+>`` for the identity plus
    ``n - 1`` Haar-random ``U``, then polishes the best ``U`` with
    coordinate-wise golden-section search over its three su(2) generators.
    Deterministic for a given ``seed`` and ``n``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rho = check_density_matrix(rho)
    rng = np.random.default_rng(seed)
    us = np.concatenate([I2[None], haar_unitaries(n - 1, rng)]) if n > 1 else I2[None]
    flat = us.reshape(len(us), 4)
    vals = 0.5 * np.einsum("ni,ij,nj->n", flat.conj(), rho, flat).real
    best = int(np.argmax(vals))
    u, f = us[best], float(vals[best])

    width = 0.25
    for _ in range(max_iter):
        start = f
        for sigma in PAULIS:

            def line(t, u=u, sigma=sigma):
                return _overlap(rho, u @ (cos(t) * I2 + 1j * sin(t) * sigma))

            t, ft = golden_section_max(line, -width, width, tol=1e-10)
            if ft > f:
                u, f = u @ (cos(t) * I2 + 1j * sin(t) * sigma), ft
        if f - start < 1e-15:
            break
    return f


def fidelity_amp_closed(alpha2, p):
    """Closed-form FEF of ``alpha|00> + beta|11>`` after amplitude damping on qubit B."""
    alpha2 = check_range("alpha2", alpha2, 0.5, 1.0, hi_open=True)
    p = check_range("p", p, 0.0, 1.0, hi_open=True)
    beta2 = 1.0 - alpha2
    return 0.5 * (1.0 + 2.0 * sqrt(alpha2 * beta2 * (1.0 - p)) - p * beta2)


def concurrence(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the singular values of ``Psi^T (sy (x) sy) Psi`` where
    ``rho = Psi Psi^dagger``; this avoids square roots of near-zero
    eigenvalues. Eigencomponents below ``1e-12`` relative weight are dropped.
    """
    rho = check_density_matrix(rho)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = w > 1e-12 * w[-1]
    psi = v[:, keep] * np.sqrt(w[keep])
    tau = psi.T @ SYY @ psi
    lam = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    lam = np.concatenate([lam, np.zeros(4 - len(lam))])
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def negativity(rho):
    """``max(0, -2 * lambda_min(rho^Gamma))`` with the transpose on qubit B."""
    rho = check_density_matrix(rho)
    lam_min = hermitian_eig(partial_transpose(rho, "B")).eigenvalues[0]
    return max(0.0, -2.0 * float(lam_min))


class UpperBound(NamedTuple):
    bound: float
    tight: bool


def fstar_upper_bound(rho):
    """Negativity bound ``F* <= (1 + N) / 2`` and whether it can be attained.

    The bound is tight exactly when the eigenvector of the smallest
    partial-transpose eigenvalue is maximally entangled.
    """
    rho = check_density_matrix(rho)
    eig = hermitian_eig(partial_transpose(rho, "B"))
    n = max(0.0, -2.0 * float(eig.eigenvalues[0]))
    return UpperBound(0.5 * (1.0 + n), is_maximally_entangled(eig.eigenvectors[:, 0]))


def teleport_fidelity(fef):
    """Optimal teleportation fidelity ``(2F + 1) / 3`` for FEF ``F``."""
    fef = check_range("F", fef, 0.25, 1.0)
    return (2.0 * fef + 1.0) / 3.0
