"""Single-qubit Kraus channels acting on the second qubit of a pair."""

import warnings
from dataclasses import dataclass
from math import sqrt
from typing import NamedTuple

import numpy as np

from cfl.errors import ChannelOutputInvalid, DegenerateTopWarning, check_range
from cfl.linalg import I2, SX, SY, SZ, dagger, hermitian_eig, is_maximally_entangled, kron
from cfl.states import PHI_PLUS, check_density_matrix, density_of

TP_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    name: str
    kraus_ops: tuple
    p: float

    def __post_init__(self):
        check_range("p", self.p, 0.0, 1.0)
        total = sum(dagger(k) @ k for k in self.kraus_ops)
        if np.max(np.abs(total - I2)) > TP_TOL:
            raise ValueError(f"Kraus operators of {self.name!r} are not trace preserving")

    def __call__(self, sigma):
        """Apply the channel to a single-qubit operator."""
        return sum(k @ sigma @ dagger(k) for k in self.kraus_ops)


def kraus_channel(kraus_ops, name="custom", p=0.0):
    """Generic constructor; validates ``sum_i K_i^dagger K_i = I``."""
    ops = tuple(np.array(k, dtype=complex).reshape(2, 2) for k in kraus_ops)
    for k in ops:
        k.setflags(write=False)
    return KrausChannel(name, ops, float(p))


def amplitude_damping(p):
    """Amplitude damping with decay probability ``p`` in [0, 1].

    Kraus operators are ``diag(1, sqrt(1-p))`` and ``sqrt(p)|0><1|``.
    """
    p = check_range("p", p, 0.0, 1.0)
    m0 = np.diag([1.0, sqrt(1.0 - p)])
    m1 = np.array([[0.0, sqrt(p)], [0.0, 0.0]])
    return kraus_channel([m0, m1], "amp", p)


def phase_damping(p):
    p = check_range("p", p, 0.0, 1.0)
    return kraus_channel([np.diag([1.0, sqrt(1.0 - p)]), np.diag([0.0, sqrt(p)])], "phase", p)


def depolarizing(p):
    """Depolarizing channel; ``p = 1`` sends every input to I/2."""
    p = check_range("p", p, 0.0, 1.0)
    a, b = sqrt(1.0 - 0.75 * p), sqrt(p / 4.0)
    return kraus_channel([a * I2, b * SX, b * SY, b * SZ], "depol", p)


def identity_channel():
    return kraus_channel([I2], "identity", 0.0)


CHANNELS = {"amp": amplitude_damping, "phase": phase_damping, "depol": depolarizing}


def get_channel(name, p):
    """Look up a channel family by its CLI name (``amp``, ``phase``, ``depol``)."""
    try:
        family = CHANNELS[name]
    except KeyError:
        raise ValueError(f"unknown channel {name!r}; choose from {sorted(CHANNELS)}") from None
    return family(p)


def apply_to_b(channel, rho):
    """``sum_i (I (x) M_i) rho (I (x) M_i)^dagger`` for a two-qubit state."""
    rho = check_density_matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    for k in channel.kraus_ops:
        big = kron(I2, k)
        out += big @ rho @ dagger(big)
    return check_density_matrix(out, error=ChannelOutputInvalid)


def choi_state(channel):
    """Output of sending the second half of ``|Phi+>`` through ``channel``."""
    return apply_to_b(channel, density_of(PHI_PLUS))


class PreprocessedOptimum(NamedTuple):
    f_max_pre: float
    state: np.ndarray
    maximally_entangled: bool
    degenerate: bool


def optimal_preprocessed_input(channel):
    """Best fidelity reachable without post-processing, and the input achieving it.

    The value is the top eigenvalue of the Choi state; the input is the
    matching eigenvector. If that eigenvalue is degenerate a
    :class:`DegenerateTopWarning` is issued and the tie-broken vector is
    returned.
    """
    eig = hermitian_eig(choi_state(channel))
    top = float(eig.eigenvalues[-1])
    degenerate = bool(top - eig.eigenvalues[-2] < DEGENERACY_TOL)
    if degenerate:
        warnings.warn(f"top Choi eigenvalue of {channel.name} is degenerate", DegenerateTopWarning, stacklevel=2)
    vec = eig.eigenvectors[:, -1]
    return PreprocessedOptimum(top, vec, is_maximally_entangled(vec), degenerate)
