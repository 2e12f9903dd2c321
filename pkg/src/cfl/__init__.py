"""Fidelity of entangled pairs shared through a noisy single-qubit channel."""

__version__ = "0.1.0"

from cfl.channels import (
    KrausChannel,
    amplitude_damping,
    apply_to_b,
    choi_state,
    depolarizing,
    get_channel,
    identity_channel,
    kraus_channel,
    optimal_preprocessed_input,
    phase_damping,
)
from cfl.fstar import (
    FStarResult,
    SdpCertificate,
    SolverConfig,
    channel_optimal_fidelity,
    chi_zero,
    enhancement_predicate,
    f_max,
    fstar_analytic,
    fstar_sdp,
    fstar_sdp_many,
    g_threshold,
    p_zero,
)
from cfl.measures import (
    concurrence,
    fef_magic,
    fef_sampled,
    fef_t_formula,
    fidelity_amp_closed,
    fstar_upper_bound,
    negativity,
    teleport_fidelity,
)
from cfl.states import PHI_PLUS, SchmidtState, correlation_matrix, density_of, magic_basis, schmidt_state
