"""Parameter sweeps over (p, alpha2), Figure-1 data and claim verification."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from cfl import channels, measures
from cfl.errors import check_range
from cfl.fstar import (
    SolverConfig,
    channel_optimal_fidelity,
    chi_zero,
    enhancement_predicate,
    f_max,
    fstar_analytic,
    fstar_sdp_many,
    g_threshold,
    p_zero,
)
from cfl.linalg import partial_transpose, hermitian_eig, is_maximally_entangled
from cfl.states import PHI_PLUS, density_of, schmidt_state

EDGE = 1e-3
FIGURE1_RANGE = (0.001, 0.999)
CLASSICAL_P = 2.0 * (sqrt(2.0) - 1.0)

RECORD_FIELDS = ("p", "alpha2", "F", "Fstar", "branch", "C_in", "C_out", "N_out", "enhanced", "f_tele")


@dataclass(frozen=True)
class SweepRecord:
    p: float
    alpha2: float
    F: float
    Fstar: float
    branch: str
    C_in: float
    C_out: float
    N_out: float
    enhanced: bool
    f_tele: float

    def as_row(self):
        return tuple(getattr(self, name) for name in RECORD_FIELDS)


def output_state(alpha2, p):
    """``rho(chi, Lambda_p)``: Schmidt input with qubit B amplitude-damped."""
    return channels.apply_to_b(channels.amplitude_damping(p), density_of(schmidt_state(alpha2)))


def _grid(rng, name, lo, hi, lo_open, hi_open):
    lo_v, hi_v, n = rng
    n = int(n)
    if n < 2:
        raise ValueError(f"{name} grid needs at least 2 points")
    check_range(f"{name} lower bound", lo_v, lo, hi, lo_open, hi_open)
    check_range(f"{name} upper bound", hi_v, lo, hi, lo_open, hi_open)
    return np.linspace(lo_v, hi_v, n)


def _record(p, alpha2, fstar_value, branch, enhanced):
    rho = output_state(alpha2, p)
    fef = measures.fef_magic(rho).value
    return SweepRecord(
        p=float(p),
        alpha2=float(alpha2),
        F=fef,
        Fstar=fstar_value,
        branch=branch,
        C_in=schmidt_state(alpha2).concurrence,
        C_out=measures.concurrence(rho),
        N_out=measures.negativity(rho),
        enhanced=enhanced,
        f_tele=measures.teleport_fidelity(min(fstar_value, 1.0)),
    )


def run_sweep(p_range=(EDGE, 1 - EDGE, 11), alpha2_range=(0.5, 1 - EDGE, 11), method="analytic",
              config=None, threads=1):
    """Evaluate every ``(p, alpha2)`` grid cell, ``p`` varying slowest.

    ``method="analytic"`` takes F* from the closed form; ``"sdp"`` solves
    the rank-one program for every cell instead (branch ``numeric_only``,
    enhanced when F* exceeds F by more than 1e-9).
    """
    if method not in ("analytic", "sdp"):
        raise ValueError(f"method must be 'analytic' or 'sdp', got {method!r}")
    ps = _grid(p_range, "p", 0.0, 1.0, True, True)
    a2s = _grid(alpha2_range, "alpha2", 0.5, 1.0, False, True)
    cells = [(p, a) for p in ps for a in a2s]

    if method == "analytic":
        def build(cell):
            res = fstar_analytic(cell[1], cell[0])
            return _record(cell[0], cell[1], res.value, res.branch, res.enhanced)
    else:
        rhos = [output_state(a, p) for p, a in cells]
        numeric = [r.value for r in fstar_sdp_many(rhos, config or SolverConfig(), threads=threads)]
        lookup = dict(zip(cells, numeric))

        def build(cell):
            rec = _record(cell[0], cell[1], lookup[cell], "numeric_only", False)
            enhanced = rec.Fstar > rec.F + 1e-9
            return SweepRecord(**{**rec.__dict__, "enhanced": enhanced})

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build, cells))
    return [build(c) for c in cells]


def figure1_data(n=200):
    """Concurrence of the optimal input ``chi0(p)`` on ``n`` points of [0.001, 0.999]."""
    if n < 2:
        raise ValueError("n must be at least 2")
    ps = np.linspace(*FIGURE1_RANGE, n)
    return [(float(p), chi_zero(p).concurrence) for p in ps]


# --- verification ----------------------------------------------------------------

PROPOSITIONS = ("P1", "P2", "P3", "ordering_remark", "choi_eigvec", "entanglement_breaking",
                "classical_threshold")


@dataclass
class VerificationReport:
    proposition: str
    grid_size: tuple
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def flag(self, p, alpha2, detail):
        self.violations.append((float(p), None if alpha2 is None else float(alpha2), detail))


def _check_p1(ps, config):
    rep = VerificationReport("P1", (len(ps),))
    for p in ps:
        best = fstar_analytic(chi_zero(p).alpha2, p).value
        bell = fstar_analytic(0.5, p).value
        if not best > bell:
            rep.flag(p, 0.5, f"F*(chi0)={best!r} not above F*(Phi+)={bell!r}")
        bound = measures.fstar_upper_bound(output_state(0.5, p))
        if not bell < bound.bound or bound.tight or abs(bound.bound - f_max(p)) > 1e-10:
            rep.flag(p, 0.5, f"bound chain broken: F*={bell!r}, bound={bound!r}")
    if config is not None:
        probes = [0.2, 0.4, 0.6, 0.8]
        numeric = fstar_sdp_many([output_state(0.5, p) for p in probes], config)
        for p, res in zip(probes, numeric):
            expected = fstar_analytic(0.5, p).value
            if abs(res.value - expected) > 1e-4:
                rep.flag(p, 0.5, f"SDP {res.value!r} vs analytic {expected!r}")
    return rep


def _check_p2(ps, a2s):
    rep = VerificationReport("P2", (len(ps), len(a2s)))
    probes = []
    for p in ps:
        cells = [(p, a) for a in a2s]
        if p_zero() < p < 1:
            g = g_threshold(p)
            cells += [(p, a) for a in (g - 1e-6, g + 1e-6) if 0.5 <= a < 1]
        probes.extend(cells)
    for p, a in probes:
        pred = enhancement_predicate(a, p)
        gain = fstar_analytic(a, p).value - measures.fidelity_amp_closed(a, p)
        if pred != (gain > 0.0):
            rep.flag(p, a, f"predicate {pred} but F*-F={gain!r}")
        if p_zero() < p < 1:
            by_concurrence = schmidt_state(a).concurrence > schmidt_state(g_threshold(p)).concurrence
            if by_concurrence != pred:
                rep.flag(p, a, "concurrence form of the condition disagrees")
    return rep


def _check_p3(ps):
    rep = VerificationReport("P3", (len(ps),))
    for p in ps:
        opt = channel_optimal_fidelity(p)
        if abs(opt.value - f_max(p)) > 1e-8:
            rep.flag(p, opt.argmax_alpha2, f"optimum {opt.value!r} != 1 - p/2")
        if abs(opt.argmax_alpha2 - 1.0 / (2.0 - p)) > 1e-6:
            rep.flag(p, opt.argmax_alpha2, "argmax differs from 1/(2-p)")
        if p_zero() < p and not opt.argmax_alpha2 > g_threshold(p):
            rep.flag(p, opt.argmax_alpha2, "optimum found in the enhancement branch")
    return rep


def _check_ordering(ps, a2s):
    rep = VerificationReport("ordering_remark", (len(ps), len(a2s)))
    for p in ps:
        c_bell = measures.concurrence(output_state(0.5, p))
        c_opt = measures.concurrence(output_state(chi_zero(p).alpha2, p))
        if not c_bell > c_opt:
            rep.flag(p, 0.5, f"C_out(Phi+)={c_bell!r} not above C_out(chi0)={c_opt!r}")
        c_out = [measures.concurrence(output_state(a, p)) for a in a2s]
        for a, hi, lo in zip(a2s[1:], c_out, c_out[1:]):
            if lo > hi + 1e-12:
                rep.flag(p, a, "concurrence ordering not preserved")
    return rep


def _check_choi(ps):
    rep = VerificationReport("choi_eigvec", (len(ps), 3))
    for p in ps:
        if channels.optimal_preprocessed_input(channels.amplitude_damping(p)).maximally_entangled:
            rep.flag(p, None, "amplitude damping optimizer is maximally entangled")
    for p in np.concatenate([[0.0], ps]):
        for family in (channels.phase_damping, channels.depolarizing):
            res = channels.optimal_preprocessed_input(family(p))
            if not res.maximally_entangled:
                rep.flag(p, None, f"{family.__name__} optimizer not maximally entangled")
    return rep


def _check_breaking(a2s):
    rep = VerificationReport("entanglement_breaking", (len(a2s),))
    for a in a2s:
        c = measures.concurrence(output_state(a, 1.0))
        if abs(c) > 1e-10:
            rep.flag(1.0, a, f"C_out={c!r} at p=1")
        rho = output_state(a, 1.0)
        if hermitian_eig(partial_transpose(rho, "B")).eigenvalues[0] < -1e-12:
            rep.flag(1.0, a, "output not PPT at p=1")
        approach = [measures.concurrence(output_state(a, p)) for p in (1 - 1e-3, 1 - 1e-6, 1 - 1e-9)]
        if not approach[0] > approach[1] > approach[2] or approach[2] >= 1e-4:
            rep.flag(1 - 1e-9, a, f"C_out not vanishing as p -> 1: {approach!r}")
    return rep


def _check_classical(ps):
    rep = VerificationReport("classical_threshold", (len(ps),))
    for p in ps:
        f = measures.fidelity_amp_closed(0.5, p)
        if (p >= CLASSICAL_P) != (f <= 0.5):
            rep.flag(p, 0.5, f"F={f!r} on the wrong side of 1/2")
    lo, hi = 0.5, 0.99
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if measures.fidelity_amp_closed(0.5, mid) > 0.5:
            lo = mid
        else:
            hi = mid
    if abs(0.5 * (lo + hi) - CLASSICAL_P) > 1e-9:
        rep.flag(0.5 * (lo + hi), 0.5, "threshold crossing misplaced")
    if abs(measures.teleport_fidelity(0.5) - 2.0 / 3.0) > 1e-15:
        rep.flag(CLASSICAL_P, 0.5, "F = 1/2 does not map to teleportation fidelity 2/3")
    return rep


def verify_propositions(grid_n=200, config=None):
    """Check every claim on a ``grid_n`` grid; failures are reported, never raised.

    With a :class:`SolverConfig`, the Bell-input F* values behind P1 are
    also confirmed by the numeric solver at a few noise levels.
    """
    if grid_n < 50:
        raise ValueError("grid_n must be at least 50")
    ps = np.linspace(EDGE, 1 - EDGE, grid_n)
    a2s = np.linspace(0.5, 1 - EDGE, grid_n)
    coarse = a2s[:: max(1, grid_n // 50)]
    return [
        _check_p1(ps, config),
        _check_p2(ps, a2s),
        _check_p3(ps),
        _check_ordering(ps, coarse),
        _check_choi(ps),
        _check_breaking(coarse),
        _check_classical(ps),
    ]
