"""Optimal fidelity under trace-preserving LOCC (F*) for amplitude damping.

Two independent routes are provided. :func:`fstar_analytic` evaluates the
two-branch closed form for ``rho(chi, Lambda_p)``. :func:`fstar_sdp` solves
the semidefinite program

    maximize 1/2 - Tr(X rho^Gamma)
    s.t. 0 <= X <= I,  -I/2 <= X^Gamma <= I/2

for any two-qubit ``rho``, searching only over rank-one ``X = w|x><x|``
where the optimum is known to lie.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import pi, sqrt
from typing import NamedTuple

import numpy as np

from cfl._optimize import golden_section_max
from cfl.errors import NotConvergedWarning, check_range
from cfl.linalg import hermitian_eig, partial_transpose, reduced_states
from cfl.measures import fidelity_amp_closed
from cfl.states import SchmidtState, check_density_matrix

ENHANCE_TOL = 1e-9


def g_threshold(p):
    """Branch boundary ``p^2 / (1 - p + p^2)`` in ``alpha2``; needs ``0 < p < 1``."""
    p = check_range("p", p, 0.0, 1.0, lo_open=True, hi_open=True)
    return p * p / (1.0 - p + p * p)


def p_zero():
    """Noise level ``(sqrt(5) - 1) / 2`` above which post-processing can help."""
    return (sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FStarResult:
    value: float
    branch: str
    alpha2: float
    p: float
    enhanced: bool


def _branch2_value(alpha2, p):
    return 0.5 * (1.0 + alpha2 * (1.0 - p) / p)


def fstar_analytic(alpha2, p):
    """Closed-form F* of ``alpha|00> + beta|11>`` with qubit B amplitude-damped.

    For ``alpha2 >= g(p)`` (``branch1``) F* equals the unprocessed FEF, so no
    enhancement is possible. Below ``g(p)`` (``branch2``)
    ``F* = (1 + alpha2 (1 - p) / p) / 2``. The endpoints are handled
    directly: at ``p = 0`` the state is pure and F* is its FEF, at ``p = 1``
    the output is separable and F* is 1/2.
    """
    alpha2 = check_range("alpha2", alpha2, 0.5, 1.0, hi_open=True)
    p = check_range("p", p, 0.0, 1.0)
    if p == 0.0:
        return FStarResult(fidelity_amp_closed(alpha2, 0.0), "endpoint", alpha2, p, False)
    if p == 1.0:
        return FStarResult(0.5, "endpoint", alpha2, p, False)
    if alpha2 >= g_threshold(p):
        return FStarResult(fidelity_amp_closed(alpha2, p), "branch1", alpha2, p, False)
    return FStarResult(_branch2_value(alpha2, p), "branch2", alpha2, p, True)


def enhancement_predicate(alpha2, p):
    """Whether local trace-preserving operations raise the FEF of ``rho(chi, Lambda_p)``.

    True iff ``p0 < p < 1`` and ``alpha2 < g(p)``; in terms of the input's
    concurrence this is ``C(chi) > C(chi(g(p)))``.
    """
    alpha2 = check_range("alpha2", alpha2, 0.5, 1.0, hi_open=True)
    p = check_range("p", p, 0.0, 1.0)
    if p <= p_zero() or p == 1.0:
        return False
    return alpha2 < g_threshold(p)


def chi_zero(p):
    """Input state maximizing the unprocessed fidelity: ``alpha2 = 1 / (2 - p)``."""
    p = check_range("p", p, 0.0, 1.0, lo_open=True, hi_open=True)
    return SchmidtState(1.0 / (2.0 - p))


def f_max(p):
    p = check_range("p", p, 0.0, 1.0, lo_open=True, hi_open=True)
    return 1.0 - p / 2.0


class ChannelOptimum(NamedTuple):
    value: float
    argmax_alpha2: float


def channel_optimal_fidelity(p, grid_n=1000):
    """Maximize analytic F* over Schmidt inputs for amplitude damping ``p``.

    A uniform scan of ``grid_n`` points on ``[1/2, 1)`` is followed by a
    golden-section polish (tolerance 1e-10 in ``alpha2``) around the best
    grid cell.
    """
    p = check_range("p", p, 0.0, 1.0, lo_open=True, hi_open=True)
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    grid = 0.5 + 0.5 * np.arange(grid_n) / grid_n
    values = [fstar_analytic(a, p).value for a in grid]
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[k + 1] if k + 1 < grid_n else np.nextafter(1.0, 0.0)
    a, v = golden_section_max(lambda x: fstar_analytic(x, p).value, lo, hi, tol=1e-10)
    if values[k] > v:
        a, v = grid[k], values[k]
    return ChannelOptimum(float(v), float(a))


# --- numeric SDP over rank-one X -------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`fstar_sdp`.

    Every restart gets ``screen_iters`` pattern-search sweeps; the best
    ``keep`` per state are then polished for up to ``max_iter`` sweeps or
    until the step falls below ``step_tol``. ``tol`` is the feasibility
    tolerance applied to the reported certificate.
    """

    restarts: int = 64
    seed: int = 7
    max_iter: int = 500
    tol: float = 1e-9
    screen_iters: int = 30
    keep: int = 16
    step_tol: float = 1e-7

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or self.keep < 1:
            raise ValueError("restarts, max_iter and keep must be positive")
        if not self.tol > 0 or not self.step_tol > 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class SdpCertificate:
    x_vector: np.ndarray
    x_weight: float
    objective: float
    restarts_used: int
    converged: bool

    @property
    def x(self):
        """The certified operator ``X = w |x><x|`` with ``x`` normalized."""
        v = self.x_vector / np.linalg.norm(self.x_vector)
        return self.x_weight * np.outer(v, v.conj())


class SdpResult(NamedTuple):
    value: float
    certificate: SdpCertificate


N_PARAMS = 7
_QUARTER = pi / 4


def rank1_vectors(theta):
    """Unit vectors ``(U (x) V)(cos t|00> + sin t|11>)`` from parameter rows.

    Columns of ``theta``: Schmidt angle ``t`` in [0, pi/4], then three
    angles for each of ``U`` and ``V`` in SU(2). Also returns ``cos(t)^2``,
    the largest Schmidt weight.
    """
    t = theta[:, 0]
    c, s = np.cos(t), np.sin(t)
    ca, sa = np.cos(theta[:, 1]), np.sin(theta[:, 1])
    cb, sb = np.cos(theta[:, 4]), np.sin(theta[:, 4])
    e1, f1 = np.exp(1j * theta[:, 2]), np.exp(1j * theta[:, 3])
    e2, f2 = np.exp(1j * theta[:, 5]), np.exp(1j * theta[:, 6])
    u00, u01, u10, u11 = ca * e1, -sa * f1.conj(), sa * f1, ca * e1.conj()
    v00, v01, v10, v11 = cb * e2, -sb * f2.conj(), sb * f2, cb * e2.conj()
    x = np.empty((len(t), 4), dtype=complex)
    x[:, 0] = c * u00 * v00 + s * u01 * v01
    x[:, 1] = c * u00 * v10 + s * u01 * v11
    x[:, 2] = c * u10 * v00 + s * u11 * v01
    x[:, 3] = c * u10 * v10 + s * u11 * v11
    return x, c * c


def _objective(theta, rho_pt):
    # Full feasible weight w = 1 / (2 cos^2 t). The objective is linear in w,
    # so searching at full weight and falling back to w = 0 loses nothing.
    x, c2 = rank1_vectors(theta)
    e = np.einsum("ni,nij,nj->n", x.conj(), rho_pt, x).real
    return 0.5 - e / (2.0 * c2)


def _pattern_search(theta, f, step, rho_pt, iters, step_tol):
    """Compass search, in place; rows stop once their step drops below ``step_tol``."""
    active = np.flatnonzero(step >= step_tol)
    for _ in range(iters):
        if active.size == 0:
            break
        th, fa, st, r = theta[active], f[active], step[active], rho_pt[active]
        improved = np.zeros(active.size, dtype=bool)
        for k in range(N_PARAMS):
            for sign in (1.0, -1.0):
                trial = th.copy()
                trial[:, k] += sign * st
                if k == 0:
                    np.clip(trial[:, 0], 0.0, _QUARTER, out=trial[:, 0])
                ft = _objective(trial, r)
                better = ft > fa + 1e-15
                th[better] = trial[better]
                fa[better] = ft[better]
                improved |= better
        st = np.where(improved, st * 1.5, st * 0.5)
        theta[active], f[active], step[active] = th, fa, st
        active = active[st >= step_tol]


def _initial_params(config):
    rng = np.random.default_rng(config.seed)
    scale = np.array([_QUARTER] + [2 * pi] * (N_PARAMS - 1))
    return rng.uniform(0.0, 1.0, (config.restarts, N_PARAMS)) * scale


def _certify(x, rho_pt, tol):
    """Project ``w|x><x|`` onto the feasible set and report ``(w, objective)``."""
    x = x / np.linalg.norm(x)
    e = float(np.real(np.vdot(x, rho_pt @ x)))
    if e >= 0.0:
        return 0.0, 0.5
    proj = np.outer(x, x.conj())
    pt_eigs = hermitian_eig(partial_transpose(proj, "B")).eigenvalues
    ra, _ = reduced_states(x)
    w = min(1.0, 0.5 / float(np.max(np.abs(pt_eigs))), 0.5 / float(np.linalg.eigvalsh(ra)[-1]))
    # The reduced-state bound and the PT spectrum agree analytically; keep
    # the smaller so rounding never pushes X outside the window.
    xg = hermitian_eig(partial_transpose(w * proj, "B")).eigenvalues
    if xg[0] < -0.5 - tol or xg[-1] > 0.5 + tol:
        raise RuntimeError("rank-one certificate failed feasibility projection")
    return w, 0.5 - w * e


def _solve_block(rho_pts, config):
    n_states, R = len(rho_pts), config.restarts
    theta = np.tile(_initial_params(config), (n_states, 1))
    rho_rows = np.repeat(rho_pts, R, axis=0)
    f = _objective(theta, rho_rows)
    step = np.full(n_states * R, 0.5)
    _pattern_search(theta, f, step, rho_rows, min(config.screen_iters, config.max_iter), config.step_tol)

    keep = min(config.keep, R)
    order = np.argsort(-f.reshape(n_states, R), axis=1, kind="stable")[:, :keep]
    rows = (np.arange(n_states)[:, None] * R + order).ravel()
    theta, f, step, rho_rows = theta[rows], f[rows], step[rows], rho_rows[rows]
    _pattern_search(theta, f, step, rho_rows, config.max_iter, config.step_tol)

    f = f.reshape(n_states, keep)
    converged = (step < config.step_tol).reshape(n_states, keep).any(axis=1)
    best = np.argmax(f, axis=1)
    x, _ = rank1_vectors(theta.reshape(n_states, keep, N_PARAMS)[np.arange(n_states), best])
    out = []
    for i in range(n_states):
        w, obj = _certify(x[i], rho_pts[i], config.tol)
        cert = SdpCertificate(x[i] / np.linalg.norm(x[i]), w, obj, R, bool(converged[i]))
        out.append(SdpResult(obj, cert))
    return out


def fstar_sdp_many(rhos, config=None, threads=1, chunk=256):
    """Solve the rank-one F* program for a sequence of density matrices.

    Each state sees the same seeded restarts, so the result for a state does
    not depend on what else is in the batch or on ``threads``.
    """
    config = config or SolverConfig()
    rho_pts = np.array([partial_transpose(check_density_matrix(r), "B") for r in rhos])
    if len(rho_pts) == 0:
        return []
    blocks = [rho_pts[i:i + chunk] for i in range(0, len(rho_pts), chunk)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _solve_block(b, config), blocks))
    else:
        parts = [_solve_block(b, config) for b in blocks]
    results = [r for part in parts for r in part]
    n_bad = sum(not r.certificate.converged for r in results)
    if n_bad:
        warnings.warn(f"{n_bad} state(s) had no converged restart", NotConvergedWarning, stacklevel=2)
    return results


def fstar_sdp(rho, config=None):
    """Numeric F* of a two-qubit state; returns ``(value, certificate)``.

    Issues :class:`NotConvergedWarning` and sets ``certificate.converged``
    to False when no restart met the step tolerance within ``max_iter``.
    """
    return fstar_sdp_many([rho], config)[0]
