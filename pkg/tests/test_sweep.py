import numpy as np
import pytest

from cfl.errors import OutOfRange
from cfl.fstar import SolverConfig, p_zero
from cfl.sweep import (
    CLASSICAL_P,
    PROPOSITIONS,
    RECORD_FIELDS,
    SweepRecord,
    VerificationReport,
    figure1_data,
    run_sweep,
    verify_propositions,
)


def test_record_fields_order():
    assert RECORD_FIELDS == tuple(SweepRecord.__dataclass_fields__)


def test_sweep_contains_enhanced_cell():
    records = run_sweep((0.5, 0.8, 3), (0.5, 0.6, 3))
    assert [(r.p, r.alpha2) for r in records][:3] == [(0.5, 0.5), (0.5, 0.55), (0.5, 0.6)]
    cell = next(r for r in records if r.p == 0.8 and r.alpha2 == pytest.approx(0.55))
    assert cell.F == pytest.approx(0.542486, abs=1e-6)
    assert cell.Fstar == pytest.approx(0.56875, abs=1e-12)
    assert cell.enhanced and cell.branch == "branch2"


def test_sweep_invariants():
    records = run_sweep((0.001, 0.999, 15), (0.5, 0.999, 15))
    for r in records:
        assert r.Fstar >= r.F - 1e-9
        assert r.Fstar <= 0.5 * (1 + r.N_out) + 1e-9
        assert r.f_tele == pytest.approx((2 * r.Fstar + 1) / 3, abs=1e-12)
        if r.p <= p_zero():
            assert not r.enhanced


def test_classical_threshold_cell():
    records = run_sweep((0.5, CLASSICAL_P, 2), (0.5, 0.9, 2))
    cell = next(r for r in records if r.p == CLASSICAL_P and r.alpha2 == 0.5)
    assert cell.F == pytest.approx(0.5, abs=1e-10)


def test_argmax_tracks_optimal_input():
    a2s = np.linspace(0.5, 0.999, 400)
    step = a2s[1] - a2s[0]
    records = run_sweep((0.05, 0.95, 7), (0.5, 0.999, 400))
    for k in range(7):
        row = records[k * 400:(k + 1) * 400]
        best = max(row, key=lambda r: r.Fstar)
        assert abs(best.alpha2 - 1 / (2 - best.p)) <= step + 1e-8


def test_sdp_sweep_matches_analytic():
    rng_p, rng_a = (0.3, 0.9, 3), (0.5, 0.9, 3)
    analytic = run_sweep(rng_p, rng_a)
    numeric = run_sweep(rng_p, rng_a, method="sdp", config=SolverConfig(restarts=16))
    for a, n in zip(analytic, numeric):
        assert n.branch == "numeric_only"
        assert n.Fstar == pytest.approx(a.Fstar, abs=1e-4)
        assert n.enhanced == a.enhanced


def test_sweep_threads_do_not_change_output():
    assert run_sweep((0.1, 0.9, 5), (0.5, 0.9, 5), threads=3) == run_sweep((0.1, 0.9, 5), (0.5, 0.9, 5))


def test_sweep_validation():
    with pytest.raises(OutOfRange):
        run_sweep((0.0, 0.5, 3), (0.5, 0.9, 3))
    with pytest.raises(OutOfRange):
        run_sweep((0.1, 0.5, 3), (0.4, 0.9, 3))
    with pytest.raises(ValueError):
        run_sweep((0.1, 0.5, 1), (0.5, 0.9, 3))
    with pytest.raises(ValueError):
        run_sweep((0.1, 0.5, 3), (0.5, 0.9, 3), method="magic")


def test_figure1_data():
    pts = figure1_data(999)
    ps = np.array([p for p, _ in pts])
    cs = np.array([c for _, c in pts])
    assert ps[0] == 0.001 and ps[-1] == 0.999
    assert np.all(np.diff(cs) < 0)
    assert cs[np.argmin(abs(ps - 0.75))] == pytest.approx(0.8, abs=5e-3)
    assert cs[-1] == pytest.approx(0.063, abs=5e-4)
    assert cs[0] == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(cs, 2 * np.sqrt(1 - ps) / (2 - ps), atol=1e-14)


def test_verification_report_semantics():
    rep = VerificationReport("P1", (3,))
    assert rep.passed
    rep.flag(0.5, None, "x")
    assert not rep.passed


def test_verify_propositions_all_pass():
    reports = verify_propositions(60, SolverConfig(restarts=16))
    assert [r.proposition for r in reports] == list(PROPOSITIONS)
    for rep in reports:
        assert rep.passed, (rep.proposition, rep.violations[:3])
    with pytest.raises(ValueError):
        verify_propositions(10)
