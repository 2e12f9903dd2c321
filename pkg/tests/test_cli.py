import json

import pytest

from cfl.cli import main, svg_polyline


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    header = lines[1].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
    return meta, header, rows


def test_fidelity_command(capsys):
    code, out = run(capsys, "fidelity", "--p", "0.5", "--alpha2", "0.5")
    rec = json.loads(out.out)
    assert code == 0
    assert set(rec) >= {"F", "C_in", "C_out", "N_out", "f_tele"}
    assert rec["F"] == pytest.approx(0.728553, abs=1e-6)
    _, out = run(capsys, "fidelity", "--p", "0", "--alpha2", "0.5")
    assert json.loads(out.out)["F"] == 1


def test_fidelity_other_channels(capsys):
    _, out = run(capsys, "fidelity", "--p", "0.4", "--alpha2", "0.5", "--channel", "depol")
    assert json.loads(out.out)["F"] == pytest.approx(1 - 0.75 * 0.4, abs=1e-12)


@pytest.mark.parametrize("argv,flag", [
    (["fidelity", "--p", "1.5", "--alpha2", "0.5"], "--p"),
    (["fidelity", "--p", "0.5", "--alpha2", "1.0"], "--alpha2"),
    (["fstar", "--p", "0.5", "--alpha2", "0.5", "--channel", "phase"], "--method"),
    (["fstar", "--p", "0", "--alpha2", "0.5"], "--p"),
    (["sweep", "--grid", "1"], "--grid"),
    (["figure1", "--n", "1"], "--n"),
    (["channel-opt", "--channel", "depol"], "--channel"),
])
def test_validation_exits_2(capsys, argv, flag):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert flag in capsys.readouterr().err


def test_fstar_command(capsys):
    code, out = run(capsys, "fstar", "--p", "0.8", "--alpha2", "0.55", "--method", "both")
    rec = json.loads(out.out)
    assert code == 0
    assert rec["analytic"] == 0.56875
    assert abs(rec["sdp"] - rec["analytic"]) <= 1e-4
    assert rec["discrepancy"] <= 1e-4
    assert all(not isinstance(v, (dict, list)) for v in rec.values())
    _, out = run(capsys, "fstar", "--p", "0.5", "--alpha2", "0.9")
    rec = json.loads(out.out)
    assert rec["branch"] == "branch1" and rec["enhanced"] is False
    _, out = run(capsys, "fstar", "--p", "0.8", "--alpha2", "0.5")
    assert json.loads(out.out)["analytic"] == pytest.approx(0.5625)


def test_fstar_regression_exit_code(capsys, monkeypatch):
    import cfl.cli as cli
    from cfl.fstar import SdpResult, fstar_sdp

    def broken(rho, config=None):
        value, cert = fstar_sdp(rho, config)
        return SdpResult(value + 0.01, cert)

    monkeypatch.setattr(cli, "fstar_sdp", broken)
    code, _ = run(capsys, "fstar", "--p", "0.8", "--alpha2", "0.55", "--method", "both", "--restarts", "8")
    assert code == 3


def test_sweep_csv(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, _ = run(capsys, "sweep", "--grid", "4", "--out", str(path))
    text = path.read_text()
    meta, header, rows = parse_csv(text)
    assert code == 0
    assert header == "p,alpha2,F,Fstar,branch,C_in,C_out,N_out,enhanced,f_tele".split(",")
    assert len(rows) == 16 and meta["grid"] == 4 and meta["command"] == "sweep"
    assert "\r" not in text
    for value in rows[5].values():
        if value not in ("true", "false") and not value.startswith("branch"):
            assert len(value.replace("-", "").replace(".", "").lstrip("0")) <= 12
    run(capsys, "sweep", "--grid", "4", "--out", str(tmp_path / "again.csv"))
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_sweep_json(capsys):
    code, out = run(capsys, "sweep", "--grid", "3", "--format", "json")
    lines = [json.loads(x) for x in out.out.splitlines()]
    assert lines[0]["type"] == "meta" and len(lines) == 10
    assert lines[1]["p"] == 0.001


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CFL_SEED", "11")
    _, out = run(capsys, "sweep", "--grid", "2")
    assert json.loads(out.out.splitlines()[0][2:])["seed"] == 11
    _, out = run(capsys, "sweep", "--grid", "2", "--seed", "5")
    assert json.loads(out.out.splitlines()[0][2:])["seed"] == 5


def test_figure1_csv_and_svg(capsys, tmp_path):
    code, out = run(capsys, "figure1", "--n", "11")
    meta, header, rows = parse_csv(out.out)
    assert header == ["p", "C_chi0"] and len(rows) == 11 and meta["p_range"] == [0.001, 0.999]
    svg_path = tmp_path / "fig.svg"
    code, _ = run(capsys, "figure1", "--n", "500", "--format", "svg", "--out", str(svg_path))
    svg = svg_path.read_text()
    assert code == 0 and 'viewBox="0 0 800 600"' in svg
    pts = svg.split('points="')[1].split('"')[0].split()
    ys = [float(p.split(",")[1]) for p in pts]
    assert len(pts) == 500
    assert all(b >= a for a, b in zip(ys, ys[1:])) and ys[-1] > ys[0]  # y grows downward
    assert svg.count("<text") == 12


def test_svg_ticks():
    svg = svg_polyline([(0, 1), (1, 0)])
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_channel_opt(capsys):
    code, out = run(capsys, "channel-opt", "--p", "0.5")
    _, header, rows = parse_csv(out.out)
    assert code == 0
    assert header == ["p", "F_channel", "argmax_alpha2", "chi0_alpha2", "match"]
    assert float(rows[0]["F_channel"]) == pytest.approx(0.75)
    assert float(rows[0]["argmax_alpha2"]) == pytest.approx(2 / 3, abs=1e-6)
    assert rows[0]["match"] == "true"
    code, out = run(capsys, "channel-opt", "--grid", "20")
    assert code == 0 and len(out.out.splitlines()) == 22


def test_verify_command(capsys):
    code, out = run(capsys, "verify", "--grid", "60", "--restarts", "16")
    lines = out.out.splitlines()
    assert code == 0
    assert len(lines) == 7 and all(line.startswith("PASS") for line in lines)


def test_verify_failure_exit_code(capsys, monkeypatch):
    import cfl.cli as cli
    from cfl.sweep import VerificationReport

    def failing(grid_n, config):
        rep = VerificationReport("P1", (grid_n,))
        rep.flag(0.5, 0.5, "forced")
        return [rep]

    monkeypatch.setattr(cli, "verify_propositions", failing)
    code, out = run(capsys, "verify", "--grid", "60")
    assert code == 1 and out.out.startswith("FAIL")
