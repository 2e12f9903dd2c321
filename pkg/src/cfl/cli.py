"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 solver
disagreement with the closed form.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from cfl import __version__, channels, measures
from cfl.errors import OutOfRange
from cfl.fstar import SolverConfig, channel_optimal_fidelity, chi_zero, f_max, fstar_analytic, fstar_sdp
from cfl.states import density_of, schmidt_state
from cfl.sweep import EDGE, FIGURE1_RANGE, RECORD_FIELDS, figure1_data, run_sweep, verify_propositions

EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 1, 2, 3
DISCREPANCY_LIMIT = 1e-3


def fmt(x):
    """12 significant digits, locale independent."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _round(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(format(float(x), ".12g"))
    return x


def flat_json(record):
    return json.dumps({k: _round(v) for k, v in record.items()})


def _metadata(args, **extra):
    meta = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func")}
    meta.update(extra, version=__version__)
    return meta


def write_csv(header, rows, meta):
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_jsonl(header, rows, meta):
    lines = [json.dumps({"type": "meta", **meta}, sort_keys=True)]
    lines += [flat_json({"type": "record", **dict(zip(header, row))}) for row in rows]
    return "\n".join(lines) + "\n"


def svg_polyline(points, xlabel="p", ylabel="C(chi0)", width=800, height=600):
    """Minimal SVG line plot: linear axes, five labelled ticks on each."""
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = 0.0, max(1.0, max(ys))
    left, right, top, bottom = 80, 40, 40, 70
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(5):
        tx = x0 + (x1 - x0) * i / 4
        ty = y0 + (y1 - y0) * i / 4
        out.append(f'<line x1="{sx(tx):.2f}" y1="{top + ph}" x2="{sx(tx):.2f}" y2="{top + ph + 6}" stroke="black"/>')
        out.append(f'<text x="{sx(tx):.2f}" y="{top + ph + 22}" font-size="14" '
                   f'text-anchor="middle">{tx:.3g}</text>')
        out.append(f'<line x1="{left - 6}" y1="{sy(ty):.2f}" x2="{left}" y2="{sy(ty):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 10}" y="{sy(ty) + 5:.2f}" font-size="14" '
                   f'text-anchor="end">{ty:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 20}" font-size="16" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="20" y="{top + ph / 2}" font-size="16" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + ph / 2})">{ylabel}</text>')
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    out.append(f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver_config(args):
    return SolverConfig(restarts=args.restarts, seed=args.seed, max_iter=args.sdp_iters, tol=args.sdp_tol)


# --- subcommands -------------------------------------------------------------------

def cmd_fidelity(args):
    chan = channels.get_channel(args.channel, args.p)
    chi = schmidt_state(args.alpha2)
    rho = channels.apply_to_b(chan, density_of(chi))
    fef = measures.fef_magic(rho).value
    record = {
        "channel": args.channel, "p": args.p, "alpha2": args.alpha2,
        "F": fef,
        "C_in": chi.concurrence,
        "C_out": measures.concurrence(rho),
        "N_out": measures.negativity(rho),
        "f_tele": measures.teleport_fidelity(fef),
    }
    _emit(args, flat_json(record) + "\n")
    return 0


def cmd_fstar(args):
    record = {"channel": args.channel, "p": args.p, "alpha2": args.alpha2, "method": args.method}
    if args.method in ("analytic", "both"):
        res = fstar_analytic(args.alpha2, args.p)
        record.update(analytic=res.value, branch=res.branch, enhanced=res.enhanced)
    if args.method in ("sdp", "both"):
        rho = channels.apply_to_b(channels.get_channel(args.channel, args.p), density_of(schmidt_state(args.alpha2)))
        value, cert = fstar_sdp(rho, _solver_config(args))
        record.update(sdp=value, sdp_weight=cert.x_weight, sdp_restarts=cert.restarts_used,
                      sdp_converged=cert.converged)
        for i, z in enumerate(cert.x_vector):
            record[f"sdp_x{i}_re"] = float(z.real)
            record[f"sdp_x{i}_im"] = float(z.imag)
        if "enhanced" not in record:
            record["enhanced"] = bool(value > measures.fef_magic(rho).value + 1e-9)
    status = 0
    if args.method == "both":
        record["discrepancy"] = abs(record["sdp"] - record["analytic"])
        if record["discrepancy"] > DISCREPANCY_LIMIT:
            status = EXIT_SOLVER
    _emit(args, flat_json(record) + "\n")
    return status


def cmd_sweep(args):
    method = "analytic" if args.method == "both" else args.method
    rng_p = (EDGE, 1 - EDGE, args.grid)
    rng_a = (0.5, 1 - EDGE, args.grid)
    config = _solver_config(args)
    records = run_sweep(rng_p, rng_a, method=method, config=config, threads=args.threads)
    status = 0
    if args.method == "both":
        numeric = run_sweep(rng_p, rng_a, method="sdp", config=config, threads=args.threads)
        worst = max(abs(a.Fstar - b.Fstar) for a, b in zip(records, numeric))
        if worst > DISCREPANCY_LIMIT:
            print(f"sdp/analytic discrepancy {worst:.3g} exceeds {DISCREPANCY_LIMIT}", file=sys.stderr)
            status = EXIT_SOLVER
    rows = [r.as_row() for r in records]
    meta = _metadata(args, p_range=list(rng_p), alpha2_range=list(rng_a))
    writer = write_jsonl if args.format == "json" else write_csv
    _emit(args, writer(RECORD_FIELDS, rows, meta))
    return status


def cmd_figure1(args):
    points = figure1_data(args.n)
    if args.format == "svg":
        _emit(args, svg_polyline(points))
        return 0
    meta = _metadata(args, p_range=list(FIGURE1_RANGE))
    writer = write_jsonl if args.format == "json" else write_csv
    _emit(args, writer(("p", "C_chi0"), points, meta))
    return 0


def cmd_channel_opt(args):
    ps = [args.p] if args.p is not None else list(np.linspace(EDGE, 1 - EDGE, args.grid))
    rows = []
    for p in ps:
        opt = channel_optimal_fidelity(p)
        target = chi_zero(p).alpha2
        match = abs(opt.value - f_max(p)) <= 1e-8 and abs(opt.argmax_alpha2 - target) <= 1e-6
        rows.append((float(p), opt.value, opt.argmax_alpha2, target, match))
    header = ("p", "F_channel", "argmax_alpha2", "chi0_alpha2", "match")
    writer = write_jsonl if args.format == "json" else write_csv
    _emit(args, writer(header, rows, _metadata(args)))
    return 0 if all(r[-1] for r in rows) else EXIT_FAIL


def cmd_verify(args):
    reports = verify_propositions(args.grid, _solver_config(args))
    lines = []
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        lines.append(f"{status}  {rep.proposition:<22} grid={'x'.join(map(str, rep.grid_size))} "
                     f"violations={len(rep.violations)}")
        for p, a2, detail in rep.violations[:5]:
            lines.append(f"      p={fmt(p)} alpha2={fmt(a2)}: {detail}")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if all(r.passed for r in reports) else EXIT_FAIL


# --- parsing -----------------------------------------------------------------------

def _default_seed():
    raw = os.environ.get("CFL_SEED")
    if raw is None:
        return 7
    try:
        return int(raw)
    except ValueError:
        return 7


def build_parser():
    parser = argparse.ArgumentParser(prog="cfl", description="Entanglement fidelity through noisy qubit channels.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(sp):
        sp.add_argument("--restarts", type=int, default=64)
        sp.add_argument("--seed", type=int, default=_default_seed())
        sp.add_argument("--sdp-iters", type=int, default=500)
        sp.add_argument("--sdp-tol", type=float, default=1e-9)

    def output_flags(sp, formats):
        sp.add_argument("--out", default=None, metavar="PATH")
        sp.add_argument("--format", choices=formats, default=formats[0])

    sp = sub.add_parser("fidelity", help="unprocessed fidelity of one channel output")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha2", type=float, required=True)
    sp.add_argument("--channel", choices=sorted(channels.CHANNELS), default="amp")
    output_flags(sp, ["json"])
    sp.set_defaults(func=cmd_fidelity)

    sp = sub.add_parser("fstar", help="optimal post-processed fidelity F*")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha2", type=float, required=True)
    sp.add_argument("--channel", choices=sorted(channels.CHANNELS), default="amp")
    sp.add_argument("--method", choices=["analytic", "sdp", "both"], default="analytic")
    solver_flags(sp)
    output_flags(sp, ["json"])
    sp.set_defaults(func=cmd_fstar)

    sp = sub.add_parser("sweep", help="grid over (p, alpha2)")
    sp.add_argument("--grid", type=int, default=21)
    sp.add_argument("--method", choices=["analytic", "sdp", "both"], default="analytic")
    sp.add_argument("--threads", type=int, default=1)
    solver_flags(sp)
    output_flags(sp, ["csv", "json"])
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("figure1", help="concurrence of the optimal input versus p")
    sp.add_argument("--n", type=int, default=200)
    output_flags(sp, ["csv", "json", "svg"])
    sp.set_defaults(func=cmd_figure1)

    sp = sub.add_parser("channel-opt", help="channel-level optimum over inputs")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--grid", type=int, default=50)
    sp.add_argument("--channel", choices=sorted(channels.CHANNELS), default="amp")
    output_flags(sp, ["csv", "json"])
    sp.set_defaults(func=cmd_channel_opt)

    sp = sub.add_parser("verify", help="check every claim, print PASS/FAIL per claim")
    sp.add_argument("--grid", type=int, default=200)
    sp.add_argument("--threads", type=int, default=1)
    solver_flags(sp)
    output_flags(sp, ["text"])
    sp.set_defaults(func=cmd_verify)
    return parser


def _validate(parser, args):
    def bad(flag, msg):
        parser.error(f"argument {flag}: {msg}")

    if hasattr(args, "p") and args.p is not None:
        if not 0.0 <= args.p <= 1.0:
            bad("--p", f"{args.p} not in [0, 1]")
    if hasattr(args, "alpha2"):
        if not 0.5 <= args.alpha2 < 1.0:
            bad("--alpha2", f"{args.alpha2} not in [0.5, 1)")
    if args.command == "fstar":
        if args.method != "sdp" and args.channel != "amp":
            bad("--method", "the closed form only covers --channel amp; use --method sdp")
        if args.method != "sdp" and not 0.0 < args.p < 1.0:
            bad("--p", "the closed form needs 0 < p < 1")
    if args.command == "channel-opt":
        if args.channel != "amp":
            bad("--channel", "channel-opt supports only amp")
        if args.p is not None and not 0.0 < args.p < 1.0:
            bad("--p", "needs 0 < p < 1")
    if args.command == "sweep" and args.grid < 2:
        bad("--grid", "needs at least 2 points")
    if args.command in ("verify", "channel-opt") and args.grid < (50 if args.command == "verify" else 1):
        bad("--grid", "too small")
    if args.command == "figure1" and args.n < 2:
        bad("--n", "needs at least 2 points")
    if hasattr(args, "restarts"):
        if args.restarts < 1:
            bad("--restarts", "must be positive")
        if args.sdp_iters < 1:
            bad("--sdp-iters", "must be positive")
        if not args.sdp_tol > 0:
            bad("--sdp-tol", "must be positive")
    if hasattr(args, "threads") and args.threads < 1:
        bad("--threads", "must be positive")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return args.func(args)
    except OutOfRange as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
