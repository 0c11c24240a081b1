"""Command-line front end: ``clmlab <command> [options]``.

Every command writes its data files plus a ``<stem>.manifest.json`` into
``--out-dir`` and prints a short summary.  Exit codes: 0 ok, 1 usage error,
2 domain error (e.g. evaluating at or past the singularity), 3 the evolver
guard tripped before ``--t-end``.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    blowup_snapshots,
    default_taus,
    extract_params,
    measure_scales,
    profile_error_table,
    r_of_t,
)
from .errors import CLMError, GuardTripped, WrongDegeneracy
from .spectral_evolver import EvolverConfig, deviation_from_exact, evolve
from .clm_exact import InitialDatum, conserved_quantity, evaluate, predict_blowup, snapshot
from .pole_dynamics import first_touch, track_zeros
from .presets import PRESETS, get_preset
from .rational_core import RationalFunction

EXIT_USAGE, EXIT_DOMAIN, EXIT_GUARD = 1, 2, 3

THEOREMS = {"exact": 0, "one-scale": 0, "two-scale-basic": 1, "two-scale-general": None}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _preset_epilog() -> str:
    lines = ["presets (expected blowup time T, points, exponents c_omega/c_l/c_s):"]
    for p in PRESETS.values():
        e = p.expected
        T = "none" if e.get("T") is None else f"{e['T']:.6g}"
        pts = ", ".join(f"{x:.6g}" for x in e.get("points", [])) or "-"
        exps = "/".join("-" if e.get(k) is None else f"{e[k]:g}" for k in ("c_omega", "c_l", "c_s"))
        lines.append(f"  {p.id:8s} T={T:8s} points=[{pts}]  exponents={exps}")
        lines.append(f"  {'':8s} {p.description}")
    return "\n".join(lines)


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:npts`` to a uniform grid."""
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:npts, got {spec!r}") from None
    if n < 2 or not hi > lo:
        raise argparse.ArgumentTypeError("grid needs hi > lo and npts >= 2")
    return np.linspace(lo, hi, n)


def parse_taus(spec: str) -> np.ndarray:
    """``lo:hi:npts`` to log-spaced values of T - t, largest first."""
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:npts, got {spec!r}") from None
    if not (0 < lo < hi) or n < 2:
        raise argparse.ArgumentTypeError("need 0 < lo < hi and npts >= 2")
    return np.geomspace(hi, lo, n)


def load_datum(args) -> tuple[InitialDatum, str, RationalFunction | None]:
    """Datum from ``--preset`` or ``--datum-file`` (JSON ``{"eta0": {"num": .., "den": ..}}``)."""
    if args.datum_file:
        doc = json.loads(Path(args.datum_file).read_text())
        eta0 = RationalFunction.from_json(doc["eta0"])
        label = doc.get("label", Path(args.datum_file).stem)
        return InitialDatum.from_eta0(eta0, label=label), label, eta0
    try:
        p = get_preset(args.preset)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    return p.datum(), p.id, p.eta0


def _blowup_time(datum: InitialDatum) -> float | None:
    try:
        return predict_blowup(datum).T
    except CLMError:
        return None


class Output:
    def __init__(self, args, command: str):
        self.dir = Path(args.out_dir)
        self.fmt = args.format
        self.quiet = args.quiet
        self.command = command
        self.args = args
        self.paths: list[str] = []
        self.dir.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        path.write_text(text)
        self.paths.append(str(path))
        return path

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)

    def manifest(self, stem: str, label: str, params: dict, results: dict | None = None) -> None:
        doc = {
            "command": self.command,
            "argv": self.args.argv,
            "preset": label,
            "parameters": params,
            "outputs": list(self.paths),
            "results": results or {},
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        path = self.dir / f"{stem}.manifest.json"
        path.write_text(json.dumps(doc, indent=2, default=float) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_list_presets(args) -> int:
    print(_preset_epilog())
    return 0


def cmd_exact(args) -> int:
    datum, label, _ = load_datum(args)
    out = Output(args, "exact")
    T = _blowup_time(datum)
    snap = snapshot(datum, args.grid, args.t, label)
    stem = f"exact_{label}_t{args.t:g}"
    out.write(f"{stem}.{args.format}", snap.to_csv() if args.format == "csv" else snap.to_json())
    results = {"T": T, "max_omega": float(np.max(np.abs(snap.omega)))}
    if T is not None and 0.0 in predict_blowup(datum).points:
        results["conserved"] = conserved_quantity(datum, args.t, T)
    out.manifest(stem, label, {"t": args.t, "grid": [snap.xs[0], snap.xs[-1], len(snap.xs)]}, results)
    out.say(f"exact {label}: t={args.t:g}, T={T}, max|omega|={results['max_omega']:.10g}")
    if "conserved" in results:
        out.say(f"  (T - t) H(omega)(0, t) = {results['conserved']:.15g}")
    return 0


def cmd_poles(args) -> int:
    _, label, eta0 = load_datum(args)
    zeta0 = eta0.reciprocal()
    out = Output(args, "poles")
    t1 = args.t1
    touch = None
    try:
        touch = first_touch(zeta0, t_max=max(t1 or 0.0, 100.0))
    except CLMError:
        pass
    if t1 is None:
        t1 = touch[0] if touch else 10.0
    trs = track_zeros(zeta0, args.t0, t1, n_steps=args.n_steps)
    stem = f"poles_{label}"
    for tr in trs:
        if args.format == "csv":
            out.write(f"{stem}_branch{tr.branch_id}.csv", tr.to_csv())
    if args.format == "json":
        doc = [
            {
                "branch_id": tr.branch_id,
                "t": tr.t.tolist(),
                "re_Z": tr.Z.real.tolist(),
                "im_Z": tr.Z.imag.tolist(),
                "events": [{"kind": e.kind, "t": e.t, "re_z": e.z.real, "im_z": e.z.imag} for e in tr.events],
            }
            for tr in trs
        ]
        out.write(f"{stem}.json", json.dumps(doc))
    events = sorted({(e.kind, round(e.t, 12), complex(e.z)) for tr in trs for e in tr.events}, key=lambda e: e[1])
    results = {
        "branches": len(trs),
        "touch_T": touch[0] if touch else None,
        "touch_points": touch[1] if touch else [],
        "events": [{"kind": k, "t": t, "z": [z.real, z.imag]} for k, t, z in events],
    }
    out.manifest(stem, label, {"t0": args.t0, "t1": t1, "n_steps": args.n_steps}, results)
    out.say(f"poles {label}: {len(trs)} branches on [{args.t0:g}, {t1:.12g}]")
    for k, t, z in events:
        out.say(f"  {k:16s} t={t:.12g}  z={z.real:.10g}{z.imag:+.10g}i")
    return 0


def cmd_scaling(args) -> int:
    datum, label, _ = load_datum(args)
    out = Output(args, "scaling")
    T = predict_blowup(datum).T
    taus = args.taus if args.taus is not None else default_taus()
    snaps = blowup_snapshots(datum, T, taus)
    rep = measure_scales(snaps, T, evaluator=lambda x, t: evaluate(datum, np.asarray(x, dtype=float), t)[0])
    stem = f"scaling_{label}"
    out.write(f"{stem}.json", rep.to_json() + "\n")
    out.write(f"{stem}_measurements.csv", rep.measurements_csv())
    out.manifest(stem, label, {"T": T, "taus": [float(taus.min()), float(taus.max()), len(taus)]},
                 json.loads(rep.to_json()))
    cs = "degenerate (bulk at the blowup point)" if rep.cs_degenerate else f"{rep.c_s:.4f}"
    out.say(f"scaling {label}: T={T:.12g}")
    out.say(f"  c_omega={rep.c_omega:.4f}  c_l={rep.c_l:.4f}  c_s={cs}")
    out.say(f"  c_omega + c_l - c_s + 1 = {rep.power_relation_defect:.2e}")
    return 0


def cmd_evolve(args) -> int:
    datum, label, _ = load_datum(args)
    out = Output(args, "evolve")
    T = _blowup_time(datum)
    if T is not None and args.t_end >= 0.9 * T:
        raise UsageError(f"--t-end must be below 0.9 T = {0.9 * T:.6g}")
    cfg = EvolverConfig(L=args.L, N=args.n, dt=args.dt, t_end=args.t_end, guard=args.guard,
                        snapshot_interval=args.snapshot_interval)
    run = evolve(datum, cfg, strict=True, label=label)
    stem = f"evolve_{label}"
    for k, s in enumerate(run.snapshots):
        name = f"{stem}_{k:04d}.{args.format}"
        out.write(name, s.to_csv() if args.format == "csv" else s.to_json())
    fin = run.final
    results = {"stopped_reason": run.stopped_reason, "t_final": fin.t, "halvings": len(run.step_log)}
    results["deviation"] = deviation_from_exact(fin, datum, window=min(10.0, 0.5 * args.L))
    if T is None and fin.t > 0:
        # without blowup the peak may travel; report its mean speed
        results["peak_speed"] = (_peak_position(fin) - _peak_position(run.snapshots[0])) / fin.t
    out.manifest(stem, label, {"L": args.L, "N": args.n, "dt": args.dt, "t_end": args.t_end}, results)
    out.say(f"evolve {label}: reached t={fin.t:.6g} ({run.stopped_reason})")
    out.say(f"  relative deviation from closed form on |x|<=10: {results['deviation']:.3e}")
    if "peak_speed" in results:
        out.say(f"  peak of |omega| moved at mean speed {results['peak_speed']:.6g}")
    return 0


def _peak_position(snap) -> float:
    """Location of max|omega| with parabolic refinement between grid points."""
    w = np.abs(snap.omega)
    i = int(np.argmax(w))
    if 0 < i < len(w) - 1:
        y0, y1, y2 = w[i - 1], w[i], w[i + 1]
        h = snap.xs[i + 1] - snap.xs[i]
        den = y0 - 2 * y1 + y2
        return float(snap.xs[i] + (0.5 * h * (y0 - y2) / den if den else 0.0))
    return float(snap.xs[i])


def cmd_profile_check(args) -> int:
    datum, label, _ = load_datum(args)
    out = Output(args, "profile-check")
    n = THEOREMS[args.theorem]
    if args.n is not None:
        if n is not None and args.n != n:
            raise UsageError(f"--theorem {args.theorem} fixes n = {n}")
        n = args.n
    if n is None:
        raise UsageError("--theorem two-scale-general needs --n >= 2")
    if args.theorem == "two-scale-general" and n < 2:
        raise UsageError("--theorem two-scale-general needs --n >= 2")
    params = extract_params(datum, n)
    T = predict_blowup(datum).T
    if abs(T - params.T) > 1e-8 * T or 0.0 not in predict_blowup(datum).points:
        raise WrongDegeneracy("the datum does not blow up first at the origin")
    taus = args.taus if args.taus is not None else np.geomspace(1e-2, 1e-5, 13)
    table = profile_error_table(datum, params, taus)
    stem = f"profile_{label}_{args.theorem}"
    if args.format == "csv":
        out.write(f"{stem}.csv", table.to_csv())
    else:
        out.write(f"{stem}.json", json.dumps({
            "T_minus_t": table.taus.tolist(), "err_omega": table.err_omega.tolist(),
            "err_hilbert": table.err_hilbert.tolist(),
            "slope_omega": table.slope_omega, "slope_hilbert": table.slope_hilbert}))
    results = {"params": params.to_dict(), "slope_omega": table.slope_omega,
               "slope_hilbert": table.slope_hilbert, "max_err_omega": float(table.err_omega.max())}
    if n >= 1:
        results["r"] = {f"{tau:.6g}": r_of_t(datum, params, T - tau) for tau in taus}
    out.manifest(stem, label, {"theorem": args.theorem, "n": n,
                               "taus": [float(taus.min()), float(taus.max()), len(taus)]}, results)
    out.say(f"profile-check {label} ({args.theorem}, n={n}): a={params.a:.10g} c={params.c:.10g}"
            + ("" if params.b is None else f" b={params.b:.10g}"))
    out.say(f"  max error {results['max_err_omega']:.3e}, log-log slope {table.slope_omega:.4f}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def global_flags(p, default):
        # subcommands repeat the global flags without defaults, so a value
        # given before the subcommand name is not overwritten
        p.add_argument("--out-dir", default=default("."), help="directory for outputs (default: .)")
        p.add_argument("--format", choices=("csv", "json"), default=default("csv"))
        p.add_argument("--quiet", action="store_true", default=default(False), help="suppress the summary")
        return p

    common = global_flags(_Parser(add_help=False), lambda v: v)
    sub_common = global_flags(_Parser(add_help=False), lambda v: argparse.SUPPRESS)

    parser = _Parser(
        prog="clmlab",
        description="Exact solutions, pole dynamics and blowup asymptotics for omega_t = omega H(omega).",
        epilog=_preset_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"clmlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def datum_args(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--preset", help=f"one of {', '.join(PRESETS)}")
        g.add_argument("--datum-file", help='JSON file {"eta0": {"num": [[re, im], ...], "den": [...]}}')

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, description=help_, parents=[sub_common],
                           epilog=_preset_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=fn)
        return p

    add("list-presets", cmd_list_presets, "list built-in initial data")

    p = add("exact", cmd_exact, "closed-form snapshot of omega and H(omega) at one time")
    datum_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid", type=parse_grid, default=parse_grid("-20:20:2001"), help="lo:hi:npts")

    p = add("poles", cmd_poles, "track the zeros of zeta = 1/eta in the lower half-plane")
    datum_args(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=None, help="end time (default: first touch, else 10)")
    p.add_argument("--n-steps", type=int, default=400)

    p = add("scaling", cmd_scaling, "fit blowup exponents c_omega, c_l, c_s from closed-form snapshots")
    datum_args(p)
    p.add_argument("--taus", type=parse_taus, default=None, help="T-t values lo:hi:npts, log spaced")

    p = add("evolve", cmd_evolve, "integrate numerically and compare with the closed form")
    datum_args(p)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--n", type=int, default=4096, help="grid points (power of two)")
    p.add_argument("--L", type=float, default=40.0, help="half-width of the window")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--guard", type=float, default=1e6)
    p.add_argument("--snapshot-interval", type=float, default=None)

    p = add("profile-check", cmd_profile_check, "rescaled distance to the limiting blowup profile")
    datum_args(p)
    p.add_argument("--theorem", choices=tuple(THEOREMS), required=True)
    p.add_argument("--n", type=int, default=None, help="degeneracy order for two-scale-general")
    p.add_argument("--taus", type=parse_taus, default=None, help="T-t values lo:hi:npts, log spaced")
    return parser


def _attach_range_values(argv: list[str]) -> list[str]:
    """Turn ``--grid -20:20:2001`` into ``--grid=-20:20:2001``; argparse would
    otherwise read a leading minus as an option."""
    out = []
    it = iter(range(len(argv)))
    for i in it:
        if argv[i] in ("--grid", "--taus") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            next(it, None)
        else:
            out.append(argv[i])
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _attach_range_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"clmlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardTripped as exc:
        print(f"clmlab: guard tripped: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CLMError as exc:
        print(f"clmlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"clmlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
