"""``helilqr`` command-line interface.

Exit codes: 0 success, 1 computational failure, 2 input/validation failure.
"""

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import controllability_rank, stability_report
from .exceptions import ComputationError, HeliLqrError, ValidationError
from .lqr import LqrSolution, closed_loop_matrix, default_weights, lqr_gain
from .model import STATE_LABELS, build_system, load_params_file
from .numerics import TOL_RANK
from .scenario import CLOSED_LOOP, NoiseConfig, load_scenario_file, preset_scenario
from .sim import (
    Trajectory,
    settling_metrics,
    simulate_closed_loop,
    simulate_open_loop,
    steady_state,
)
from .svgplot import GROUPS, trajectory_charts

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT = 0, 1, 2

DEFAULT_MODEL = "r50_forward.json"


class InputFileError(HeliLqrError):
    pass


def default_model_path():
    return resources.files("helilqr") / "data" / DEFAULT_MODEL


def _floats(text, count, name):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if len(values) != count:
        raise ValidationError(f"{name}: expected {count} values, got {len(values)}")
    return np.array(values)


def _read_path(path):
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"file not found: {path}")
    return path


def _load_system(args):
    path = default_model_path() if args.config is None else _read_path(args.config)
    return build_system(load_params_file(path))


def _weights(args, ss):
    q = None if args.q_diag is None else _floats(args.q_diag, ss.n_states, "--q-diag")
    r = None if args.r_diag is None else _floats(args.r_diag, ss.n_inputs, "--r-diag")
    return default_weights(ss, q, r)


def _emit_json(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_eig(args):
    ss = _load_system(args)
    a = ss.A
    if args.closed_loop:
        sol = lqr_gain(ss, _weights(args, ss))
        a = closed_loop_matrix(ss, sol.K)
    report = stability_report(a)
    doc = report.to_dict()
    doc["system"] = "closed_loop" if args.closed_loop else "open_loop"
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_ctrb(args):
    ss = _load_system(args)
    result = controllability_rank(ss, args.tol)
    doc = result.to_dict()
    doc["tol"] = args.tol
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_lqr(args):
    ss = _load_system(args)
    sol = lqr_gain(ss, _weights(args, ss))
    _emit_json(sol.to_dict(), args.out)
    slow = sol.slowest_pole
    msg = f"residual={sol.care_residual:.3e} slowest_pole={slow.real:.6g}{slow.imag:+.6g}j\n"
    (sys.stdout if args.out is not None else sys.stderr).write(msg)
    return EXIT_OK


def _scenario(args):
    noise = None
    if args.noise_std is not None:
        std = _floats(args.noise_std, len(STATE_LABELS), "--noise-std")
        noise = NoiseConfig(std=std, enabled=True)
    if args.scenario is not None:
        sc = load_scenario_file(_read_path(args.scenario))
        changes = {}
        for key in ("dt", "duration", "seed"):
            if getattr(args, key) is not None:
                changes[key] = getattr(args, key)
        if noise is not None:
            changes["noise"] = noise
        if args.feedforward:
            changes["feedforward"] = True
        if changes:
            fields = {k: getattr(sc, k) for k in sc.__dataclass_fields__}
            fields.update(changes)
            sc = type(sc)(**fields)
        return sc
    return preset_scenario(
        args.preset or "forward",
        dt=args.dt,
        duration=args.duration,
        seed=args.seed if args.seed is not None else 0,
        noise=noise,
        feedforward=args.feedforward,
    )


def _gain(args, ss):
    if args.gain is not None:
        doc = json.loads(_read_path(args.gain).read_text(encoding="utf-8"))
        return LqrSolution.from_dict(doc).K
    return lqr_gain(ss, _weights(args, ss)).K


def cmd_sim(args):
    ss = _load_system(args)
    sc = _scenario(args)
    summary = {}
    if sc.kind == CLOSED_LOOP:
        k = _gain(args, ss)
        traj = simulate_closed_loop(ss, k, sc)
        if sc.feedforward:
            target = traj.meta["x_target"]
        else:
            target = steady_state(ss, k, sc.reference.as_state_vector())
        summary["steady_state"] = dict(zip(STATE_LABELS, map(float, target)))
        summary["settling_metrics"] = settling_metrics(traj, target)
    else:
        traj = simulate_open_loop(ss, sc)
        summary["settling_metrics"] = None
    summary = {
        "kind": sc.kind,
        "diverged": traj.diverged,
        "final_time": float(traj.times[-1]),
        "final_state": dict(zip(STATE_LABELS, map(float, traj.final_state))),
        **summary,
    }

    csv_text = traj.to_csv()
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        Path(args.out).write_text(csv_text, encoding="ascii", newline="")
    summary_path = args.summary
    if summary_path is None and args.out is not None:
        summary_path = Path(args.out).with_suffix(".summary.json")
    if summary_path is not None:
        Path(summary_path).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    if traj.diverged:
        sys.stderr.write(f"diverged=true at t={traj.times[-1]:.6g} s\n")
    if args.plot is not None:
        _write_charts(traj, args.plot, args.groups)
    return EXIT_OK


def _write_charts(traj, directory, groups):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, svg in trajectory_charts(traj, groups).items():
        (directory / f"{name}.svg").write_text(svg, encoding="utf-8")


def cmd_plot(args):
    traj = Trajectory.from_csv(_read_path(args.csv).read_text(encoding="ascii"))
    _write_charts(traj, args.out or ".", args.groups)
    return EXIT_OK


def _groups(text):
    groups = tuple(g.strip() for g in text.split(",") if g.strip())
    for g in groups:
        if g not in GROUPS:
            raise argparse.ArgumentTypeError(f"unknown group {g!r}; choose from {', '.join(GROUPS)}")
    return groups


def build_parser():
    parser = argparse.ArgumentParser(
        prog="helilqr",
        description="Linear small-scale helicopter model: stability, controllability, "
        "LQR synthesis and simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--config", metavar="MODEL.json",
                       help=f"parameter file (default: bundled {DEFAULT_MODEL}, ft/s/rad)")
    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--q-diag", metavar="CSV",
                         help="13 comma-separated state weights >= 0 (default: identity)")
    weights.add_argument("--r-diag", metavar="CSV",
                         help="4 comma-separated input weights > 0 (default: identity)")

    p = sub.add_parser("eig", parents=[model, weights],
                       help="modal stability report (eigenvalues in rad/s)")
    p.add_argument("--closed-loop", action="store_true",
                   help="report A - BK with the LQR gain instead of A")
    p.add_argument("--out", metavar="PATH", help="write JSON report here (default: stdout)")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("ctrb", parents=[model], help="Kalman controllability rank test")
    p.add_argument("--tol", type=float, default=TOL_RANK,
                   help="relative rank threshold, dimensionless (default: %(default)g)")
    p.add_argument("--out", metavar="PATH", help="write JSON report here (default: stdout)")
    p.set_defaults(func=cmd_ctrb)

    p = sub.add_parser("lqr", parents=[model, weights], help="solve the CARE and write the gain")
    p.add_argument("--out", metavar="GAIN.json", help="write gain JSON here (default: stdout)")
    p.set_defaults(func=cmd_lqr)

    p = sub.add_parser("sim", parents=[model, weights], help="simulate a scenario to CSV")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=("forward", "axial", "open-collective"),
                     help="built-in scenario (default: forward)")
    src.add_argument("--scenario", metavar="SCENARIO.json", help="scenario file")
    p.add_argument("--seed", type=int, help="noise stream seed, unsigned integer (default: 0)")
    p.add_argument("--dt", type=float, help="integration step [s] (default: 0.01)")
    p.add_argument("--duration", type=float,
                   help="horizon [s] (default: 40 closed loop, 30 open-collective)")
    p.add_argument("--noise-std", metavar="CSV",
                   help="13 measurement-noise standard deviations in state units "
                   "(ft/s, rad/s, rad); enables noise")
    p.add_argument("--feedforward", action="store_true",
                   help="add least-squares trim feedforward for the commanded channels")
    p.add_argument("--gain", metavar="GAIN.json", help="use a precomputed gain file")
    p.add_argument("--out", metavar="TRAJ.csv", help="trajectory CSV (default: stdout)")
    p.add_argument("--summary", metavar="PATH",
                   help="run-summary JSON (default: next to --out as *.summary.json)")
    p.add_argument("--plot", metavar="DIR", help="also write SVG charts into DIR")
    p.add_argument("--groups", type=_groups, default=("velocities", "attitudes", "rates"),
                   help="chart groups: velocities [ft/s], attitudes [deg], rates [deg/s], "
                   "controls [deg] (default: velocities,attitudes,rates)")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("plot", help="render SVG charts from a trajectory CSV")
    p.add_argument("--csv", required=True, metavar="TRAJ.csv", help="trajectory CSV input")
    p.add_argument("--out", metavar="DIR", help="output directory (default: .)")
    p.add_argument("--groups", type=_groups, default=("velocities", "attitudes", "rates"),
                   help="chart groups: velocities [ft/s], attitudes [deg], rates [deg/s], "
                   "controls [deg]")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputFileError, ValidationError) as exc:
        sys.stderr.write(f"helilqr {args.command}: error: {exc}\n")
        return EXIT_INPUT
    except ComputationError as exc:
        sys.stderr.write(f"helilqr {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"helilqr {args.command}: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
