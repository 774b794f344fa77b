"""Command-line front end.

Subcommands: ``simulate``, ``analytic``, ``compare``, ``sweep``,
``reproduce FIG`` and ``selftest``.  Failures print a single
``modeit: error: <kind>: <message>`` line on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, selftest
from .config import RunConfig
from .experiments import FIGURE_IDS, ExperimentSpec, reproduce_figure, sweep, write_csv
from .model import DecayKind, Mode
from .observables import absorption_series, fidelity_series
from .open_system import evolve_master
from .propagate import evolve_pure

EXIT_USAGE = 2
EXIT_FAILURE = 1


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int = EXIT_FAILURE):
        super().__init__(message)
        self.kind = kind
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, EXIT_USAGE)


# flag name -> RunConfig field
_RUN_FLAGS = {
    "mode": "mode",
    "tau": "tau",
    "omega_c": "omega_c",
    "omega_p": "omega_p",
    "delta": "delta",
    "decay": "decay",
    "init": "init",
    "t_end": "t_end",
    "samples_per_cycle": "samples_per_cycle",
    "out": "out",
    "format": "format",
    "jobs": "jobs",
}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--tau", type=float, help="cycle period")
    p.add_argument("--omega-c", type=float)
    p.add_argument("--omega-p", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--decay", help="none | projector:G | lindblad:Gab,Gac")
    p.add_argument("--init", help="dark | mixed:p_bb,p_cc | state:c_a,c_b,c_c")
    p.add_argument("--t-end", type=float)
    p.add_argument("--samples-per-cycle", type=int)
    p.add_argument("--out", help="output file or directory (default: $MODEIT_OUT, else stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--jobs", type=int, help="worker processes for grid evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modeit", description="Lambda-system simulator with switched probe and control fields")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one trajectory")
    _add_run_flags(p)

    p = sub.add_parser("analytic", help="evaluate a closed-form prediction on a time grid")
    _add_run_flags(p)
    p.add_argument(
        "--formula",
        required=True,
        choices=["single", "single-limit", "double", "detuned-fidelity", "detuned-absorption", "envelope", "coeffs"],
    )
    p.add_argument("--dt", type=float, help="grid spacing (default: tau)")

    p = sub.add_parser("compare", help="numeric vs analytic deviation report")
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="evaluate an observable over a tau or delta grid")
    _add_run_flags(p)
    p.add_argument("--axis", required=True, choices=["tau", "delta"])
    p.add_argument("--grid", required=True, help="start:stop:num or a comma-separated list")
    p.add_argument("--observable", required=True, choices=["envelope", "plateau", "osc_stats"])
    p.add_argument("--probe", type=float, default=80.0, help="probe time for the plateau observable")

    p = sub.add_parser("reproduce", help="write the data behind one figure")
    p.add_argument("figure", choices=FIGURE_IDS)
    p.add_argument("--out", help="output directory (default: $MODEIT_OUT, else ./out)")
    p.add_argument("--tau", help="comma-separated tau list overriding the figure default")
    p.add_argument("--omega-c", type=float)
    p.add_argument("--omega-p", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--decay")
    p.add_argument("--t-end", type=float)
    p.add_argument("--svg", action="store_true", help="also write SVG previews")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError("config", f"cannot read {args.config}: {exc.strerror}") from exc
        base = RunConfig.read_ini(text)
    try:
        cfg = RunConfig(**base)
        return cfg.merged(**{field: getattr(args, flag, None) for flag, field in _RUN_FLAGS.items()})
    except (TypeError, ValueError) as exc:
        raise CliError("config", str(exc)) from exc


def _emit(cfg: RunConfig, default_name: str, header, columns, extra: dict | None = None) -> Path | None:
    path = cfg.output_path(default_name if cfg.format == "csv" else Path(default_name).with_suffix(".json").name)
    if cfg.format == "json":
        doc = {"columns": list(header), "data": [[float(v) for v in col] for col in columns]}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=1) + "\n"
        if path is None:
            sys.stdout.write(text)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        return path
    if path is None:
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in zip(*columns):
            buf.write(",".join(format(float(v), ".12g") for v in row) + "\n")
        sys.stdout.write(buf.getvalue())
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    return write_csv(path, header, columns)


def _require_unit_rabi(cfg: RunConfig) -> None:
    if cfg.omega_c != 1.0 or cfg.omega_p != 1.0:
        raise CliError("regime", "closed-form predictions assume omega_c = omega_p = 1")


def cmd_simulate(cfg: RunConfig) -> int:
    params, schedule, init = cfg.params(), cfg.schedule(), cfg.initial_state()
    if params.decay.kind is DecayKind.NONE and init.ndim == 1:
        traj = evolve_pure(init, schedule, params, cfg.t_end, cfg.samples_per_cycle)
        F, ab = fidelity_series(traj), absorption_series(traj)
        header, cols = ["t", "F", "absorption"], [F.times, F.values, ab.values]
        summary = f"samples={len(F)} t_end={traj.t_end:.12g} F_min={F.values.min():.6f} F_max={F.values.max():.6f}"
    else:
        rho0 = np.outer(init, init.conj()) if init.ndim == 1 else init
        traj = evolve_master(rho0, schedule, params, cfg.t_end, samples_per_cycle=cfg.samples_per_cycle)
        ab = absorption_series(traj)
        pops = np.real(np.einsum("nii->ni", traj.rhos))
        header = ["t", "absorption", "rho_aa", "rho_bb", "rho_cc"]
        cols = [ab.times, ab.values, pops[:, 0], pops[:, 1], pops[:, 2]]
        summary = f"samples={len(ab)} t_end={traj.t_end:.12g} absorption_final={ab.values[-1]:.6g}"
    path = _emit(cfg, "simulate.csv", header, cols)
    if path is not None:
        print(f"wrote {path} {summary}")
    return 0


def cmd_analytic(cfg: RunConfig, formula: str, dt: float | None) -> int:
    tau, delta = cfg.tau, cfg.delta
    if formula == "coeffs":
        c = analytic.detuned_coeffs(tau, delta)
        _emit(cfg, "coeffs.csv", analytic.COEFF_COLUMNS, [[v] for v in c.row()], {"extrapolated": c.extrapolated})
        return 0
    if formula == "envelope":
        _emit(cfg, "envelope.csv", ["tau", "delta", "value"], [[tau], [delta], [analytic.absorption_envelope(tau, delta)]])
        return 0
    step = dt or tau
    t = np.arange(int(math.floor(cfg.t_end / step + 1e-9)) + 1) * step
    fn = {
        "single": lambda: analytic.fidelity_single(t, tau),
        "single-limit": lambda: analytic.fidelity_single_limit(t),
        "double": lambda: analytic.fidelity_double(t, tau),
        "detuned-fidelity": lambda: analytic.fidelity_detuned(t, tau, delta),
        "detuned-absorption": lambda: analytic.absorption_detuned(t, tau, delta),
    }[formula]
    _emit(cfg, f"analytic_{formula}.csv", ["t", "value"], [t, fn()])
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    _require_unit_rabi(cfg)
    params, schedule = cfg.params(), cfg.schedule()
    if params.decay.kind is not DecayKind.NONE:
        raise CliError("regime", "compare requires --decay none")
    if schedule.mode is Mode.STANDARD:
        raise CliError("regime", "compare requires a modulated schedule")
    if schedule.mode is Mode.SINGLE and params.delta != 0.0:
        raise CliError("regime", "the single-modulation prediction assumes delta = 0")

    traj = evolve_pure(cfg.initial_state(), schedule, params, cfg.t_end)
    F, ab = fidelity_series(traj), absorption_series(traj)
    header, cols = ["t", "F_numeric", "F_analytic"], [F.times, F.values]
    report = {"mode": schedule.mode.value, "tau": schedule.tau, "delta": params.delta, "t_end": traj.t_end}
    if schedule.mode is Mode.SINGLE:
        cols.append(analytic.fidelity_single(F.times, schedule.tau))
    elif params.delta == 0.0:
        cols.append(analytic.fidelity_double(F.times, schedule.tau))
    else:
        cols.append(analytic.fidelity_detuned(F.times, schedule.tau, params.delta))
        ab_an = analytic.absorption_detuned(F.times, schedule.tau, params.delta)
        header += ["absorption_numeric", "absorption_analytic"]
        cols += [ab.values, ab_an]
        report["max_abs_dev_absorption"] = float(np.max(np.abs(ab.values - ab_an)))
    report["max_abs_dev_F"] = float(np.max(np.abs(cols[1] - cols[2])))

    if cfg.out or os.environ.get("MODEIT_OUT"):
        _emit(cfg, "compare.csv", header, cols, report)
    if cfg.format == "json":
        print(json.dumps(report))
    else:
        print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in report.items()))
    return 0


def _parse_grid(text: str) -> np.ndarray:
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return np.linspace(float(start), float(stop), int(num))
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise CliError("config", f"invalid grid {text!r}; expected start:stop:num or a comma list") from exc


def cmd_sweep(cfg: RunConfig, args) -> int:
    grid = _parse_grid(args.grid)
    init = cfg.initial_state()
    res = sweep(cfg.schedule(), cfg.params(), args.axis, grid, args.observable, probe=args.probe, initial=init, jobs=cfg.jobs)
    header = [args.axis, *res.columns]
    cols = [res.axis] + [res.values[:, i] for i in range(len(res.columns))]
    path = _emit(cfg, f"sweep_{args.observable}.csv", header, cols)
    if path is not None:
        print(f"wrote {path} points={len(res.axis)}")
    return 0


def cmd_reproduce(args) -> int:
    out = args.out or os.environ.get("MODEIT_OUT") or "out"
    overrides = {}
    for key in ("omega_c", "omega_p", "delta", "decay", "t_end"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.tau:
        overrides["tau"] = [float(v) for v in args.tau.split(",")]
    spec = ExperimentSpec(args.figure, Path(out), overrides, svg=args.svg, jobs=args.jobs)
    files = reproduce_figure(spec)
    for f in files:
        print(f)
    return 0


def cmd_selftest() -> int:
    failures = 0
    for name, ok, detail in selftest.run_checks():
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if failures == 0 else EXIT_FAILURE


def dispatch(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise CliError("usage", "missing subcommand", EXIT_USAGE)
        if args.command == "selftest":
            return cmd_selftest()
        if args.command == "reproduce":
            return cmd_reproduce(args)
        cfg = load_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "analytic":
            return cmd_analytic(cfg, args.formula, args.dt)
        if args.command == "compare":
            return cmd_compare(cfg)
        return cmd_sweep(cfg, args)
    except CliError as exc:
        _report(exc.kind, str(exc))
        return exc.status
    except OSError as exc:
        _report("io", f"{exc.strerror or exc}: {exc.filename or ''}".rstrip(": "))
        return EXIT_FAILURE
    except (ValueError, RuntimeError) as exc:
        _report(type(exc).__name__, str(exc))
        return EXIT_FAILURE


def _report(kind: str, message: str) -> None:
    print(f"modeit: error: {kind}: {' '.join(message.split())}", file=sys.stderr)


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
