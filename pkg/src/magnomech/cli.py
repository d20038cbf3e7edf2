"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 unstable point under ``--require-stable``.  Data goes to standard output
(or ``--out``); diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import model, steadystate, sweep
from .dynamics import max_stable_gain
from .errors import ConfigError, NumericError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_UNSTABLE = 0, 2, 3, 4


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config_path: Optional[str] = None
    out: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.out is not None:
            parent = Path(self.out).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise ConfigError(f"output path not writable: {self.out}")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return dict(model.BASELINE_CONFIG)
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"malformed --set {item!r}; expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"non-numeric value in --set {item!r}") from exc
    return out


def build_params(args) -> model.SystemParams:
    params = model.from_config(load_config(args.config))
    for name, value in parse_overrides(args.set).items():
        params = sweep.apply_setting(params, name, value)
    return model.validate(params)


def _num(v):
    if v is None or isinstance(v, bool):
        return v
    if isinstance(v, complex):
        return [v.real, v.imag]
    return float(v) if math.isfinite(v) else repr(float(v))


def report_to_dict(rep: sweep.PointReport) -> dict:
    out = {
        "params": model.to_config(rep.params),
        "stable": rep.stable,
        "marginal": rep.marginal,
        "margin": rep.margin,
        "E_cm": rep.E_cm,
        "E_cb": rep.E_cb,
        "E_mb": rep.E_mb,
        "R_tau_min": rep.R_tau_min,
        "lyapunov_residual": rep.lyapunov_residual,
        "warnings": model.regime_warnings(rep.params),
    }
    if rep.matrices is not None:
        for key, mat in rep.matrices.items():
            out[key] = mat.tolist()
    return out


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=False) + "\n", out)


def gnuplot_script(csv_path: str, table: sweep.SweepTable, measure: str) -> str:
    col = sweep.CSV_HEADER.split(",").index(measure) + 1
    lines = [
        "set datafile separator ','",
        "set datafile missing ''",
        f"set xlabel '{table.x_name}'",
    ]
    if table.y_name:
        lines += [
            f"set ylabel '{table.y_name}'",
            f"set cblabel '{measure}'",
            "set view map",
            f"plot '{csv_path}' every ::1 using 1:2:{col} with image title '{measure}'",
        ]
    else:
        lines += [
            f"set ylabel '{measure}'",
            f"plot '{csv_path}' every ::1 using 1:{col} with lines title '{measure}'",
        ]
    return "\n".join(lines) + "\n"


def _write_table(args, table, measure):
    _emit(sweep.table_to_csv(table), args.out)
    for line in sweep.summarize(table):
        print(line, file=sys.stderr)
    if args.gnuplot:
        if args.out is None:
            raise ConfigError("--gnuplot requires --out")
        script = Path(args.out).with_suffix(".gp")
        script.write_text(gnuplot_script(Path(args.out).name, table, measure), encoding="utf-8")


def cmd_eval(args) -> int:
    params = build_params(args)
    rep = sweep.evaluate_point(params, tripartite=args.tripartite, keep_matrices=args.dump_matrices)
    _emit_json({k: _num(v) if not isinstance(v, (dict, list)) else v
                for k, v in report_to_dict(rep).items()}, args.out)
    if args.require_stable and not rep.stable:
        print("point is unstable", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = build_params(args)
    spec = sweep.SweepSpec(
        params, sweep.Axis.parse(args.x), sweep.Axis.parse(args.y) if args.y else None,
        tripartite=args.tripartite,
    )
    table = sweep.grid_sweep(spec, threads=args.threads)
    _write_table(args, table, args.measure)
    return EXIT_OK


def cmd_tscan(args) -> int:
    params = build_params(args)
    table = sweep.temperature_scan(params, args.t_start, args.t_stop, args.count,
                                   tripartite=args.tripartite, threads=args.threads)
    _write_table(args, table, args.measure)
    return EXIT_OK


def cmd_tri(args) -> int:
    params = build_params(args)
    table = sweep.tripartite_scan(params, sweep.Axis.parse(args.x), threads=args.threads)
    _write_table(args, table, "R_tau_min")
    return EXIT_OK


def cmd_maxgain(args) -> int:
    params = build_params(args)
    g = max_stable_gain(params, args.theta, n_theta=args.n_theta)
    _emit_json({
        "max_stable_gain": g,
        "theta": args.theta,
        "worst_case_over_theta": args.theta is None,
        "delta_c_over_omega_b": params.delta_c / params.omega_b,
        "delta_m_over_omega_b": params.delta_m_eff / params.omega_b,
    }, args.out)
    return EXIT_OK


def cmd_derive(args) -> int:
    try:
        sphere = model.SphereSpec(args.diameter, args.spin_density)
        constants = model.PhysicalConstants()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = load_config(args.config)
    omega_b = model.TWO_PI * float(cfg.get("f_b", model.BASELINE_CONFIG["f_b"]))
    g_mb = model.TWO_PI * args.g_mb
    if (args.B0 is None) == (args.target_gmb is None):
        raise ConfigError("give exactly one of --B0 or --target-gmb")
    if args.B0 is not None:
        Omega = steadystate.rabi_frequency(args.B0, sphere, constants)
    else:
        Omega = steadystate.drive_for_coupling(model.TWO_PI * args.target_gmb, g_mb, omega_b)
    B0 = steadystate.field_for_rabi(Omega, sphere, constants)
    G_mb = steadystate.effective_coupling(g_mb, Omega, omega_b)
    out = {
        "n_spins": sphere.n_spins,
        "volume_m3": sphere.volume,
        "Omega_rad_per_s": Omega,
        "B0_T": B0,
        "G_mb_rad_per_s": G_mb,
        "G_mb_over_2pi_Hz": G_mb / model.TWO_PI,
        "roundtrip_B0_rel_err": abs(steadystate.rabi_frequency(B0, sphere, constants) - Omega)
        / Omega if Omega else 0.0,
        "roundtrip_Omega_rel_err": abs(steadystate.drive_for_coupling(G_mb, g_mb, omega_b) - Omega)
        / Omega if Omega else 0.0,
    }
    if args.steady_state:
        p = model.validate(model.from_config(cfg))
        ss = steadystate.magnon_amplitude(
            p.delta_c, p.delta_m_eff, p.kappa_c, p.kappa_m, p.g_mc, g_mb, p.omega_b,
            p.gain_G, p.theta, Omega, n_spins=sphere.n_spins,
        )
        out["steady_state"] = {
            "m_avg": [ss.m_avg.real, ss.m_avg.imag],
            "q_avg": ss.q_avg,
            "delta_m_eff_over_2pi_Hz": ss.delta_m_eff / model.TWO_PI,
            "G_mb_from_amplitude_over_2pi_Hz":
                steadystate.coupling_from_amplitude(g_mb, ss.m_avg) / model.TWO_PI,
            "iterations": ss.iterations,
            "residual": ss.residual,
            "other_intensity_roots": list(ss.other_roots),
            "excitation_warning": ss.excitation_warning,
        }
    _emit_json(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config (frequencies as omega/2pi in Hz); baseline if omitted")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
    common.add_argument("--set", action="append", metavar="NAME=VALUE",
                        help="override a parameter field (rad/s, K, rad) or normalized axis")
    common.add_argument("--require-stable", action="store_true")
    common.add_argument("--dump-matrices", action="store_true")
    common.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to --out")

    parser = argparse.ArgumentParser(prog="magnomech", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one working point")
    p.add_argument("--tripartite", action="store_true", help="also compute R_tau_min")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", parents=[common], help="1-D or 2-D parameter grid")
    p.add_argument("--x", required=True, help="axis name:start:stop:count")
    p.add_argument("--y", help="second axis name:start:stop:count")
    p.add_argument("--tripartite", action="store_true")
    p.add_argument("--measure", default="E_cm", choices=sweep.MEASURES, help="column for --gnuplot")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tscan", parents=[common], help="temperature scan at fixed detunings")
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-stop", type=float, default=0.3)
    p.add_argument("--count", type=int, default=61)
    p.add_argument("--tripartite", action="store_true")
    p.add_argument("--measure", default="E_cm", choices=sweep.MEASURES)
    p.set_defaults(func=cmd_tscan)

    p = sub.add_parser("tri", parents=[common], help="minimal residual contangle along one axis")
    p.add_argument("--x", default="delta_c_over_omega_b:-2:0:201")
    p.set_defaults(func=cmd_tri)

    p = sub.add_parser("maxgain", parents=[common], help="largest stable parametric gain")
    p.add_argument("--theta", type=float, default=None, help="pump phase; worst case over phases if omitted")
    p.add_argument("--n-theta", type=int, default=64)
    p.set_defaults(func=cmd_maxgain)

    p = sub.add_parser("derive", parents=[common], help="drive field, Rabi frequency and coupling")
    p.add_argument("--diameter", type=float, default=250e-6, help="sphere diameter (m)")
    p.add_argument("--spin-density", type=float, default=4.22e27, help="spins per m^3")
    p.add_argument("--g-mb", type=float, default=0.2, help="bare magnomechanical coupling g_mb/2pi (Hz)")
    p.add_argument("--B0", type=float, help="drive field amplitude (T)")
    p.add_argument("--target-gmb", type=float, help="target G_mb/2pi (Hz)")
    p.add_argument("--steady-state", action="store_true",
                   help="also solve for <m>, reading the config delta_m_eff as the bare detuning")
    p.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunManifest(args.command, args.config, args.out, parse_overrides(args.set))
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
