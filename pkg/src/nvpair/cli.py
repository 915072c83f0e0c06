"""Command-line entry point.

Subcommands: tune, transfer-n, transfer-p, zero-field, sweep, rwa-check,
units.  Parameters come from (lowest to highest precedence) a named preset,
a flat key=value config file, and repeated --set overrides.  Unknown keys
are rejected.  Outputs are CSV (``#`` metadata header + table) or JSON
({"meta": ..., "data": ...}); every output embeds the effective parameters,
including the tuned detuning and the tool version.

Exit codes: 0 success, 2 configuration error, 3 tuning/singularity error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .dynamics import (Trajectory, first_peak, refine_detuning,
                       run_protocol_N, run_protocol_P,
                       run_protocol_zero_field)
from .effective import (EliminationConditionError, RootSelectionError,
                        SingularShiftError, fallback_detuning, tune_detuning)
from .experiments import (rwa_validation, save_rwa_validation, save_sweep,
                          save_zero_field_scan, sweep_theta, zero_field_scan)
from .io import write_csv, write_json
from .model import ModelParams, dipole_coeffs, with_delta
from .presets import PRESETS, preset_names
from .units import PhysicalInputs, convert_units

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TUNING = 3
EXIT_IO = 4

OUTDIR_ENV = "NVPAIR_OUTDIR"

COMMANDS = ("tune", "transfer-n", "transfer-p", "zero-field", "sweep",
            "rwa-check", "units")

PARAM_KEYS = {"omega_rabi", "delta", "mu_b", "dip_prefactor", "theta",
              "omega_carrier"}
OPTION_KEYS = {
    "tune": {"protocol"},
    "transfer-n": {"tuning", "t_final", "n_samples"},
    "transfer-p": {"tuning", "t_final", "n_samples"},
    "zero-field": {"t_final", "n_samples", "scan", "ratio_min", "ratio_max",
                   "n_points"},
    "sweep": {"protocol", "tuning", "n_theta", "t_max", "n_time",
              "theta_min", "theta_max"},
    "rwa-check": {"ratios", "t_span", "steps_per_period"},
    "units": {"separation_nm", "b_field_mT", "rabi_MHz"},
}


class ConfigError(ValueError):
    pass


class RunConfig:
    """Fully resolved invocation: command, parameters, options, output."""

    def __init__(self, command: str, values: dict, output_path: str | None,
                 output_format: str):
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        allowed = PARAM_KEYS | OPTION_KEYS[command]
        unknown = set(values) - allowed
        if unknown:
            raise ConfigError(
                f"unknown keys for {command}: {sorted(unknown)}; "
                f"allowed: {sorted(allowed)}")
        self.command = command
        self.values = dict(values)
        self.output_path = output_path
        self.output_format = output_format

    def params(self) -> ModelParams:
        kwargs = {}
        for key in PARAM_KEYS:
            if key in self.values:
                kwargs[key] = self.values[key]
        try:
            return ModelParams(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def plan(self) -> dict:
        """Canonical dispatch plan; equal configs produce equal plans."""
        return {"command": self.command,
                "values": {k: self.values[k] for k in sorted(self.values)},
                "output_format": self.output_format}


def _parse_value(raw: str):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    # allow simple expressions like 0.426*pi and comma lists
    if "," in text:
        return [_parse_value(part) for part in text.split(",")]
    if text.endswith("*pi") or text.endswith("*PI"):
        try:
            return float(text[:-3]) * np.pi
        except ValueError:
            pass
    if low == "pi":
        return float(np.pi)
    return text


def read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    seen_any = False
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = body.split("=", 1)
        values[key.strip()] = _parse_value(raw)
        seen_any = True
    if not seen_any:
        raise ConfigError(f"{path}: empty config file")
    return values


def write_config_file(path: str, command: str, values: dict) -> None:
    with open(path, "w") as fh:
        fh.write(f"command = {command}\n")
        for key in sorted(values):
            val = values[key]
            if isinstance(val, (list, tuple)):
                val = ",".join(repr(float(v)) for v in val)
            elif isinstance(val, float):
                val = repr(val)
            fh.write(f"{key} = {val}\n")


def build_config(args) -> RunConfig:
    values: dict = {}
    command = args.command
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {preset_names()}")
        preset = PRESETS[args.preset]
        command = preset["command"]
        p: ModelParams = preset["params"]
        values.update(omega_rabi=p.omega_rabi, delta=p.delta, mu_b=p.mu_b,
                      dip_prefactor=p.dip_prefactor, theta=p.theta)
        for key in ("protocol", "tuning", "t_max", "n_theta"):
            if key in preset:
                values[key] = preset[key]
        if command in ("transfer-n", "transfer-p", "zero-field"):
            values.pop("delta", None)     # detuning comes from the tuner
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
        file_command = file_values.pop("command", command)
        if command is None:
            command = file_command
        elif file_command != command:
            raise ConfigError(
                f"config file names command {file_command!r} but "
                f"{command!r} was invoked")
        values.update(file_values)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        values[key.strip()] = _parse_value(raw)
    if getattr(args, "protocol", None):
        values["protocol"] = args.protocol
    if command is None:
        raise ConfigError("no command given")
    output = getattr(args, "output", None)
    if output is None and os.environ.get(OUTDIR_ENV):
        output = os.path.join(os.environ[OUTDIR_ENV], command.replace("-", "_"))
    return RunConfig(command, values, output, getattr(args, "format", "csv"))


def _resolve_delta(cfg: RunConfig, protocol: str) -> tuple[float, dict]:
    params = cfg.params()
    mode = cfg.values.get("tuning", "refined")
    info = {"tuning": mode}
    if "delta" in cfg.values:
        info["tuning"] = "explicit"
        return float(cfg.values["delta"]), info
    if mode == "fixed":
        return fallback_detuning(protocol, params), info
    tuned = tune_detuning(protocol, params)
    info["cubic_delta"] = tuned.delta
    info["cubic_residual"] = tuned.residual
    info["degenerate"] = tuned.degenerate_flag
    if mode == "cubic":
        return tuned.delta, info
    if mode != "refined":
        raise ConfigError(f"unknown tuning mode {mode!r}")
    refined = refine_detuning(protocol, params)
    info["refined_delta"] = refined.delta
    return refined.delta, info


def _traj_meta(cfg: RunConfig, params: ModelParams, delta: float, info: dict) -> dict:
    co = dipole_coeffs(params)
    meta = {"kind": cfg.command, "tool_version": __version__,
            "omega_rabi": params.omega_rabi, "mu_b": params.mu_b,
            "dip_prefactor": params.dip_prefactor, "theta": params.theta,
            "delta": delta, "axx": co.axx, "ayy": co.ayy, "azz": co.azz}
    meta.update(info)
    return meta


def _write_trajectory(cfg: RunConfig, traj: Trajectory, meta: dict,
                      extra_series: dict | None = None) -> list[str]:
    if cfg.output_path is None:
        return []
    cols = ["t"] + [f"pop_{l}" for l in traj.labels] + ["doe"]
    if extra_series:
        cols += list(extra_series)
    base = [traj.populations[l] for l in traj.labels]
    rows = []
    for i in range(len(traj.times)):
        row = [traj.times[i]] + [s[i] for s in base] + [traj.doe[i]]
        if extra_series:
            row += [extra_series[name][i] for name in extra_series]
        rows.append(tuple(row))
    if cfg.output_format == "csv":
        path = cfg.output_path + ".csv"
        write_csv(path, meta, cols, rows)
        return [path]
    path = cfg.output_path + ".json"
    write_json(path, meta, {"columns": cols, "rows": [list(r) for r in rows]})
    return [path]


def _cmd_tune(cfg: RunConfig) -> int:
    protocol = str(cfg.values.get("protocol", "n")).upper()
    params = cfg.params()
    tuned = tune_detuning(protocol, params)
    co = dipole_coeffs(params)
    if tuned.degenerate_flag:
        print(f"tune {protocol}: degenerate azz; fallback delta = 0")
        return EXIT_OK
    ratio = tuned.delta / co.azz if co.azz else float("nan")
    print(f"tune {protocol}: delta = {tuned.delta:.6f} "
          f"(delta/Azz = {ratio:.5f}), condition residual = {tuned.residual:.2e}")
    if cfg.output_path:
        meta = _traj_meta(cfg, params, tuned.delta, {"residual": tuned.residual})
        write_json(cfg.output_path + ".json", meta, {
            "delta": tuned.delta, "delta_over_azz": ratio,
            "residual": tuned.residual,
            "all_real_roots": list(tuned.all_real_roots)})
    return EXIT_OK


def _cmd_transfer(cfg: RunConfig, protocol: str) -> int:
    delta, info = _resolve_delta(cfg, protocol)
    params = with_delta(cfg.params(), delta)
    runner = run_protocol_N if protocol == "N" else run_protocol_P
    t_final = cfg.values.get("t_final")
    n_samples = int(cfg.values.get("n_samples", 2000))
    traj = runner(params, t_final=t_final, n_samples=n_samples)
    target = "N" if protocol == "N" else "P"
    pk = first_peak(traj.times, traj.populations[target])
    meta = _traj_meta(cfg, params, delta, info)
    meta["peak_population"] = pk.value
    meta["peak_time"] = pk.time
    files = _write_trajectory(cfg, traj, meta)
    print(f"transfer-{protocol.lower()}: max fidelity to |{target}> = "
          f"{pk.value:.5f} at t = {pk.time:.2f} (delta = {delta:.6f})"
          + (f"; wrote {files[0]}" if files else ""))
    return EXIT_OK


def _cmd_zero_field(cfg: RunConfig) -> int:
    params = cfg.params()
    if cfg.values.get("scan"):
        scan = zero_field_scan(
            (float(cfg.values.get("ratio_min", 0.05)),
             float(cfg.values.get("ratio_max", 2.0))),
            int(cfg.values.get("n_points", 40)))
        print(f"zero-field scan: best ratio = {scan.best_ratio:.4f} "
              f"(adjudicates {scan.metadata['adjudicated_candidate']})")
        if cfg.output_path:
            for path in save_zero_field_scan(scan, cfg.output_path,
                                             cfg.output_format):
                print(f"wrote {path}")
        return EXIT_OK
    t_final = cfg.values.get("t_final")
    n_samples = int(cfg.values.get("n_samples", 2000))
    traj, rep = run_protocol_zero_field(params, t_final=t_final,
                                        n_samples=n_samples)
    meta = _traj_meta(cfg, params, 0.0, {})
    meta.update(fidelity_to_target=rep.fidelity_to_target, doe=rep.doe,
                relative_phase=rep.relative_phase, p00=rep.p00,
                depletion_time=rep.time)
    files = _write_trajectory(cfg, traj, meta)
    print(f"zero-field: at t = {rep.time:.3f}/Azz, fidelity = "
          f"{rep.fidelity_to_target:.4f}, DoE = {rep.doe:.4f}, "
          f"phase = {rep.relative_phase:.4f} rad, p00 = {rep.p00:.4f}"
          + (f"; wrote {files[0]}" if files else ""))
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig) -> int:
    protocol = str(cfg.values.get("protocol", "n")).upper()
    params = cfg.params()
    theta_range = (float(cfg.values.get("theta_min", 0.0)),
                   float(cfg.values.get("theta_max", np.pi / 2)))
    result = sweep_theta(protocol, params, theta_range,
                         n_theta=int(cfg.values.get("n_theta", 200)),
                         tuning=str(cfg.values.get("tuning", "tuned")),
                         t_max=cfg.values.get("t_max"),
                         n_time=int(cfg.values.get("n_time", 2000)))
    best = max(result.points, key=lambda p: p.p_peak)
    print(f"sweep {protocol} ({result.tuning}): best p_peak = {best.p_peak:.5f} "
          f"at theta = {best.theta/np.pi:.4f} pi")
    if cfg.output_path:
        for path in save_sweep(result, cfg.output_path, cfg.output_format):
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_rwa_check(cfg: RunConfig) -> int:
    params = cfg.params()
    ratios = cfg.values.get("ratios", [100.0, 300.0, 500.0, 1000.0])
    if isinstance(ratios, (int, float)):
        ratios = [float(ratios)]
    comparisons = rwa_validation(
        params, [float(r) for r in ratios],
        t_span=cfg.values.get("t_span"),
        steps_per_period=int(cfg.values.get("steps_per_period", 128)))
    for c in comparisons:
        print(f"rwa-check: ratio {c.carrier_ratio:>10.0f}: overlap = "
              f"{c.overlap:.6f} (target pop lab {c.target_pop_lab:.4f} "
              f"vs rwa {c.target_pop_rwa:.4f})")
    if cfg.output_path:
        meta = _traj_meta(cfg, params, params.delta, {})
        for path in save_rwa_validation(comparisons, meta, cfg.output_path,
                                        cfg.output_format):
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_units(cfg: RunConfig) -> int:
    try:
        phys = PhysicalInputs(
            separation_nm=float(cfg.values["separation_nm"]),
            b_field_mT=float(cfg.values.get("b_field_mT", 0.0)),
            rabi_MHz=float(cfg.values["rabi_MHz"]),
            theta=float(cfg.values.get("theta", 0.0)))
    except KeyError as exc:
        raise ConfigError(f"units requires {exc.args[0]}") from exc
    conv = convert_units(phys)
    p = conv.params
    print(f"units: dip_prefactor = {p.dip_prefactor:.6g} Omega "
          f"({conv.dip_prefactor_rad_s/2/np.pi:.6g} Hz), "
          f"mu_b = {p.mu_b:.6g} Omega ({conv.mu_b_rad_s/2/np.pi:.6g} Hz)")
    if cfg.output_path:
        write_json(cfg.output_path + ".json",
                   {"kind": "units", "tool_version": __version__},
                   {"separation_nm": phys.separation_nm,
                    "b_field_mT": phys.b_field_mT,
                    "rabi_MHz": phys.rabi_MHz, "theta": phys.theta,
                    "dip_prefactor_over_omega": p.dip_prefactor,
                    "mu_b_over_omega": p.mu_b,
                    "dip_prefactor_rad_s": conv.dip_prefactor_rad_s,
                    "mu_b_rad_s": conv.mu_b_rad_s})
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvpair",
        description="Simulator and tuning toolkit for entangled-state "
                    "preparation in a dipole-coupled NV-center pair")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--preset", help=f"one of {', '.join(preset_names())}")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a single key (repeatable)")
        p.add_argument("--output", help="output path base (no extension)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name in ("tune", "sweep"):
            p.add_argument("--protocol", choices=("n", "p", "N", "P"),
                           help="shorthand for --set protocol=...")
    return parser


def dispatch(cfg: RunConfig) -> int:
    handlers = {
        "tune": _cmd_tune,
        "transfer-n": lambda c: _cmd_transfer(c, "N"),
        "transfer-p": lambda c: _cmd_transfer(c, "P"),
        "zero-field": _cmd_zero_field,
        "sweep": _cmd_sweep,
        "rwa-check": _cmd_rwa_check,
        "units": _cmd_units,
    }
    return handlers[cfg.command](cfg)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return dispatch(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularShiftError, EliminationConditionError,
            RootSelectionError) as exc:
        print(f"tuning error: {exc}", file=sys.stderr)
        return EXIT_TUNING
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
