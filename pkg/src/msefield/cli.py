"""``msefield`` command-line front end.

Usage: ``msefield <command> --config FILE [flags]``.

Settings come from the JSON config; command-line flags override the config,
which overrides built-in defaults. The whole config is parsed and checked
before any computation starts.

Exit codes: 0 success, 1 negative domain result (infeasible target, stalled
trajectory, failed check), 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .channel import MacChannel, MimoMacChannel
from .mimo import mimo_rates_along_path, mimo_sum_rate
from .path import DecodingPath, validate_path
from .rates import QuadratureSpec, rates_gaussian, verify_path_independence
from .region import (
    InfeasibleTargetError,
    OffFaceError,
    is_feasible,
    region_report,
    synthesize_path_for_tuple,
)
from .simulate import evolve, monte_carlo_ese
from .transfer import format_float, matched_decs, synthesize_matching_dec

COMMANDS = (
    "rates",
    "region",
    "dec-curve",
    "trajectory",
    "validate-mc",
    "mimo-rates",
    "path-check",
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    channel: MacChannel | None = None
    mimo_channel: MimoMacChannel | None = None
    paths: dict[str, DecodingPath] = field(default_factory=dict)
    path_name: str | None = None
    units: str = "nats"
    output: str = "json"
    tolerance: float = 1e-9
    seed: int | None = None
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def path(self) -> DecodingPath:
        return self.paths[self.path_name]


def _num_users(raw: dict) -> int | None:
    for key in ("channel", "mimo_channel"):
        if key in raw and isinstance(raw[key], dict):
            return len(raw[key].get("users", [])) or None
    return None


def _require(raw: dict, key: str, where: str = "config"):
    if key not in raw:
        raise ConfigError(f"{where} is missing key {key!r}")
    return raw[key]


def _parse_paths(raw: dict) -> dict[str, DecodingPath]:
    declared = raw.get("paths", {})
    if not isinstance(declared, dict):
        raise ConfigError("'paths' must map names to path descriptors")
    k = _num_users(raw)
    out = {}
    for name, desc in declared.items():
        try:
            out[name] = DecodingPath.from_dict(desc, num_users=k)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"paths[{name!r}]: {exc}") from None
    return out


def _pick_path(raw: dict, args, paths: dict) -> str:
    name = args.path if args.path is not None else raw.get("path")
    if name is None:
        raise ConfigError("config is missing key 'path' (name of a declared path)")
    if name not in paths:
        raise ConfigError(f"path {name!r} is not declared under 'paths'")
    return name


def _float_list(value, key: str) -> list[float]:
    try:
        out = [float(x) for x in value]
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be a list of numbers") from None
    if not all(math.isfinite(x) for x in out):
        raise ConfigError(f"{key!r} must contain finite numbers")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Parse and validate everything the command needs."""
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    cfg = RunConfig(command=args.command)
    cfg.units = args.units or raw.get("units", "nats")
    cfg.output = args.output or raw.get("output", "json")
    if cfg.units not in ("nats", "bits"):
        raise ConfigError(f"units must be 'nats' or 'bits', got {cfg.units!r}")
    if cfg.output not in ("json", "csv"):
        raise ConfigError(f"output must be 'json' or 'csv', got {cfg.output!r}")
    tol = args.tolerance if args.tolerance is not None else raw.get("tolerance", 1e-9)
    try:
        cfg.tolerance = float(tol)
    except (TypeError, ValueError):
        raise ConfigError("'tolerance' must be a number") from None
    if not cfg.tolerance > 0:
        raise ConfigError("'tolerance' must be positive")
    seed = args.seed if args.seed is not None else raw.get("seed")
    cfg.seed = None if seed is None else int(seed)

    cmd = args.command
    try:
        if cmd == "mimo-rates":
            cfg.mimo_channel = MimoMacChannel.from_dict(_require(raw, "mimo_channel"))
        else:
            cfg.channel = MacChannel.from_dict(_require(raw, "channel"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.paths = _parse_paths(raw)
    k = (cfg.channel or cfg.mimo_channel).num_users
    for name, p in cfg.paths.items():
        if p.num_users != k:
            raise ConfigError(f"paths[{name!r}] has {p.num_users} users, channel has {k}")

    params = cfg.params
    if cmd in ("rates", "dec-curve", "trajectory"):
        cfg.path_name = _pick_path(raw, args, cfg.paths)
    elif cmd == "mimo-rates" and (args.path is not None or "path" in raw):
        cfg.path_name = _pick_path(raw, args, cfg.paths)
    if cfg.path_name is not None:
        report = validate_path(cfg.path)
        if not report.ok:
            raise ConfigError(f"path {cfg.path_name!r} is invalid: {report}")

    if cmd == "region":
        target = args.target if args.target is not None else raw.get("target")
        if target is not None:
            target = _float_list(target, "target")
            if len(target) != k:
                raise ConfigError(f"'target' has {len(target)} entries, channel has {k} users")
            if any(t < 0 for t in target):
                raise ConfigError("'target' rates must be nonnegative")
        params["target"] = target
        params["synthesize"] = bool(args.synthesize or raw.get("synthesize", False))
        if params["synthesize"] and target is None:
            raise ConfigError("--synthesize needs a 'target' rate tuple")
    elif cmd == "dec-curve":
        user = args.user if args.user is not None else raw.get("user", 0)
        if not 0 <= int(user) < k:
            raise ConfigError(f"'user' must be in 0..{k - 1}")
        params["user"] = int(user)
        params["grid_size"] = int(raw.get("grid_size", 1001))
    elif cmd == "trajectory":
        params["slack"] = float(args.slack if args.slack is not None else raw.get("slack", 1e-3))
        params["max_iter"] = int(raw.get("max_iter", 10_000))
        params["stop_v"] = float(raw.get("stop_v", 1e-8))
        params["dec_shift"] = float(raw.get("dec_shift", 0.0))
        params["grid_size"] = int(raw.get("grid_size", 2048))
        if params["slack"] < 0:
            raise ConfigError("'slack' must be nonnegative")
    elif cmd == "validate-mc":
        if cfg.seed is None:
            raise ConfigError("validate-mc requires --seed (or 'seed' in the config)")
        v = _float_list(_require(raw, "v"), "v")
        if len(v) != k or any(not 0 <= x <= 1 for x in v):
            raise ConfigError(f"'v' must hold {k} values in [0, 1]")
        params["v"] = v
        params["samples"] = int(args.samples if args.samples is not None else raw.get("samples", 1_000_000))
        if params["samples"] < 10_000:
            raise ConfigError("'samples' must be at least 10000")
    elif cmd == "path-check":
        names = raw.get("check_paths", list(cfg.paths))
        missing = [n for n in names if n not in cfg.paths]
        if missing:
            raise ConfigError(f"check_paths names undeclared paths {missing}")
        if not names:
            raise ConfigError("config declares no paths to check")
        params["names"] = list(names)
    return cfg


def _rounded(obj):
    if isinstance(obj, float):
        return float(format_float(obj)) if math.isfinite(obj) else obj
    if isinstance(obj, (np.floating,)):
        return _rounded(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_rounded(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(x) for x in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2) + "\n"


def _quad(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(refinement_tolerance=cfg.tolerance)


def cmd_rates(cfg: RunConfig) -> tuple[int, str]:
    r = rates_gaussian(cfg.channel, cfg.path, _quad(cfg), cfg.units)
    if cfg.output == "csv":
        return EXIT_OK, r.to_csv()
    return EXIT_OK, _dump_json({"path": cfg.path_name, **r.to_dict()})


def cmd_region(cfg: RunConfig) -> tuple[int, str]:
    ch = cfg.channel
    target = cfg.params["target"]
    nats_target = None
    if target is not None:
        nats_target = np.asarray(target) * (np.log(2.0) if cfg.units == "bits" else 1.0)
    report = region_report(ch, nats_target, slack=cfg.tolerance, units=cfg.units)
    code = EXIT_OK
    if target is not None and not report["feasible"]:
        code = EXIT_NEGATIVE
    if cfg.params["synthesize"] and code == EXIT_OK:
        try:
            p = synthesize_path_for_tuple(ch, nats_target, tol=max(cfg.tolerance, 1e-9))
        except OffFaceError as exc:
            report["synthesis_error"] = str(exc)
            code = EXIT_NEGATIVE
        except InfeasibleTargetError as exc:  # pragma: no cover - screened above
            report["synthesis_error"] = str(exc)
            code = EXIT_NEGATIVE
        else:
            report["path"] = p.to_dict()
            report["path_rates"] = rates_gaussian(ch, p, _quad(cfg), cfg.units).to_dict()
    if cfg.output == "csv":
        lines = ["subset,bound,status"]
        rep = is_feasible(ch, nats_target, cfg.tolerance) if target is not None else None
        violated = {c.subset for c in rep.violated} if rep else set()
        tight = {c.subset for c in rep.tight} if rep else set()
        for c in report["constraints"]:
            s = tuple(c["subset"])
            status = "violated" if s in violated else "tight" if s in tight else ""
            lines.append(f"{' '.join(map(str, s))},{format_float(c['bound'])},{status}")
        return code, "\n".join(lines) + "\n"
    return code, _dump_json(report)


def cmd_dec_curve(cfg: RunConfig) -> tuple[int, str]:
    dec = synthesize_matching_dec(cfg.channel, cfg.path, cfg.params["user"], cfg.params["grid_size"])
    if cfg.output == "csv":
        return EXIT_OK, dec.to_csv(cfg.params["grid_size"])
    rho, v = dec.table(cfg.params["grid_size"])
    return EXIT_OK, _dump_json({"user": cfg.params["user"], "path": cfg.path_name, "rho": rho, "v": v})


def cmd_trajectory(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params
    decs = matched_decs(cfg.channel, cfg.path, p["grid_size"])
    if p["dec_shift"]:
        decs = [d.shifted(p["dec_shift"]) for d in decs]
    traj = evolve(cfg.channel, decs, p["slack"], p["max_iter"], p["stop_v"])
    code = EXIT_OK if traj.converged else EXIT_NEGATIVE
    if cfg.output == "csv":
        return code, traj.to_csv()
    return code, _dump_json({"path": cfg.path_name, "slack": p["slack"], **traj.summary()})


def cmd_validate_mc(cfg: RunConfig) -> tuple[int, str]:
    rep = monte_carlo_ese(cfg.channel, cfg.params["v"], cfg.params["samples"], cfg.seed)
    z = rep.z_scores()
    code = EXIT_OK if np.all(np.abs(z) <= 3.0) else EXIT_NEGATIVE
    if cfg.output == "csv":
        lines = ["user,empirical_sinr,predicted_sinr,std_error,z"]
        for k in range(len(z)):
            lines.append(
                ",".join(
                    [str(k)]
                    + [format_float(x) for x in (rep.empirical_sinr[k], rep.predicted_sinr[k], rep.sinr_std_error[k], z[k])]
                )
            )
        return code, "\n".join(lines) + "\n"
    return code, _dump_json({**rep.to_dict(), "z_scores": z})


def cmd_mimo(cfg: RunConfig) -> tuple[int, str]:
    ch = cfg.mimo_channel
    total = mimo_sum_rate(ch, units=cfg.units)
    out: dict[str, Any] = {"units": cfg.units, "sum_rate": total}
    if cfg.path_name is not None:
        r = mimo_rates_along_path(ch, cfg.path, _quad(cfg), cfg.units)
        out.update(path=cfg.path_name, per_user=r.per_user, sum=r.sum)
    if cfg.output == "csv":
        lines = ["quantity,value,units", f"sum_rate,{format_float(total)},{cfg.units}"]
        if "per_user" in out:
            lines += [f"user_{k},{format_float(x)},{cfg.units}" for k, x in enumerate(out["per_user"])]
            lines.append(f"path_sum,{format_float(out['sum'])},{cfg.units}")
        return EXIT_OK, "\n".join(lines) + "\n"
    return EXIT_OK, _dump_json(out)


def cmd_path_check(cfg: RunConfig) -> tuple[int, str]:
    names = cfg.params["names"]
    reports = {n: validate_path(cfg.paths[n]) for n in names}
    valid = [n for n in names if reports[n].ok]
    out: dict[str, Any] = {"paths": {n: reports[n].to_dict() for n in names}}
    code = EXIT_OK if len(valid) == len(names) else EXIT_NEGATIVE
    if valid:
        ind = verify_path_independence(cfg.channel, [cfg.paths[n] for n in valid], _quad(cfg), cfg.units)
        out["independence"] = {"names": valid, **ind.to_dict()}
        if ind.max_relative_deviation > 1e-6:
            code = EXIT_NEGATIVE
    if cfg.output == "csv":
        lines = ["path,ok,violation,t,user,sum_rate"]
        sums = dict(zip(valid, out["independence"]["sums"])) if valid else {}
        for n in names:
            r = reports[n]
            t = "" if r.t is None else format_float(r.t)
            u = "" if r.user is None else str(r.user)
            s = format_float(sums[n]) if n in sums else ""
            lines.append(f"{n},{str(r.ok).lower()},{r.violation or ''},{t},{u},{s}")
        return code, "\n".join(lines) + "\n"
    return code, _dump_json(out)


HANDLERS = {
    "rates": cmd_rates,
    "region": cmd_region,
    "dec-curve": cmd_dec_curve,
    "trajectory": cmd_trajectory,
    "validate-mc": cmd_validate_mc,
    "mimo-rates": cmd_mimo,
    "path-check": cmd_path_check,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msefield",
        description="Rate analysis of iterative multi-user detection in the MSE vector field.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--units", choices=("nats", "bits"))
    parser.add_argument("--output", choices=("json", "csv"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tolerance", type=float)
    parser.add_argument("--path", help="name of the declared path to use")
    parser.add_argument("--out", help="write the result here instead of stdout")
    parser.add_argument("--target", type=float, nargs="+", help="region: target rate tuple")
    parser.add_argument("--synthesize", action="store_true", help="region: emit a path for the target")
    parser.add_argument("--user", type=int, help="dec-curve: zero-based user index")
    parser.add_argument("--slack", type=float, help="trajectory: DEC slack")
    parser.add_argument("--samples", type=int, help="validate-mc: sample count")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"msefield: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        code, text = HANDLERS[cfg.command](cfg)
    except ValueError as exc:
        print(f"msefield: {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"msefield: {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
