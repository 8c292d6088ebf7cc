"""Command-line front end: point analysis, optimisation, simulation, sweeps.

Machine-readable rows (CSV or JSON) go to stdout or --output; human-readable
summaries go to stderr.  Configuration precedence: command-line flags override
config-file values, which override the built-in defaults (m=10, v1=4, v2=1.5,
gamma=1.5).  Exit codes: 0 success, 2 configuration error, 3 internal error.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

from .model import (
    CountPair,
    PowerProfile,
    Scenario,
    average_throughput,
    baseline_optimum,
    baseline_success,
    decode_feasibility,
    region_bounds,
    success_probability,
)
from .optimize import AscentConfig, coordinate_ascent, grid_search_oracle
from .simulate import SimConfig, run_simulation

__all__ = ["main", "ExperimentConfig", "ConfigError"]

SWEEP_AXES = ("m", "tau1", "tau2", "gamma", "v1", "v2", "p_baseline")


class ConfigError(Exception):
    """Invalid configuration; reported with exit code 2."""


@dataclass
class ExperimentConfig:
    """Flat experiment settings; field names double as config-file keys."""

    m: int = 10
    v1: float = 4.0
    v2: float = 1.5
    gamma: float = 1.5
    tau1: float = 0.0
    tau2: float = 0.0
    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    step: float | None = None
    slots: int = 1_000_000
    seed: int = 1
    replications: int = 10
    format: str = "csv"
    output: str | None = None


_FIELD_TYPES = {
    "m": int,
    "v1": float,
    "v2": float,
    "gamma": float,
    "tau1": float,
    "tau2": float,
    "axis": str,
    "start": float,
    "stop": float,
    "step": float,
    "slots": int,
    "seed": int,
    "replications": int,
    "format": str,
    "output": str,
}


def _parse_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, val = line.partition("=")
                values[key.strip()] = val.strip()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from None
    return values


def _convert(key: str, raw: str):
    typ = _FIELD_TYPES[key]
    if typ is str:
        return raw
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(
            f"config key '{key}' needs a value of type {typ.__name__}, got {raw!r}"
        ) from None


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge defaults, config file and command-line flags, in that order."""
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        for key, raw in _parse_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key '{key}'")
            setattr(cfg, key, _convert(key, raw))
    for key in _FIELD_TYPES:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be 'csv' or 'json'")
    return cfg


def _scenario(cfg: ExperimentConfig) -> Scenario:
    try:
        return Scenario(m=cfg.m, v1=cfg.v1, v2=cfg.v2, gamma=cfg.gamma)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _profile(cfg: ExperimentConfig) -> PowerProfile:
    try:
        return PowerProfile(tau1=cfg.tau1, tau2=cfg.tau2)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _sim_config(cfg: ExperimentConfig, estimator: str) -> SimConfig:
    try:
        return SimConfig(
            slots=cfg.slots,
            seed=cfg.seed,
            replications=cfg.replications,
            success_estimator=estimator,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _ascent_config(args: argparse.Namespace) -> AscentConfig:
    kwargs = {}
    for field_name, attr in (
        ("epsilon", "epsilon"),
        ("max_outer_iterations", "max_iterations"),
        ("grid_step", "grid_step"),
        ("refine_rounds", "refine_rounds"),
        ("initial_tau1", "initial_tau1"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            kwargs[field_name] = val
    if getattr(args, "single_start", False):
        kwargs["dual_start"] = False
    try:
        return AscentConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(str(e)) from None


# ---------------------------------------------------------------------------
# output rendering

def _say(msg: str):
    print(msg, file=sys.stderr)


def _fmt6(x: float) -> str:
    return format(x, ".6g")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow(_cell(v) for v in row.values())
    return buf.getvalue()


def _emit(rows: list[dict], cfg: ExperimentConfig):
    if not rows:
        raise ConfigError("nothing to output")
    if cfg.format == "csv":
        text = _rows_to_csv(rows)
    else:
        text = json.dumps(rows, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_region(args) -> int:
    cfg = build_config(args)
    s = _scenario(cfg)
    b = region_bounds(s)
    rows = []
    for n1 in range(s.m + 1):
        for n2 in range(s.m + 1 - n1):
            flags = decode_feasibility(s, CountPair(n1, n2))
            rows.append(
                {"n1": n1, "n2": n2, "high_ok": flags.high_ok, "low_ok": flags.low_ok}
            )
    _say(
        f"high layer decodable: n1 <= {b.high_max}, "
        f"n2 caps per n1 {list(b.low_max_given_high)}"
    )
    _say(
        f"low layer decodable:  n2 <= {b.low_max}, "
        f"n1 caps per n2 {list(b.high_max_given_low)}"
    )
    _emit(rows, cfg)
    return 0


def cmd_analyze(args) -> int:
    cfg = build_config(args)
    s = _scenario(cfg)
    prof = _profile(cfg)
    p = success_probability(s, prof)
    th = average_throughput(s, prof)
    _say(f"p_success={_fmt6(p)} th_avg={_fmt6(th)}")
    _emit(
        [
            {
                "m": s.m,
                "v1": s.v1,
                "v2": s.v2,
                "gamma": s.gamma,
                "tau1": prof.tau1,
                "tau2": prof.tau2,
                "p_success": p,
                "th_avg": th,
            }
        ],
        cfg,
    )
    return 0


def cmd_optimize(args) -> int:
    cfg = build_config(args)
    s = _scenario(cfg)
    acfg = _ascent_config(args)
    res = coordinate_ascent(s, acfg)
    _say(
        f"tau1*={_fmt6(res.tau1_star)} tau2*={_fmt6(res.tau2_star)} "
        f"th*={_fmt6(res.th_star)} iterations={res.outer_iterations} "
        f"converged={res.converged}"
    )
    if args.trace:
        rows = [
            {"iteration": it, "tau1": t1, "tau2": t2, "throughput": th}
            for it, t1, t2, th in res.trace
        ]
        _emit(rows, cfg)
        return 0
    row = {
        "m": s.m,
        "v1": s.v1,
        "v2": s.v2,
        "gamma": s.gamma,
        "tau1_star": res.tau1_star,
        "tau2_star": res.tau2_star,
        "th_star": res.th_star,
        "outer_iterations": res.outer_iterations,
        "converged": res.converged,
    }
    if args.oracle:
        oracle = grid_search_oracle(s, args.oracle_step)
        row["oracle_tau1"] = oracle.tau1_star
        row["oracle_tau2"] = oracle.tau2_star
        row["oracle_th"] = oracle.th_star
        _say(
            f"oracle (step {_fmt6(args.oracle_step)}): tau1={_fmt6(oracle.tau1_star)} "
            f"tau2={_fmt6(oracle.tau2_star)} th={_fmt6(oracle.th_star)}"
        )
    if args.baseline:
        p_star, th_star = baseline_optimum(s)
        row["baseline_p_star"] = p_star
        row["baseline_th_star"] = th_star
        _say(f"baseline optimum: p={_fmt6(p_star)} th={_fmt6(th_star)}")
    _emit([row], cfg)
    return 0


def _sigma_ratio(delta: float, stderr: float, scale: float) -> float:
    if stderr > 0.0:
        return delta / stderr
    # zero-variance run: deltas at float-noise level do not count as disagreement
    if delta <= 1e-12 * max(1.0, abs(scale)):
        return 0.0
    return math.inf


def cmd_simulate(args) -> int:
    cfg = build_config(args)
    s = _scenario(cfg)
    prof = _profile(cfg)
    scfg = _sim_config(cfg, args.estimator)
    stats = run_simulation(s, prof, scfg, trace_path=args.trace_file)
    p = success_probability(s, prof)
    th = average_throughput(s, prof)
    dp = abs(stats.p_success_hat - p)
    dth = abs(stats.throughput_hat - th)
    _say(
        f"p_success sim={_fmt6(stats.p_success_hat)} analytic={_fmt6(p)} "
        f"|delta|/stderr={_fmt6(_sigma_ratio(dp, stats.stderr_p, p))}"
    )
    _say(
        f"throughput sim={_fmt6(stats.throughput_hat)} analytic={_fmt6(th)} "
        f"|delta|/stderr={_fmt6(_sigma_ratio(dth, stats.stderr_th, th))}"
    )
    _emit(
        [
            {
                "m": s.m,
                "v1": s.v1,
                "v2": s.v2,
                "gamma": s.gamma,
                "tau1": prof.tau1,
                "tau2": prof.tau2,
                "slots": scfg.slots,
                "replications": scfg.replications,
                "seed": scfg.seed,
                "p_success_sim": stats.p_success_hat,
                "p_success_analytic": p,
                "p_abs_delta": dp,
                "p_stderr": stats.stderr_p,
                "p_delta_over_stderr": _sigma_ratio(dp, stats.stderr_p, p),
                "th_sim": stats.throughput_hat,
                "th_analytic": th,
                "th_abs_delta": dth,
                "th_stderr": stats.stderr_th,
                "th_delta_over_stderr": _sigma_ratio(dth, stats.stderr_th, th),
            }
        ],
        cfg,
    )
    return 0


def _sweep_values(cfg: ExperimentConfig):
    if cfg.axis is None or cfg.start is None or cfg.stop is None or cfg.step is None:
        raise ConfigError("sweep requires axis, start, stop and step")
    if cfg.axis not in SWEEP_AXES:
        raise ConfigError(
            f"unknown sweep axis '{cfg.axis}' (valid axes: {', '.join(SWEEP_AXES)})"
        )
    if cfg.step <= 0:
        raise ConfigError("sweep step must be positive")
    if cfg.stop < cfg.start:
        raise ConfigError("sweep stop must not be smaller than start")
    count = int(math.floor((cfg.stop - cfg.start) / cfg.step + 1e-9)) + 1
    values = [cfg.start + k * cfg.step for k in range(count)]
    if cfg.axis == "m":
        out = []
        for v in values:
            iv = int(round(v))
            if abs(v - iv) > 1e-9 or iv < 1:
                raise ConfigError("sweep over m requires positive integer values")
            out.append(iv)
        return out
    return values


def _sweep_point(cfg: ExperimentConfig, value):
    over = {cfg.axis: value} if cfg.axis != "p_baseline" else {}
    try:
        s = Scenario(
            m=over.get("m", cfg.m),
            v1=over.get("v1", cfg.v1),
            v2=over.get("v2", cfg.v2),
            gamma=over.get("gamma", cfg.gamma),
        )
        prof = PowerProfile(
            tau1=over.get("tau1", cfg.tau1), tau2=over.get("tau2", cfg.tau2)
        )
        if cfg.axis == "p_baseline" and not 0.0 <= value <= 1.0:
            raise ValueError("p must lie in [0, 1]")
    except ValueError as e:
        raise ConfigError(f"sweep value {value!r} for axis '{cfg.axis}': {e}") from None
    return s, prof


def cmd_sweep(args) -> int:
    cfg = build_config(args)
    values = _sweep_values(cfg)
    if cfg.axis == "p_baseline" and (args.simulate or args.optimize):
        raise ConfigError("axis p_baseline supports neither --simulate nor --optimize")
    points = [_sweep_point(cfg, v) for v in values]  # validate all before output
    acfg = _ascent_config(args) if args.optimize else None
    rows = []
    for value, (s, prof) in zip(values, points):
        if cfg.axis == "p_baseline":
            p = baseline_success(s, value)
            th = math.log2(1.0 + s.v1) * p
        else:
            p = success_probability(s, prof)
            th = average_throughput(s, prof)
        row = {cfg.axis: value, "p_success": p, "th_avg": th}
        if args.simulate:
            stats = run_simulation(s, prof, _sim_config(cfg, args.estimator))
            row["p_success_sim"] = stats.p_success_hat
            row["th_sim"] = stats.throughput_hat
            row["stderr_p"] = stats.stderr_p
            row["stderr_th"] = stats.stderr_th
        if args.optimize:
            res = coordinate_ascent(s, acfg)
            row["tau1_opt"] = res.tau1_star
            row["tau2_opt"] = res.tau2_star
            row["th_opt"] = res.th_star
            row["opt_iterations"] = res.outer_iterations
            row["opt_converged"] = res.converged
        rows.append(row)
    _say(f"swept {cfg.axis} over {len(rows)} points")
    _emit(rows, cfg)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_scenario_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="config file (flat 'key = value' lines)")
    p.add_argument("--m", type=int, help="number of contending users")
    p.add_argument("--v1", type=float, help="high received SNR target")
    p.add_argument("--v2", type=float, help="low received SNR target")
    p.add_argument("--gamma", type=float, help="SINR decoding threshold")


def _add_profile_args(p: argparse.ArgumentParser):
    p.add_argument("--tau1", type=float, help="high-power transmit probability")
    p.add_argument("--tau2", type=float, help="low-power transmit probability")


def _add_sim_args(p: argparse.ArgumentParser):
    p.add_argument("--slots", type=int, help="slots per replication")
    p.add_argument("--seed", type=int, help="simulation seed")
    p.add_argument("--replications", type=int, help="independent replications")
    p.add_argument(
        "--estimator",
        choices=("tagged", "all-users"),
        default="tagged",
        help="success-probability estimator",
    )


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--output", help="output path (default: stdout)")


def _add_ascent_args(p: argparse.ArgumentParser):
    p.add_argument("--epsilon", type=float, help="improvement tolerance")
    p.add_argument("--max-iterations", type=int, dest="max_iterations")
    p.add_argument("--grid-step", type=float, dest="grid_step")
    p.add_argument("--refine-rounds", type=int, dest="refine_rounds")
    p.add_argument("--initial-tau1", type=float, dest="initial_tau1")
    p.add_argument(
        "--single-start",
        action="store_true",
        help="run only the reference coordinate order",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-aloha",
        description="Two-power NOMA slotted ALOHA: analysis, optimisation, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="enumerate decodable count pairs")
    _add_scenario_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("analyze", help="success probability and throughput at a point")
    _add_scenario_args(p)
    _add_profile_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", help="maximise throughput over (tau1, tau2)")
    _add_scenario_args(p)
    _add_output_args(p)
    _add_ascent_args(p)
    p.add_argument("--oracle", action="store_true", help="also run the grid oracle")
    p.add_argument(
        "--oracle-step", type=float, default=0.01, dest="oracle_step",
        help="grid oracle step (default 0.01)",
    )
    p.add_argument(
        "--baseline", action="store_true", help="also print the single-power optimum"
    )
    p.add_argument(
        "--trace", action="store_true", help="emit the ascent trace instead of the summary"
    )
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo run with analytic comparison")
    _add_scenario_args(p)
    _add_profile_args(p)
    _add_sim_args(p)
    _add_output_args(p)
    p.add_argument("--trace-file", dest="trace_file", help="per-slot CSV trace path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="one-axis parameter sweep")
    _add_scenario_args(p)
    _add_profile_args(p)
    _add_sim_args(p)
    _add_output_args(p)
    _add_ascent_args(p)
    p.add_argument("--axis", choices=None, help=f"sweep axis, one of {', '.join(SWEEP_AXES)}")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument(
        "--simulate", action="store_true", help="add Monte Carlo columns per point"
    )
    p.add_argument(
        "--optimize", action="store_true", help="add optimised profile columns per point"
    )
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
