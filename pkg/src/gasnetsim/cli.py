"""Command-line interface.

Exit codes: 0 success, 1 configuration/validation failure, 2 numerical
failure (stability, positivity, infeasible node, steady solve).  Failures
print one machine-parsable line ``error: <reason>: <detail>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time as _time
from pathlib import Path

from . import experiments
from .config import build_network, config_sha, load_config
from .errors import ConfigError, SimulationError
from .output import SeriesWriter, write_series, write_summary
from .steady import solve_steady_state


def _common_flags(parser):
    parser.add_argument("--dt", type=float, default=None,
                        help="time step in seconds (default: scenario value "
                             "or stability-limited)")
    parser.add_argument("--dx", type=float, default=None,
                        help="target grid spacing in metres")
    parser.add_argument("--t-end", type=float, default=None,
                        help="end time in seconds")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: out)")
    parser.add_argument("--cadence", type=float, default=None,
                        help="output sample spacing in seconds")
    parser.add_argument("--cfl-safety", type=float, default=None,
                        help="stability safety factor (default 0.9, or the "
                             "config value for 'run')")
    parser.add_argument("--strict", action="store_true",
                        help="reject unknown config keys and report profile "
                             "clamping")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gasnetsim",
        description="Explicit staggered-grid transient simulator for "
                    "natural-gas pipeline networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a network config")
    p.add_argument("config", type=Path)
    _common_flags(p)

    p = sub.add_parser("validate", help="validate a network config")
    p.add_argument("config", type=Path)
    _common_flags(p)

    p = sub.add_parser("steady", help="solve and print the steady state of "
                                      "a network config")
    p.add_argument("config", type=Path)
    _common_flags(p)

    p = sub.add_parser("convergence", help="grid-refinement order study")
    _common_flags(p)

    p = sub.add_parser("fast-transient", help="outlet flux step study")
    p.add_argument("--eos", choices=("ideal", "cnga"), default="cnga")
    _common_flags(p)

    p = sub.add_parser("slow-transient", help="slow harmonic pressure study")
    p.add_argument("--eos", choices=("ideal", "cnga"), default="cnga")
    p.add_argument("--periods", type=int, default=50)
    _common_flags(p)

    p = sub.add_parser("temperature", help="inlet temperature spike study")
    p.add_argument("--rate", type=float, default=1e-3,
                   help="temperature decay rate in 1/m (1e-3 or 1e-4)")
    _common_flags(p)

    p = sub.add_parser("five-node", help="five-node network study")
    p.add_argument("--eos", choices=("ideal", "cnga"), default="cnga")
    _common_flags(p)
    return parser


def _finish(result, name, out_dir, started, params):
    out_dir.mkdir(parents=True, exist_ok=True)
    write_series(result.store.rows, out_dir / f"{name}.csv")
    summary = dict(result.summary)
    summary["config_sha"] = config_sha(params)
    summary["wall_seconds"] = _time.monotonic() - started
    summary.setdefault("steps", 0)
    summary.setdefault("max_ledger_discrepancy_kg",
                       result.ledger.max_abs_discrepancy()
                       if result.ledger else 0.0)
    write_summary(summary, out_dir / f"{name}_summary.json")
    print(f"wrote {out_dir / (name + '.csv')}")
    return 0


def _cmd_run(args):
    started = _time.monotonic()
    cfg = load_config(args.config, strict=args.strict)
    if cfg.simulation is None:
        raise ConfigError(["simulation section is required for 'run'"])
    sim = cfg.simulation
    dx = args.dx or sim.dx_target
    net = build_network(cfg, dx_target=dx, strict=args.strict)
    steady = solve_steady_state(net, t0=0.0)
    steady.populate(net, t0=0.0)
    safety = sim.cfl_safety if args.cfl_safety is None else args.cfl_safety
    dt = args.dt or sim.dt or net.cfl_max_dt(safety)
    t_end = args.t_end or sim.t_end
    cadence = args.cadence or sim.output_cadence
    out_dir = args.out if args.out != Path("out") else Path(sim.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    with SeriesWriter(out_dir / "run.csv") as writer:
        result = experiments.simulate_network(net, dt, t_end, cadence,
                                              writer=writer)
    summary = dict(result.summary)
    summary["config_sha"] = config_sha(cfg)
    summary["wall_seconds"] = _time.monotonic() - started
    write_summary(summary, out_dir / "run_summary.json")
    print(f"wrote {out_dir / 'run.csv'}")
    return 0


def _cmd_validate(args):
    load_config(args.config, strict=args.strict)
    print(f"{args.config}: valid")
    return 0


def _cmd_steady(args):
    cfg = load_config(args.config, strict=args.strict)
    dx = args.dx or (cfg.simulation.dx_target if cfg.simulation else 500.0)
    net = build_network(cfg, dx_target=dx, strict=args.strict)
    steady = solve_steady_state(net, t0=0.0)
    for node_id, p in steady.node_pressures.items():
        print(f"node {node_id}: pressure {p:.6g} Pa")
    for pipe_id, m in steady.pipe_flows.items():
        p_in, p_out = steady.pipe_end_pressures[pipe_id]
        print(f"pipe {pipe_id}: flow {m:.6g} kg/s, inlet {p_in:.6g} Pa, "
              f"outlet {p_out:.6g} Pa")
    if args.out != Path("out"):
        args.out.mkdir(parents=True, exist_ok=True)
        write_summary({"node_pressures": steady.node_pressures,
                       "pipe_flows": steady.pipe_flows,
                       "pipe_end_pressures": {k: list(v) for k, v in
                                              steady.pipe_end_pressures.items()},
                       "config_sha": config_sha(cfg)},
                      args.out / "steady_summary.json")
    return 0


def _cmd_convergence(args):
    started = _time.monotonic()
    report = experiments.run_convergence_study()
    args.out.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict()
    doc["wall_seconds"] = _time.monotonic() - started
    path = args.out / "convergence.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{'variable':10s} {'last_two':>9s} {'endpoint':>9s}")
    for var in ("rho", "p", "phi"):
        r = report.rates[var]
        print(f"{var:10s} {r['last_two']:9.4f} {r['endpoint']:9.4f}")
    print(f"wrote {path}")
    return 0


def _cmd_fast(args):
    started = _time.monotonic()
    params = {"experiment": "fast-transient", "eos": args.eos,
              "dx": args.dx or 100.0, "t_end": args.t_end or 3600.0}
    result = experiments.run_fast_transient(
        eos_kind=args.eos, dx=params["dx"], t_end=params["t_end"],
        cadence=args.cadence or 10.0, dt=args.dt,
        cfl_safety=args.cfl_safety or 0.9)
    return _finish(result, f"fast_transient_{args.eos}", args.out, started,
                   params)


def _cmd_slow(args):
    started = _time.monotonic()
    params = {"experiment": "slow-transient", "eos": args.eos,
              "dx": args.dx or 500.0, "periods": args.periods}
    result = experiments.run_slow_transient(
        eos_kind=args.eos, dx=params["dx"], n_periods=args.periods,
        cadence=args.cadence or 300.0, dt=args.dt,
        cfl_safety=args.cfl_safety or 0.9)
    return _finish(result, f"slow_transient_{args.eos}", args.out, started,
                   params)


def _cmd_temperature(args):
    started = _time.monotonic()
    params = {"experiment": "temperature", "rate": args.rate,
              "dx": args.dx or 200.0, "t_end": args.t_end or 16 * 3600.0}
    result = experiments.run_temperature_effect(
        decay_rate=args.rate, dx=params["dx"], t_end=params["t_end"],
        cadence=args.cadence or 60.0, dt=args.dt,
        cfl_safety=args.cfl_safety or 0.9)
    return _finish(result, f"temperature_{args.rate:g}", args.out, started,
                   params)


def _cmd_five_node(args):
    started = _time.monotonic()
    params = {"experiment": "five-node", "eos": args.eos,
              "dx_target": args.dx or 62.5, "t_end": args.t_end or 86400.0,
              "dt": args.dt or 0.125}
    result = experiments.run_five_node_network(
        eos_kind=args.eos, dx_target=params["dx_target"], dt=params["dt"],
        t_end=params["t_end"], cadence=args.cadence or 60.0,
        cfl_safety=args.cfl_safety or 0.9)
    return _finish(result, f"five_node_{args.eos}", args.out, started,
                   params)


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "steady": _cmd_steady,
    "convergence": _cmd_convergence,
    "fast-transient": _cmd_fast,
    "slow-transient": _cmd_slow,
    "temperature": _cmd_temperature,
    "five-node": _cmd_five_node,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"error: validation: {violation}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"error: {exc.reason}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
