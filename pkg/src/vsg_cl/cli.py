"""Command-line front end.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import plotting, report
from .config import load_config, parse_overrides
from .curves import PDeltaCurve, default_grid, emit_curve_table
from .dynamics import InertiaMode
from .epac import critical_clearing_angle, critical_clearing_time, verdict
from .errors import ConfigError, NoIntersectionError, NoSignChangeError, SimulationError
from .limiters import DqPhasor, LimiterStrategy
from .sim import run_scenario

log = logging.getLogger("vsg_cl")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="config file ([system]/[fault]/[run] sections)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=V",
                   help="override one config value; repeatable")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--dt", type=float, help="integration step (s); overrides run.dt")
    p.add_argument("--mode", choices=[m.value for m in InertiaMode], default="exact")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    return p


def _strategies(text: str) -> list[LimiterStrategy]:
    try:
        return [LimiterStrategy.parse(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _one(text: str) -> LimiterStrategy:
    found = _strategies(text)
    if len(found) != 1:
        raise ConfigError(f"expected exactly one strategy, got {text!r}")
    return found[0]


def _load(args):
    if args.config is not None and not args.config.is_file():
        raise ConfigError(f"config file not found: {args.config}")
    params, fault, run = load_config(args.config, parse_overrides(args.overrides))
    if args.dt is not None:
        run = replace(run, dt=args.dt)
    return params, fault, run


def _outdir(args, default: str = "out") -> Path:
    out = args.out if args.out is not None else Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    params, fault, run = _load(args)
    strategy = _one(args.strategy)
    traj = run_scenario(params, fault, strategy, dt=run.dt, mode=args.mode, stride=run.stride)
    out = _outdir(args)
    stem = f"trajectory_{strategy.name.replace(':', '_')}"
    report.write_trajectory_csv(traj, out / f"{stem}.csv")
    report.dump_json(report.trajectory_sidecar(traj), out / f"{stem}.json")
    if not args.no_plot:
        plotting.plot_trajectories({strategy.name: traj}, out / f"{stem}.svg")
    print(f"verdict: {traj.verdict}")
    return EXIT_OK


def cmd_compare(args) -> int:
    params, fault, run = _load(args)
    strategies = _strategies(args.strategies)
    if not strategies:
        raise ConfigError("--strategies is empty")
    rep = report.compare(params, fault, strategies, dt=run.dt, mode=args.mode, stride=run.stride)
    out = _outdir(args)
    report.dump_json(rep.to_dict(), out / "compare.json")
    print(report.format_table(rep))
    if not args.no_plot:
        plotting.plot_trajectories(rep.trajectories, out / "compare_trajectories.svg")
        if rep.epac:
            dcs = {r.strategy: r.delta_c for r in rep.rows}
            plotting.plot_pdelta(rep.epac, out / "compare_pdelta.svg", delta_c=dcs)
    return EXIT_OK


def cmd_pdelta(args) -> int:
    params, fault, _ = _load(args)
    v = params.v_grid if args.voltage is None else args.voltage
    grid = default_grid(args.points, args.upper)
    tables = {}
    for strat in _strategies(args.strategy):
        e = v if args.e is None else args.e
        curve = PDeltaCurve.from_params(params, strat, e_mag=e, v_mag=v)
        tables[strat.name] = emit_curve_table(curve, grid)
    if args.format == "json":
        text = json.dumps([{"delta_rad": r.delta, "pe_pu": r.pe, "regime": r.regime,
                            "strategy": name} for name, rows in tables.items() for r in rows])
    else:
        text = report.curve_csv(tables)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if args.out is not None:
        out = _outdir(args)
        (out / "pdelta.csv").write_text(report.curve_csv(tables), encoding="utf-8")
        if not args.no_plot:
            plotting.plot_curves(tables, out / "pdelta.svg")
    return EXIT_OK


def _scenario(args, params, fault, strat):
    return report.epac_scenario(params, fault, strat, fault_power=args.fault_power)[0]


def cmd_epac(args) -> int:
    params, fault, run = _load(args)
    strat = _one(args.strategy)
    scen = _scenario(args, params, fault, strat)
    delta_c = args.delta_c
    if delta_c is None:
        traj = run_scenario(params, fault, strat, dt=run.dt, mode=args.mode)
        delta_c = traj.value_at("delta", fault.t_clear)
    try:
        rep = verdict(scen, delta_c, params, mode=args.mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    payload = report.epac_payload(strat.name, rep)
    print(report.dump_json(payload))
    if args.out is not None:
        out = _outdir(args)
        report.dump_json(payload, out / "epac.json")
        if not args.no_plot:
            upper = max(math.pi, min(scen.delta_u, 2 * math.pi))
            plotting.plot_pdelta({strat.name: scen}, out / "epac.svg",
                                 delta_c={strat.name: delta_c}, upper=upper)
    return EXIT_OK


def cmd_cca(args) -> int:
    params, fault, _ = _load(args)
    results = []
    for strat in _strategies(args.strategy):
        scen = _scenario(args, params, fault, strat)
        try:
            dcc = critical_clearing_angle(scen)
        except NoSignChangeError:
            dcc = None
        tcc = None
        if dcc is not None:
            try:
                tcc = critical_clearing_time(scen, params, args.mode, delta_cc=dcc)
            except SimulationError:
                pass
        results.append({"strategy": strat.name, "delta_0": scen.delta_0,
                        "delta_u": scen.delta_u, "delta_cc": dcc, "t_cc": tcc})
    if args.format == "json":
        print(json.dumps({"schema_version": report.SCHEMA_VERSION, "rows": results}, indent=2))
    else:
        print("strategy,delta_cc,t_cc")
        for r in results:
            dcc = "" if r["delta_cc"] is None else repr(r["delta_cc"])
            tcc = "" if r["t_cc"] is None else repr(r["t_cc"])
            print(f"{r['strategy']},{dcc},{tcc}")
    return EXIT_OK


def cmd_limit(args) -> int:
    strat = _one(args.strategy)
    if not args.i_max > 0:
        raise ConfigError("i_max > 0 violated")
    if args.phi is not None:
        strat = LimiterStrategy(strat.variant, args.phi)
    i = strat.apply(DqPhasor(args.d, args.q), args.i_max, args.delta)
    print("d,q")
    print(f"{i.d + 0.0!r},{i.q + 0.0!r}")  # no negative zeros
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="vsg-cl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run one fault scenario")
    p.add_argument("--strategy", default="q-priority")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common], help="run several strategies side by side")
    p.add_argument("--strategies", default="angle,d,q,adaptive")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pdelta", parents=[common], help="tabulate P-delta curves")
    p.add_argument("--strategy", default="none,angle,d,q,adaptive")
    p.add_argument("--voltage", type=float, help="grid voltage (pu); default v_grid")
    p.add_argument("--e", type=float, help="internal voltage (pu); default equal to --voltage")
    p.add_argument("--points", type=int, default=181)
    p.add_argument("--upper", type=float, default=math.pi)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_pdelta)

    p = sub.add_parser("epac", parents=[common], help="equal-area report at one clearing angle")
    p.add_argument("--strategy", default="q-priority")
    p.add_argument("--delta-c", type=float, help="clearing angle (rad); default from simulation")
    p.add_argument("--fault-power", type=float, help="constant during-fault power (pu)")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_epac)

    p = sub.add_parser("cca", parents=[common], help="critical clearing angle and time")
    p.add_argument("--strategy", default="angle,d,q,adaptive")
    p.add_argument("--fault-power", type=float, help="constant during-fault power (pu)")
    p.set_defaults(func=cmd_cca)

    p = sub.add_parser("limit", parents=[common], help="apply one limiter to a (d, q) pair")
    p.add_argument("--strategy", default="q-priority")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--i-max", type=float, default=2.4)
    p.add_argument("--delta", type=float, default=0.0, help="power angle for the adaptive law")
    p.add_argument("--phi", type=float, help="fixed phi (rad) for the adaptive law")
    p.set_defaults(func=cmd_limit)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("VSG_CL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationError, NoIntersectionError, NoSignChangeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
