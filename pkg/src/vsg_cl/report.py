"""CSV/JSON emitters, their schemas, and the strategy comparison harness."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import FaultSpec, SystemParams
from .curves import CurveRow, PDeltaCurve
from .dynamics import InertiaMode
from .epac import (
    ConstantCurve,
    EpacScenario,
    acceleration_area,
    critical_clearing_angle,
    critical_clearing_time,
    deceleration_area,
)
from .errors import NoSignChangeError, SimulationError
from .limiters import LimiterStrategy
from .sim import COLUMNS, Trajectory, initial_operating_point, run_scenario

SCHEMA_VERSION = 1

TRAJECTORY_HEADER = ",".join(COLUMNS)
CURVE_HEADER = "delta_rad,pe_pu,regime,strategy"

_num_or_null = {"type": ["number", "null"]}

SIDECAR_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "strategy", "verdict", "settled", "delta_0", "delta_u",
                 "delta_peak", "max_current", "metadata"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "strategy": {"type": "string"},
        "verdict": {"enum": ["stable", "unstable"]},
        "settled": {"type": "boolean"},
        "delta_0": {"type": "number"},
        "delta_u": {"type": "number"},
        "delta_peak": {"type": "number"},
        "max_current": {"type": "number"},
        "metadata": {"type": "object"},
    },
}

EPAC_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "strategy", "a_acc", "a_dec", "margin", "verdict",
                 "delta_c", "delta_0", "delta_u", "delta_cc", "t_cc"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "strategy": {"type": "string"},
        "a_acc": {"type": "number"},
        "a_dec": {"type": "number"},
        "margin": {"type": "number"},
        "verdict": {"enum": ["stable", "unstable", "marginal"]},
        "delta_c": {"type": "number"},
        "delta_0": {"type": "number"},
        "delta_u": {"type": "number"},
        "delta_cc": _num_or_null,
        "t_cc": _num_or_null,
    },
}

COMPARE_ROW_SCHEMA = {
    "type": "object",
    "required": ["strategy", "verdict", "delta_peak", "max_current", "delta_c", "a_acc",
                 "a_dec", "margin", "delta_cc", "t_cc"],
    "properties": {
        "strategy": {"type": "string"},
        "verdict": {"enum": ["stable", "unstable"]},
        "delta_peak": {"type": "number"},
        "max_current": {"type": "number"},
        "delta_c": {"type": "number"},
        "a_acc": _num_or_null,
        "a_dec": _num_or_null,
        "margin": _num_or_null,
        "delta_cc": _num_or_null,
        "t_cc": _num_or_null,
    },
}

COMPARE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "rows", "scenario"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "rows": {"type": "array", "items": COMPARE_ROW_SCHEMA},
        "scenario": {"type": "object"},
    },
}


def _clean(value):
    """JSON-safe scalar: numpy -> python, non-finite -> None."""
    if value is None or isinstance(value, (str, bool)):
        return value
    value = float(value)
    return value if math.isfinite(value) else None


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    data = np.column_stack([traj[c] for c in COLUMNS])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for row in data:
            fh.write(",".join(repr(float(x)) for x in row[:-1]) + f",{int(row[-1])}\n")


def read_trajectory_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, j] for j, name in enumerate(COLUMNS)}


def trajectory_sidecar(traj: Trajectory) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "strategy": traj.metadata.get("strategy", ""),
        "verdict": traj.verdict,
        "settled": traj.settled,
        "delta_0": _clean(traj.delta_0),
        "delta_u": _clean(traj.delta_u),
        "delta_peak": _clean(np.max(traj["delta"])),
        "max_current": _clean(np.max(traj["imag"])),
        "metadata": {k: _clean(v) if not isinstance(v, str) else v
                     for k, v in traj.metadata.items()},
    }


def curve_csv(rows_by_strategy: dict[str, Sequence[CurveRow]]) -> str:
    buf = io.StringIO()
    buf.write(CURVE_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for name, rows in rows_by_strategy.items():
        for r in rows:
            writer.writerow([repr(r.delta), repr(r.pe), r.regime, name])
    return buf.getvalue()


def parse_curve_csv(text: str) -> list[dict]:
    lines = text.splitlines()
    if not lines or lines[0] != CURVE_HEADER:
        raise ValueError("unexpected curve header")
    out = []
    for rec in csv.DictReader(lines):
        out.append({"delta_rad": float(rec["delta_rad"]), "pe_pu": float(rec["pe_pu"]),
                    "regime": rec["regime"], "strategy": rec["strategy"]})
    return out


def epac_scenario(
    params: SystemParams,
    fault: FaultSpec,
    strategy: LimiterStrategy,
    fault_power: float | None = None,
) -> tuple[EpacScenario, float]:
    """EPAC curves matching a time-domain scenario, plus the internal voltage used.

    ``E`` is frozen at the pre-fault AVR fixed point. The during-fault curve
    is the limiter curve at ``v_retained``, or a constant when ``fault_power``
    is given.
    """
    _, e0, _ = initial_operating_point(params, strategy)
    pre = PDeltaCurve.from_params(params, strategy, e_mag=e0)
    if fault_power is None:
        during = PDeltaCurve.from_params(params, strategy, e_mag=e0, v_mag=fault.v_retained)
    else:
        during = ConstantCurve(fault_power)
    return EpacScenario.build(params.p_m, pre, during, pre), e0


def epac_payload(strategy: str, report) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "strategy": strategy}
    out.update({k: _clean(v) for k, v in report.to_dict().items()})
    return out


@dataclass
class CompareRow:
    strategy: str
    verdict: str
    delta_peak: float
    max_current: float
    delta_c: float
    a_acc: float | None
    a_dec: float | None
    margin: float | None
    delta_cc: float | None
    t_cc: float | None


@dataclass
class CompareReport:
    rows: list[CompareRow]
    scenario: dict = field(default_factory=dict)
    trajectories: dict[str, Trajectory] = field(default_factory=dict, repr=False)
    epac: dict[str, EpacScenario] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "rows": [{k: _clean(v) for k, v in asdict(r).items()} for r in self.rows],
            "scenario": self.scenario,
        }


def compare(
    params: SystemParams,
    fault: FaultSpec,
    strategies: Iterable[LimiterStrategy],
    dt: float = 2e-4,
    mode: InertiaMode = InertiaMode.EXACT,
    stride: int = 1,
) -> CompareReport:
    """Simulate every strategy on one scenario and attach its EPAC figures.

    Areas are evaluated at the clearing angle the simulation reached; they are
    ``None`` when that angle lies outside ``[delta_0, delta_u]``.
    """
    strategies = list(strategies)
    if not strategies:
        raise ValueError("strategy list is empty")
    report = CompareReport(rows=[], scenario={
        "params_hash": params.digest(), "t_fault": fault.t_fault, "t_clear": fault.t_clear,
        "v_retained": fault.v_retained, "t_end": fault.t_end, "dt": dt,
        "mode": InertiaMode(mode).value, "p_m": params.p_m,
    })
    for strat in strategies:
        traj = run_scenario(params, fault, strat, dt=dt, mode=mode, stride=stride)
        delta_c = traj.value_at("delta", fault.t_clear)
        a_acc = a_dec = margin = delta_cc = t_cc = None
        scen = None
        if fault.v_retained < params.v_grid:
            scen, _ = epac_scenario(params, fault, strat)
            if scen.delta_0 <= delta_c <= scen.delta_u:
                a_acc = acceleration_area(scen.curve_fault, scen.p_m, scen.delta_0, delta_c)
                a_dec = deceleration_area(scen.curve_post, scen.p_m, delta_c, scen.delta_u)
                margin = a_dec - a_acc
            try:
                delta_cc = critical_clearing_angle(scen)
                t_cc = critical_clearing_time(scen, params, mode, delta_cc=delta_cc)
            except (NoSignChangeError, SimulationError):
                pass
            report.epac[strat.name] = scen
        report.trajectories[strat.name] = traj
        report.rows.append(CompareRow(
            strategy=strat.name,
            verdict=traj.verdict,
            delta_peak=float(np.max(traj["delta"])),
            max_current=float(np.max(traj["imag"])),
            delta_c=delta_c,
            a_acc=a_acc,
            a_dec=a_dec,
            margin=margin,
            delta_cc=delta_cc,
            t_cc=t_cc,
        ))
    return report


def format_table(report: CompareReport) -> str:
    head = ["strategy", "verdict", "delta_peak", "max|i|", "delta_c", "a_acc", "a_dec",
            "margin", "delta_cc", "t_cc"]

    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, str):
            return v
        return f"{v:.4f}"

    body = [[fmt(getattr(r, k)) for k in ("strategy", "verdict", "delta_peak", "max_current",
                                           "delta_c", "a_acc", "a_dec", "margin", "delta_cc",
                                           "t_cc")] for r in report.rows]
    widths = [max(len(h), *(len(row[j]) for row in body)) for j, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines += ["  ".join(c.rjust(w) if j > 1 else c.ljust(w) for j, (c, w) in
                        enumerate(zip(row, widths))) for row in body]
    return "\n".join(lines)


def dump_json(payload: dict, path: str | Path | None = None) -> str:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
