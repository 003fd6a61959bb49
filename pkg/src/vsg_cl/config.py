"""Parameter set, per-unit bases and config-file ingestion.

Electrical quantities downstream are per-unit on ``s_base`` / ``v_base``.
The swing-equation constants ``j_inertia``, ``d_damping`` and ``omega0``
stay in SI, and the simulator multiplies pu power by ``s_base`` before it
meets them.

Config files are plain text::

    [system]
    p_ref = 1000      # W
    j = 3
    [fault]
    t_clear = 0.8
    [run]
    dt = 2e-4

Keys left out take the defaults in ``SYSTEM_DEFAULTS`` / ``FAULT_DEFAULTS`` /
``RUN_DEFAULTS``. An empty file therefore reproduces the Table-1 scenario.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ConfigError

# SI values as printed in the parameter table; the rest are modelling defaults.
SYSTEM_DEFAULTS: dict[str, float] = {
    "p_ref": 1000.0,  # W
    "e_ref": 380.0,  # V
    "v_g": 380.0,  # V
    "j": 3.0,
    "d": 100.0,
    "omega0": 314.0,  # rad/s
    "l_f": 1e-3,  # H, unused by the phasor model
    "c_f": 50e-3,  # printed as "50mH"; stored verbatim, unused
    "l_g": 0.0,  # H, unused (folded into x_v)
    "u_dc": 0.0,  # V, unused
    "q_ref": 0.0,  # pu
    "k": 0.05,  # pu voltage / pu reactive power
    "r_v": 0.0,  # pu
    "x_v": 0.3,  # pu
    "i_max": 2.4,  # pu
    "s_base": math.nan,  # W, NaN -> p_ref
    "v_base": math.nan,  # V, NaN -> e_ref
}

FAULT_DEFAULTS: dict[str, float] = {
    "t_fault": 0.5,
    "t_clear": 0.8,
    "v_retained": 0.2,  # pu, calibrated; the fault depth is not reported
    "t_end": 3.0,
}

RUN_DEFAULTS: dict[str, float] = {
    "dt": 2e-4,
    "stride": 1,
}

_SECTIONS = {"system": SYSTEM_DEFAULTS, "fault": FAULT_DEFAULTS, "run": RUN_DEFAULTS}


@dataclass(frozen=True)
class BaseQuantities:
    s_base: float
    v_base: float
    omega_base: float

    def __post_init__(self):
        for name in ("s_base", "v_base", "omega_base"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} > 0 violated (got {value!r})")

    @property
    def i_base(self) -> float:
        return self.s_base / self.v_base


_BASE_ATTR = {"power": "s_base", "voltage": "v_base", "current": "i_base"}


def to_per_unit(value: float, kind: str, bases: BaseQuantities) -> float:
    """Divide an SI ``power``/``voltage``/``current`` by its base."""
    try:
        base = getattr(bases, _BASE_ATTR[kind])
    except KeyError:
        raise ValueError(f"unknown quantity kind {kind!r}") from None
    return value / base


def from_per_unit(value: float, kind: str, bases: BaseQuantities) -> float:
    try:
        base = getattr(bases, _BASE_ATTR[kind])
    except KeyError:
        raise ValueError(f"unknown quantity kind {kind!r}") from None
    return value * base


@dataclass(frozen=True)
class SystemParams:
    """All physical and control constants of the VSG / grid model.

    Electrical fields are per-unit, swing-equation fields are SI.
    ``l_f``, ``c_f``, ``l_g`` and ``u_dc`` are carried for reporting only.
    """

    p_m: float = 1.0
    q_ref: float = 0.0
    e_ref: float = 1.0
    k: float = 0.05
    j_inertia: float = 3.0
    d_damping: float = 100.0
    omega0: float = 314.0
    r_v: float = 0.0
    x_v: float = 0.3
    i_max: float = 2.4
    v_grid: float = 1.0
    l_f: float = 1e-3
    c_f: float = 50e-3
    l_g: float = 0.0
    u_dc: float = 0.0
    bases: BaseQuantities = field(default_factory=lambda: BaseQuantities(1000.0, 380.0, 314.0))

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name != "bases" and not math.isfinite(value):
                raise ConfigError(f"{name} must be finite (got {value!r})")
        checks = [
            ("j_inertia > 0", self.j_inertia > 0),
            ("omega0 > 0", self.omega0 > 0),
            ("i_max > 0", self.i_max > 0),
            ("x_v > 0", self.x_v > 0),
            ("r_v >= 0", self.r_v >= 0),
            ("0 < v_grid <= 1.5", 0 < self.v_grid <= 1.5),
            ("0 < e_ref <= 1.5", 0 < self.e_ref <= 1.5),
        ]
        for text, ok in checks:
            if not ok:
                raise ConfigError(f"{text} violated")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Short stable hash identifying this parameter set."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class FaultSpec:
    """Grid-voltage sag applied on ``[t_fault, t_clear)``.

    ``v_retained`` equal to the grid voltage is accepted and means no fault.
    """

    t_fault: float = 0.5
    t_clear: float = 0.8
    v_retained: float = 0.2
    t_end: float = 3.0

    def __post_init__(self):
        if not 0 <= self.t_fault:
            raise ConfigError("0 <= t_fault violated")
        if not self.t_fault < self.t_clear:
            raise ConfigError("t_fault < t_clear violated")
        if not self.t_clear < self.t_end:
            raise ConfigError("t_clear < t_end violated")
        if not 0 <= self.v_retained:
            raise ConfigError("0 <= v_retained violated")

    def check_against(self, params: SystemParams) -> None:
        if self.v_retained > params.v_grid:
            raise ConfigError("v_retained <= v_grid violated")

    def voltage(self, t: float, v_grid: float) -> float:
        return self.v_retained if self.t_fault <= t < self.t_clear else v_grid


@dataclass(frozen=True)
class RunOptions:
    dt: float = 2e-4
    stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt > 0 violated")
        if self.stride < 1:
            raise ConfigError("stride >= 1 violated")


def _read_sections(path: Path | None) -> dict[str, dict[str, str]]:
    raw: dict[str, dict[str, str]] = {name: {} for name in _SECTIONS}
    if path is None:
        return raw
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        default_section="__none__",
    )
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        raw[section].update(parser.items(section))
    return raw


def _number(section: str, key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"parse error: {section}.{key} = {text!r} is not a number") from None


def build(raw: Mapping[str, Mapping[str, str]]) -> tuple[SystemParams, FaultSpec, RunOptions]:
    values: dict[str, dict[str, float]] = {}
    for section, defaults in _SECTIONS.items():
        given = raw.get(section, {})
        unknown = sorted(set(given) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
        merged = dict(defaults)
        merged.update({k: _number(section, k, v) for k, v in given.items()})
        values[section] = merged

    s = values["system"]
    s_base = s["p_ref"] if math.isnan(s["s_base"]) else s["s_base"]
    v_base = s["e_ref"] if math.isnan(s["v_base"]) else s["v_base"]
    bases = BaseQuantities(s_base, v_base, s["omega0"])
    params = SystemParams(
        p_m=to_per_unit(s["p_ref"], "power", bases),
        q_ref=s["q_ref"],
        e_ref=to_per_unit(s["e_ref"], "voltage", bases),
        k=s["k"],
        j_inertia=s["j"],
        d_damping=s["d"],
        omega0=s["omega0"],
        r_v=s["r_v"],
        x_v=s["x_v"],
        i_max=s["i_max"],
        v_grid=to_per_unit(s["v_g"], "voltage", bases),
        l_f=s["l_f"],
        c_f=s["c_f"],
        l_g=s["l_g"],
        u_dc=s["u_dc"],
        bases=bases,
    )
    f = values["fault"]
    fault = FaultSpec(f["t_fault"], f["t_clear"], f["v_retained"], f["t_end"])
    fault.check_against(params)
    r = values["run"]
    if r["stride"] != int(r["stride"]):
        raise ConfigError("stride must be an integer")
    run = RunOptions(dt=r["dt"], stride=int(r["stride"]))
    return params, fault, run


def parse_overrides(items: list[str] | None) -> dict[str, dict[str, str]]:
    """Turn ``["system.x_v=0.4", ...]`` into a nested section/key dict."""
    out: dict[str, dict[str, str]] = {}
    for item in items or []:
        lhs, sep, value = item.partition("=")
        section, dot, key = lhs.strip().partition(".")
        if not sep or not dot or not key:
            raise ConfigError(f"bad override {item!r}; expected section.key=value")
        out.setdefault(section, {})[key.strip()] = value.strip()
    return out


def load_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Mapping[str, str]] | None = None,
) -> tuple[SystemParams, FaultSpec, RunOptions]:
    """Read, merge overrides into, and validate a config file.

    ``path=None`` yields the defaults. Raises :class:`ConfigError` on parse
    failures, unknown sections/keys and violated invariants.
    """
    raw = _read_sections(Path(path) if path is not None else None)
    for section, kv in (overrides or {}).items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        raw[section].update(kv)
    return build(raw)
