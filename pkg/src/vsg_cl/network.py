"""Quasi-static phasor model of the VSG behind a series impedance.

The VSG internal voltage ``E`` defines the d axis; the grid voltage sits at
``-delta`` in that frame. ``(r_v, x_v)`` is the single series impedance between
them (virtual impedance plus grid reactance) and the PCC voltage is the grid
voltage itself.

Powers use the per-unit convention ``P = v_d i_d + v_q i_q`` and
``Q = v_q i_d - v_d i_q`` (no 3/2 factor).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .config import SystemParams
from .errors import DegenerateImpedanceError
from .limiters import DqPhasor


@dataclass(frozen=True)
class ElectricalState:
    e_mag: float
    v_mag: float
    delta: float
    r_v: float = 0.0
    x_v: float = 0.3


def pcc_voltage_dq(v_mag: float, delta: float) -> DqPhasor:
    return DqPhasor(v_mag * math.cos(delta), -v_mag * math.sin(delta))


def reference_current(state: ElectricalState) -> DqPhasor:
    """Unlimited current ``(E - V e^{-j delta}) / (r_v + j x_v)`` in the VSG frame."""
    return _current(state.e_mag, state.v_mag, state.delta, state.r_v, state.x_v)


def _current(e: float, v: float, delta: float, r: float, x: float) -> DqPhasor:
    zz = r * r + x * x
    if zz == 0.0:
        raise DegenerateImpedanceError("r_v = x_v = 0")
    # numerator a + jb, divided by r + jx
    a = e - v * math.cos(delta)
    b = v * math.sin(delta)
    return DqPhasor((a * r + b * x) / zz, (b * r - a * x) / zz)


def active_power(v_dq: DqPhasor, i_dq: DqPhasor) -> float:
    return v_dq.d * i_dq.d + v_dq.q * i_dq.q


def reactive_power(v_dq: DqPhasor, i_dq: DqPhasor) -> float:
    return v_dq.q * i_dq.d - v_dq.d * i_dq.q


def active_power_closed(state: ElectricalState) -> float:
    """Active power leaving the internal voltage source.

    Equals ``E V sin(delta) / x_v`` when ``r_v = 0``. With ``r_v > 0`` it
    exceeds the PCC power by the series loss ``r_v |I|^2``.
    """
    e, v, d, r, x = state.e_mag, state.v_mag, state.delta, state.r_v, state.x_v
    if r == 0.0:
        if x == 0.0:
            raise DegenerateImpedanceError("r_v = x_v = 0")
        return e * v * math.sin(d) / x
    return e / (r * r + x * x) * (x * v * math.sin(d) + r * (e - v * math.cos(d)))


def avr_voltage(q_e: float, params: SystemParams) -> float:
    """Droop law ``E_ref + k (Q_ref - Q_e)``, floored at zero."""
    return max(params.e_ref + params.k * (params.q_ref - q_e), 0.0)
