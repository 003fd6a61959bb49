"""Swing-equation right-hand side and a fixed-step RK4 integrator.

Power enters the swing equation in watts (pu times ``s_base``) against the SI
``J`` and ``D``. ``exact`` mode keeps the ``J * omega_m`` product; ``classic``
mode freezes it at ``J * omega0`` so that an energy function exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .config import SystemParams
from .errors import SimulationError
from .limiters import DqPhasor, LimiterStrategy
from .network import _current, active_power, avr_voltage, pcc_voltage_dq, reactive_power


class InertiaMode(str, Enum):
    EXACT = "exact"
    CLASSIC = "classic"


@dataclass(frozen=True)
class SimState:
    t: float
    delta: float
    omega_m: float
    e_mag: float
    q_e_prev: float


@dataclass(frozen=True)
class StepInputs:
    """What the electrical network looks like over one step."""

    v_grid: float
    strategy: LimiterStrategy


def derivative(
    state: SimState, p_e: float, params: SystemParams, mode: InertiaMode = InertiaMode.EXACT
) -> tuple[float, float]:
    return _rhs(state.delta, state.omega_m, p_e, params, InertiaMode(mode))


def _rhs(delta, omega, p_e, params: SystemParams, mode: InertiaMode):
    dw = omega - params.omega0
    inertia = params.j_inertia * (omega if mode is InertiaMode.EXACT else params.omega0)
    if mode is InertiaMode.EXACT and not omega > 0:
        raise SimulationError(f"omega_m > 0 violated (omega_m={omega!r})")
    accel = (params.bases.s_base * (params.p_m - p_e) - params.d_damping * dw) / inertia
    return dw, accel


def advance(
    delta: float,
    omega: float,
    pe_fn: Callable[[float], float],
    params: SystemParams,
    dt: float,
    mode: InertiaMode = InertiaMode.EXACT,
) -> tuple[float, float]:
    """One classical RK4 step of ``(delta, omega)`` with ``P_e = pe_fn(delta)``."""
    h2 = 0.5 * dt
    try:
        a1, b1 = _rhs(delta, omega, pe_fn(delta), params, mode)
        d2, w2 = delta + h2 * a1, omega + h2 * b1
        a2, b2 = _rhs(d2, w2, pe_fn(d2), params, mode)
        d3, w3 = delta + h2 * a2, omega + h2 * b2
        a3, b3 = _rhs(d3, w3, pe_fn(d3), params, mode)
        d4, w4 = delta + dt * a3, omega + dt * b3
        a4, b4 = _rhs(d4, w4, pe_fn(d4), params, mode)
    except (ValueError, OverflowError) as exc:  # math domain error on an inf stage
        raise SimulationError(f"non-finite RK4 stage: {exc}") from exc
    new_delta = delta + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    new_omega = omega + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    if not (math.isfinite(new_delta) and math.isfinite(new_omega)):
        raise SimulationError("non-finite state after RK4 step")
    return new_delta, new_omega


def electrical(
    params: SystemParams, strategy: LimiterStrategy, e_mag: float, v_grid: float, delta: float
) -> tuple[DqPhasor, DqPhasor, float, float]:
    """``(i_ref, i, P_e, Q_e)`` at one operating point."""
    i_ref = _current(e_mag, v_grid, delta, params.r_v, params.x_v)
    i = strategy.apply(i_ref, params.i_max, delta)
    v = pcc_voltage_dq(v_grid, delta)
    return i_ref, i, active_power(v, i), reactive_power(v, i)


def step_rk4(
    state: SimState,
    inputs: StepInputs,
    params: SystemParams,
    dt: float,
    mode: InertiaMode = InertiaMode.EXACT,
) -> SimState:
    """Advance one step; ``E`` comes from the AVR fed with the previous step's ``Q_e``."""
    if not dt > 0:
        raise ValueError("dt > 0 required")
    mode = InertiaMode(mode)
    e = avr_voltage(state.q_e_prev, params)

    def pe_fn(d):
        return electrical(params, inputs.strategy, e, inputs.v_grid, d)[2]

    delta, omega = advance(state.delta, state.omega_m, pe_fn, params, dt, mode)
    q_e = electrical(params, inputs.strategy, e, inputs.v_grid, delta)[3]
    return replace(state, t=state.t + dt, delta=delta, omega_m=omega, e_mag=e, q_e_prev=q_e)


def time_to_angle(
    pe_fn: Callable[[float], float],
    params: SystemParams,
    delta_start: float,
    delta_target: float,
    mode: InertiaMode = InertiaMode.EXACT,
    dt: float = 1e-3,
    t_max: float = 30.0,
    tol: float = 1e-6,
) -> float:
    """Time for ``delta`` to first reach ``delta_target`` starting at rest from ``delta_start``.

    Integrates with fixed steps and bisects the step size inside the crossing
    step until the bracket is narrower than ``tol`` seconds. Raises
    :class:`SimulationError` when the target is not reached by ``t_max``.
    """
    mode = InertiaMode(mode)
    if delta_target <= delta_start:
        return 0.0
    t, d, w = 0.0, delta_start, params.omega0
    while t < t_max:
        d_new, w_new = advance(d, w, pe_fn, params, dt, mode)
        if d_new >= delta_target:
            lo, hi = 0.0, dt
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if advance(d, w, pe_fn, params, mid, mode)[0] >= delta_target:
                    hi = mid
                else:
                    lo = mid
            return t + 0.5 * (lo + hi)
        t, d, w = t + dt, d_new, w_new
    raise SimulationError(f"delta did not reach {delta_target:.6f} rad within {t_max} s")
