"""Time-domain fault scenarios for the VSG swing dynamics.

The inner current loop is ideal: the injected current equals the limited
reference at every evaluation. The grid voltage is held constant over each
step and switches on the step grid.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .config import FaultSpec, SystemParams
from .curves import PDeltaCurve
from .dynamics import InertiaMode, SimState, StepInputs, electrical, step_rk4
from .epac import solve_equilibria
from .errors import NoIntersectionError, SimulationError
from .limiters import LimiterStrategy, Variant
from .network import avr_voltage

log = logging.getLogger(__name__)

COLUMNS = (
    "t", "delta", "omega", "e", "vg", "id_ref", "iq_ref",
    "id", "iq", "imag", "pe", "qe", "saturated",
)

SETTLE_BAND = 0.5  # rad/s


@dataclass
class Trajectory:
    """Sampled simulation output plus the stability verdict.

    Columns are numpy arrays keyed by :data:`COLUMNS`; index with
    ``traj["delta"]``.
    """

    columns: dict[str, np.ndarray]
    delta_0: float
    delta_u: float
    verdict: str = "stable"
    settled: bool = True
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])

    def value_at(self, name: str, t: float) -> float:
        """Column value at the first sample with time >= ``t``."""
        k = int(np.searchsorted(self.columns["t"], t - 1e-12))
        return float(self.columns[name][min(k, len(self) - 1)])


def _power_fn(params, strategy, e, v):
    return lambda d: electrical(params, strategy, e, v, d)[2]


def initial_operating_point(
    params: SystemParams,
    strategy: LimiterStrategy,
    tol: float = 1e-10,
    relax: float = 0.5,
    max_iter: int = 10_000,
) -> tuple[float, float, float]:
    """Pre-fault ``(delta_0, E, Q_e)`` with the AVR at its fixed point.

    Iterates ``E <- E + relax * (avr(Q_e(E)) - E)``, re-solving the stable
    equilibrium at each ``E``.
    """
    e = params.e_ref
    for _ in range(max_iter):
        delta_0, _ = solve_equilibria(_power_fn(params, strategy, e, params.v_grid), params.p_m)
        q_e = electrical(params, strategy, e, params.v_grid, delta_0)[3]
        e_new = e + relax * (avr_voltage(q_e, params) - e)
        if abs(e_new - e) < tol:
            e = e_new
            delta_0, _ = solve_equilibria(
                _power_fn(params, strategy, e, params.v_grid), params.p_m
            )
            q_e = electrical(params, strategy, e, params.v_grid, delta_0)[3]
            return delta_0, e, q_e
        e = e_new
    raise SimulationError("AVR fixed-point iteration did not converge")


def simulate(
    params: SystemParams,
    strategy: LimiterStrategy,
    state0: SimState,
    voltage: Callable[[float], float],
    dt: float,
    t_end: float,
    mode: InertiaMode = InertiaMode.EXACT,
    stride: int = 1,
) -> dict[str, np.ndarray]:
    """Integrate from ``state0`` to ``t_end`` and return the sampled columns.

    ``voltage(t)`` gives the grid voltage held over the step starting at ``t``.
    """
    if not dt > 0:
        raise ValueError("dt > 0 required")
    mode = InertiaMode(mode)
    n = int(round((t_end - state0.t) / dt))
    rows: list[tuple] = []
    state = state0
    limiting = strategy.variant is not Variant.NONE
    for k in range(n + 1):
        t = state0.t + k * dt
        v = voltage(t)
        if k % stride == 0 or k == n:
            e = avr_voltage(state.q_e_prev, params)
            i_ref, i, p, q = electrical(params, strategy, e, v, state.delta)
            rows.append((
                t, state.delta, state.omega_m, e, v, i_ref.d, i_ref.q, i.d, i.q,
                math.hypot(i.d, i.q), p, q,
                1.0 if limiting and i_ref.magnitude > params.i_max else 0.0,
            ))
        if k == n:
            break
        state = replace(step_rk4(state, StepInputs(v, strategy), params, dt, mode), t=t + dt)
    data = np.array(rows, dtype=float)
    return {name: data[:, j].copy() for j, name in enumerate(COLUMNS)}


def run_scenario(
    params: SystemParams,
    fault: FaultSpec,
    strategy: LimiterStrategy,
    dt: float = 2e-4,
    mode: InertiaMode = InertiaMode.EXACT,
    stride: int = 1,
) -> Trajectory:
    """Start at the pre-fault equilibrium, sag the grid voltage, classify the outcome."""
    fault.check_against(params)
    mode = InertiaMode(mode)
    try:
        delta_0, e0, q0 = initial_operating_point(params, strategy)
    except NoIntersectionError as exc:
        raise SimulationError(f"no pre-fault equilibrium: {exc}") from exc
    post = PDeltaCurve.from_params(params, strategy, e_mag=e0)
    _, delta_u = solve_equilibria(post, params.p_m)

    eps = 1e-9 * dt

    def voltage(t):
        return fault.voltage(t + eps, params.v_grid)

    state0 = SimState(0.0, delta_0, params.omega0, e0, q0)
    cols = simulate(params, strategy, state0, voltage, dt, fault.t_end, mode, stride)
    traj = Trajectory(
        columns=cols,
        delta_0=delta_0,
        delta_u=delta_u,
        metadata={
            "strategy": strategy.name,
            "params_hash": params.digest(),
            "dt": dt,
            "mode": mode.value,
            "stride": stride,
            "t_fault": fault.t_fault,
            "t_clear": fault.t_clear,
            "v_retained": fault.v_retained,
            "t_end": fault.t_end,
            "e0": e0,
        },
    )
    traj.verdict, traj.settled = is_stable(traj, params), settled(traj, params)
    log.info("%s: verdict %s (delta_u=%.4f)", strategy.name, traj.verdict, delta_u)
    return traj


def is_stable(traj: Trajectory, params: SystemParams) -> str:
    """``"unstable"`` on pole slip or on ongoing divergence at the horizon, else ``"stable"``.

    Pole slip means the unwrapped angle passing ``delta_u + 2 pi``, or falling
    more than ``2 pi`` below ``delta_0``.
    """
    delta = traj["delta"]
    dw_end = traj["omega"][-1] - params.omega0
    if np.max(delta) > traj.delta_u + 2.0 * math.pi:
        return "unstable"
    if np.min(delta) < traj.delta_0 - 2.0 * math.pi:
        return "unstable"
    if delta[-1] > traj.delta_u and dw_end > 0:
        return "unstable"
    return "stable"


def settled(traj: Trajectory, params: SystemParams, band: float = SETTLE_BAND) -> bool:
    """Frequency deviation at the horizon inside ``band`` rad/s."""
    return bool(abs(traj["omega"][-1] - params.omega0) < band)
