import math
from dataclasses import replace

import numpy as np
import pytest

from vsg_cl.config import FaultSpec, load_config
from vsg_cl.dynamics import InertiaMode, SimState, StepInputs, derivative, step_rk4, time_to_angle
from vsg_cl.errors import SimulationError
from vsg_cl.limiters import ADAPTIVE, ANGLE, D_PRIORITY, NONE, Q_PRIORITY
from vsg_cl.sim import COLUMNS, Trajectory, initial_operating_point, is_stable, run_scenario, settled


@pytest.fixture(scope="module")
def params():
    return load_config()[0]


def test_derivative_examples(params):
    s = SimState(0.0, 0.3, params.omega0, 1.0, 0.0)
    assert derivative(s, params.p_m, params) == (0.0, 0.0)
    p0 = replace(params, d_damping=0.0)
    _, dw = derivative(s, params.p_m - 1.0, p0, InertiaMode.EXACT)
    assert dw == pytest.approx(params.bases.s_base / (params.j_inertia * params.omega0), rel=1e-15)
    fast = replace(s, omega_m=params.omega0 + 1.0)
    assert derivative(fast, params.p_m, replace(params, d_damping=1e4))[1] < 0


def test_exact_and_classic_differ_off_nominal(params):
    s = SimState(0.0, 0.3, 2 * params.omega0, 1.0, 0.0)
    exact = derivative(s, 0.0, params, "exact")[1]
    classic = derivative(s, 0.0, params, "classic")[1]
    assert classic == pytest.approx(2 * exact, rel=1e-12)
    with pytest.raises(SimulationError):
        derivative(replace(s, omega_m=0.0), 0.0, params, "exact")


def test_step_keeps_equilibrium(params):
    d0, e0, q0 = initial_operating_point(params, Q_PRIORITY)
    s = SimState(0.0, d0, params.omega0, e0, q0)
    nxt = step_rk4(s, StepInputs(params.v_grid, Q_PRIORITY), params, 2e-4)
    assert abs(nxt.delta - d0) <= 1e-14 and abs(nxt.omega_m - params.omega0) <= 1e-14 * params.omega0
    assert nxt.t == 2e-4


def test_step_rejects_bad_dt(params):
    s = SimState(0.0, 0.3, params.omega0, 1.0, 0.0)
    for dt in (0.0, -1e-3):
        with pytest.raises(ValueError):
            step_rk4(s, StepInputs(1.0, NONE), params, dt)


def test_step_divergence_guard(params):
    s = SimState(0.0, 0.3, params.omega0, 1.0, 0.0)
    wild = replace(params, j_inertia=1e-300)
    with pytest.raises(SimulationError):
        step_rk4(s, StepInputs(1.0, NONE), wild, 1.0, InertiaMode.CLASSIC)


@pytest.mark.parametrize("strategy", [NONE, ANGLE, D_PRIORITY, Q_PRIORITY, ADAPTIVE], ids=lambda s: s.name)
def test_no_fault_holds_equilibrium(params, strategy):
    fault = FaultSpec(0.5, 0.8, params.v_grid, 2.0)
    tr = run_scenario(params, fault, strategy, dt=1e-3)
    assert np.max(np.abs(tr["delta"] - tr.delta_0)) <= 1e-6
    assert tr.verdict == "stable" and tr.settled


def test_initial_point_is_avr_fixed_point(params):
    d0, e0, q0 = initial_operating_point(params, Q_PRIORITY)
    assert e0 == pytest.approx(params.e_ref + params.k * (params.q_ref - q0), abs=1e-9)


def test_trajectory_invariants(params):
    fault = FaultSpec(0.5, 0.8, 0.2, 1.5)
    tr = run_scenario(params, fault, Q_PRIORITY, dt=5e-4, stride=4)
    t = tr["t"]
    assert set(tr.columns) == set(COLUMNS)
    assert np.all(np.diff(t) > 0)
    assert np.allclose(np.diff(t)[:-1], 4 * 5e-4)
    sat = tr["saturated"] == 1.0
    assert sat.any()
    assert np.all(tr["imag"][sat] <= params.i_max * (1 + 1e-9))
    assert np.all(tr["vg"][(t >= 0.5) & (t < 0.8 - 1e-9)] == 0.2)
    assert tr.metadata["params_hash"] == params.digest() and tr.metadata["dt"] == 5e-4


def test_deterministic(params):
    fault = FaultSpec(0.5, 0.8, 0.2, 1.2)
    a = run_scenario(params, fault, ADAPTIVE, dt=1e-3)
    b = run_scenario(params, fault, ADAPTIVE, dt=1e-3)
    for c in COLUMNS:
        assert np.array_equal(a[c], b[c])


def _traj(t, delta, omega, delta_0=0.3, delta_u=2.7):
    return Trajectory({"t": t, "delta": delta, "omega": omega}, delta_0, delta_u)


def test_is_stable_examples(params):
    t = np.linspace(0, 3, 301)
    w0 = params.omega0
    assert is_stable(_traj(t, np.full_like(t, 0.3), np.full_like(t, w0)), params) == "stable"
    assert is_stable(_traj(t, 0.3 + 4 * t, np.full_like(t, w0 + 4)), params) == "unstable"
    decaying = 0.3 + 0.5 * np.exp(-t) * np.sin(5 * t)
    dw = np.gradient(decaying, t)
    tr = _traj(t, decaying, w0 + dw)
    assert is_stable(tr, params) == "stable" and settled(tr, params)
    # slip backwards by a full turn
    assert is_stable(_traj(t, 0.3 - 3 * t, np.full_like(t, w0 - 3)), params) == "unstable"
    # beyond delta_u and still accelerating at the horizon
    assert is_stable(_traj(t, np.linspace(0.3, 3.0, 301), np.full_like(t, w0 + 0.1)), params) == "unstable"


def test_settled_flag(params):
    t = np.linspace(0, 3, 31)
    tr = _traj(t, np.full_like(t, 0.3), np.full_like(t, params.omega0 + 1.0))
    assert not settled(tr, params)


def test_first_swing_stable_with_energy_sign(params):
    # short fault, classic mode, D = 0: energy stays below the barrier, swing stays below delta_u
    p = replace(params, d_damping=0.0, k=0.0)
    tr = run_scenario(p, FaultSpec(0.5, 0.55, 0.2, 2.0), Q_PRIORITY, dt=1e-3, mode="classic")
    assert tr.verdict == "stable"
    assert np.max(tr["delta"]) < tr.delta_u


def test_time_to_angle_stops_at_target(params):
    p = replace(params, d_damping=0.0)
    t = time_to_angle(lambda d: 0.0, p, 0.3, 0.8, InertiaMode.CLASSIC)
    exact = math.sqrt(2 * 0.5 * p.j_inertia * p.omega0 / (p.bases.s_base * p.p_m))
    assert t == pytest.approx(exact, abs=2e-6)
    assert time_to_angle(lambda d: 0.0, p, 0.3, 0.3) == 0.0
