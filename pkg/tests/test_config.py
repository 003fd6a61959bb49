import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vsg_cl.config import (
    BaseQuantities,
    FaultSpec,
    SystemParams,
    from_per_unit,
    load_config,
    parse_overrides,
    to_per_unit,
)
from vsg_cl.errors import ConfigError

BASES = BaseQuantities(1000.0, 380.0, 314.0)


def test_baseline_gives_unit_dispatch(baseline):
    params, fault, run = baseline
    assert params.p_m == 1.0
    assert params.e_ref == 1.0 and params.v_grid == 1.0
    assert params.bases.s_base == 1000.0 and params.bases.v_base == 380.0
    assert params.j_inertia == 3.0 and params.d_damping == 100.0 and params.omega0 == 314.0
    assert (fault.t_fault, fault.t_clear) == (0.5, 0.8)
    assert params.c_f == 50e-3  # stored as given, unused


def test_defaults_applied():
    params, fault, run = load_config()
    assert (params.r_v, params.x_v, params.i_max, params.k, params.q_ref) == (0.0, 0.3, 2.4, 0.05, 0.0)
    assert fault.v_retained == 0.2 and fault.t_end == 3.0
    assert run.dt == 2e-4


def test_fault_ordering_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[fault]\nt_fault = 0.9\nt_clear = 0.8\n")
    with pytest.raises(ConfigError, match="t_fault < t_clear violated"):
        load_config(path)


@pytest.mark.parametrize("text, field", [
    ("[system]\nx_v = 0\n", "x_v"),
    ("[system]\nj = -1\n", "j"),
    ("[system]\nr_v = -0.1\n", "r_v"),
    ("[system]\ni_max = 0\n", "i_max"),
    ("[fault]\nv_retained = -0.1\n", "v_retained"),
    ("[fault]\nt_end = 0.7\n", "t_clear"),
    ("[run]\ndt = 0\n", "dt"),
])
def test_invalid_values_name_the_field(tmp_path, text, field):
    path = tmp_path / "bad.ini"
    path.write_text(text)
    with pytest.raises(ConfigError, match=field):
        load_config(path)


def test_unknown_key_and_section_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[system]\nfoo = 1\n")
    with pytest.raises(ConfigError, match="foo"):
        load_config(path)
    path.write_text("[network]\nx = 1\n")
    with pytest.raises(ConfigError, match="network"):
        load_config(path)


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("x_v = 0.3\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("[system]\nx_v = abc\n")
    with pytest.raises(ConfigError, match="x_v"):
        load_config(path)


def test_comments_and_overrides(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("# header\n[system]\nx_v = 0.4  # inline\n")
    params, _, _ = load_config(path, parse_overrides(["system.k=0", "fault.v_retained=0.1"]))
    assert params.x_v == 0.4 and params.k == 0.0
    with pytest.raises(ConfigError):
        parse_overrides(["nodot=1"])


def test_voltage_retained_above_grid_rejected():
    params, _, _ = load_config()
    with pytest.raises(ConfigError):
        FaultSpec(0.5, 0.8, 1.2, 3.0).check_against(params)


def test_fault_voltage_window():
    f = FaultSpec(0.5, 0.8, 0.2, 3.0)
    assert f.voltage(0.49, 1.0) == 1.0
    assert f.voltage(0.5, 1.0) == 0.2
    assert f.voltage(0.79, 1.0) == 0.2
    assert f.voltage(0.8, 1.0) == 1.0


def test_per_unit_examples():
    assert to_per_unit(1000.0, "power", BASES) == 1.0
    assert to_per_unit(380.0, "voltage", BASES) == 1.0
    assert BASES.i_base == 1000.0 / 380.0
    assert to_per_unit(6.316, "current", BASES) == pytest.approx(6.316 * 380.0 / 1000.0, rel=1e-15)
    with pytest.raises(ValueError):
        to_per_unit(1.0, "torque", BASES)
    with pytest.raises(ConfigError):
        BaseQuantities(0.0, 380.0, 314.0)


@given(st.floats(1e-6, 1e9), st.sampled_from(["power", "voltage", "current"]))
def test_per_unit_round_trip(x, kind):
    assert math.isclose(from_per_unit(to_per_unit(x, kind, BASES), kind, BASES), x, rel_tol=1e-12)


def test_digest_is_stable():
    a, _, _ = load_config()
    b, _, _ = load_config()
    assert a.digest() == b.digest()
    assert isinstance(a, SystemParams)
