import math

import pytest

from vsg_cl.config import load_config
from vsg_cl.epac import ConstantCurve, EpacScenario

BASELINE_INI = """\
[system]
p_ref = 1000
j = 3
d = 100
omega0 = 314
e_ref = 380
v_g = 380
l_f = 1e-3
c_f = 50e-3

[fault]
t_fault = 0.5
t_clear = 0.8
"""


@pytest.fixture
def baseline_file(tmp_path):
    path = tmp_path / "baseline.ini"
    path.write_text(BASELINE_INI, encoding="utf-8")
    return path


@pytest.fixture
def baseline(baseline_file):
    return load_config(baseline_file)


@pytest.fixture
def sin_scenario():
    return EpacScenario.build(0.5, math.sin, ConstantCurve(0.0), math.sin)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for tag in sorted(results):
            terminalreporter.write_line(results[tag])
