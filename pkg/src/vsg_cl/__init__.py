"""Transient stability of a grid-tied virtual synchronous generator under current limiting."""
from .config import BaseQuantities, FaultSpec, RunOptions, SystemParams, load_config
from .curves import PDeltaCurve, eval_closed_form, regime_boundaries
from .dynamics import InertiaMode
from .epac import (
    EpacReport,
    EpacScenario,
    critical_clearing_angle,
    critical_clearing_time,
    solve_equilibria,
    verdict,
)
from .errors import (
    ConfigError,
    DegenerateImpedanceError,
    NoIntersectionError,
    NoSignChangeError,
    SimulationError,
    VsgError,
)
from .limiters import DqPhasor, LimiterStrategy, Variant
from .sim import Trajectory, run_scenario

__version__ = "0.1.0"

__all__ = [
    "BaseQuantities", "FaultSpec", "RunOptions", "SystemParams", "load_config",
    "PDeltaCurve", "eval_closed_form", "regime_boundaries", "InertiaMode",
    "EpacReport", "EpacScenario", "critical_clearing_angle", "critical_clearing_time",
    "solve_equilibria", "verdict", "ConfigError", "DegenerateImpedanceError",
    "NoIntersectionError", "NoSignChangeError", "SimulationError", "VsgError",
    "DqPhasor", "LimiterStrategy", "Variant", "Trajectory", "run_scenario",
]
