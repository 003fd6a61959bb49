"""Exception types raised across the package."""


class VsgError(Exception):
    """Base class for all package errors."""


class ConfigError(VsgError):
    """Malformed configuration file or violated parameter invariant."""


class DegenerateImpedanceError(VsgError):
    """Series impedance is zero (r_v = x_v = 0)."""


class NoIntersectionError(VsgError):
    """The P-delta curve never reaches the dispatched power."""


class NoSignChangeError(VsgError):
    """Acceleration minus deceleration area keeps one sign on the interval."""


class SimulationError(VsgError):
    """Non-finite state or a violated state invariant during integration."""
