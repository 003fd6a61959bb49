"""Equal-area stability analysis on P-delta curves.

Curves are any callables ``delta -> P_e``; a ``regime_boundaries`` attribute,
when present, is passed to the quadrature as breakpoints. Areas are signed
integrals and damping is neglected, so verdicts are conservative for D > 0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

from scipy import integrate, optimize

from .config import SystemParams
from .curves import _bisect
from .dynamics import InertiaMode, time_to_angle
from .errors import NoIntersectionError, NoSignChangeError, SimulationError

Curve = Callable[[float], float]

MARGINAL_BAND = 1e-6  # pu*rad
_SCAN_POINTS = 2049
_ROOT_TOL = 1e-12
_QUAD_TOL = 1e-10
_TANGENT_GAP = 1e-6  # up/down crossings closer than this are one touch


class ConstantCurve:
    """``P_e`` independent of delta, e.g. a bolted fault (``power=0``)."""

    regime_boundaries: tuple[float, ...] = ()

    def __init__(self, power: float):
        self.power = float(power)

    def __call__(self, delta: float) -> float:
        return self.power

    def __repr__(self):
        return f"ConstantCurve({self.power!r})"


def _scan(g, lo, hi, n=_SCAN_POINTS):
    xs = [lo + (hi - lo) * k / (n - 1) for k in range(n)]
    return xs, [g(x) for x in xs]


def _peak(curve: Curve, xs, ys) -> tuple[float, float]:
    k = max(range(len(ys)), key=ys.__getitem__)
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(
        lambda d: -curve(d), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    if -res.fun >= ys[k]:
        return float(res.x), float(-res.fun)
    return xs[k], ys[k]


def solve_equilibria(curve: Curve, p_m: float, tol: float = _ROOT_TOL) -> tuple[float, float]:
    """Stable and unstable equilibria of ``curve(delta) = p_m``.

    The stable root is the first upward crossing in ``[0, pi]``, the unstable
    root the last downward crossing in ``[0, pi]``. A curve that stays above
    ``p_m`` up to ``pi`` (the half-delta adaptive law does) gets its unstable
    root from the first downward crossing in ``(pi, 2 pi]``; for that law the
    crossing is the jump back out of saturation, so ``p_m`` is bracketed by the
    one-sided limits rather than attained. A curve that only touches ``p_m``
    returns the tangency angle twice.
    """

    def g(d):
        return curve(d) - p_m

    xs, gs = _scan(g, 0.0, math.pi)
    ups = [k for k in range(len(xs) - 1) if gs[k] < 0 <= gs[k + 1]]
    if not ups:
        d_pk, p_pk = _peak(curve, xs, [y + p_m for y in gs])
        if p_pk >= p_m - 1e-9 and gs[0] < 0:
            return d_pk, d_pk
        raise NoIntersectionError(
            f"p_m = {p_m:.6g} exceeds the curve peak {p_pk:.6g} on [0, pi]"
        )
    k = ups[0]
    d_s = _bisect(g, xs[k], xs[k + 1], tol)
    downs = [k for k in range(ups[0], len(xs) - 1) if gs[k] >= 0 > gs[k + 1]]
    if downs:
        k = downs[-1]
        d_u = _bisect(g, xs[k], xs[k + 1], tol)
        if d_u - d_s < _TANGENT_GAP:
            d_pk, _ = _peak(curve, xs, [y + p_m for y in gs])
            return d_pk, d_pk
        return d_s, d_u
    xs2, gs2 = _scan(g, math.pi, 2.0 * math.pi)
    for k in range(len(xs2) - 1):
        if gs2[k] >= 0 > gs2[k + 1]:
            return d_s, _bisect(g, xs2[k], xs2[k + 1], tol)
    raise NoIntersectionError("curve never falls back below p_m on [0, 2 pi]")


def _breaks(curve: Curve, a: float, b: float) -> list[float]:
    pts = getattr(curve, "regime_boundaries", ()) or ()
    return [p for p in pts if a < p < b]


def _integral(f, curve: Curve, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    pts = _breaks(curve, a, b)
    val, _ = integrate.quad(
        f, a, b, points=pts or None, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=400
    )
    return float(val)


def acceleration_area(curve_fault: Curve, p_m: float, delta_0: float, delta_c: float) -> float:
    """Signed ``int (p_m - P_fault) d delta`` over ``[delta_0, delta_c]``."""
    return _integral(lambda d: p_m - curve_fault(d), curve_fault, delta_0, delta_c)


def deceleration_area(curve_post: Curve, p_m: float, delta_c: float, delta_u: float) -> float:
    """Signed ``int (P_post - p_m) d delta`` over ``[delta_c, delta_u]``."""
    return _integral(lambda d: curve_post(d) - p_m, curve_post, delta_c, delta_u)


@dataclass(frozen=True)
class EpacScenario:
    p_m: float
    curve_pre: Curve
    curve_fault: Curve
    curve_post: Curve
    delta_0: float
    delta_u: float

    @classmethod
    def build(cls, p_m: float, curve_pre: Curve, curve_fault: Curve, curve_post: Curve):
        """Solve ``delta_0`` on the pre-fault curve and ``delta_u`` on the post-fault curve."""
        delta_0, _ = solve_equilibria(curve_pre, p_m)
        _, delta_u = solve_equilibria(curve_post, p_m)
        if not delta_0 < delta_u:
            raise NoIntersectionError(
                f"delta_0 = {delta_0:.6f} is not below delta_u = {delta_u:.6f}"
            )
        return cls(p_m, curve_pre, curve_fault, curve_post, delta_0, delta_u)


@dataclass(frozen=True)
class EpacReport:
    a_acc: float
    a_dec: float
    margin: float
    verdict: str
    delta_c: float
    delta_0: float
    delta_u: float
    delta_cc: Optional[float] = None
    t_cc: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _check_clearing(scenario: EpacScenario, delta_c: float) -> None:
    slack = 1e-12 * max(1.0, abs(scenario.delta_u))
    if not scenario.delta_0 - slack <= delta_c <= scenario.delta_u + slack:
        raise ValueError(
            f"delta_c = {delta_c:.6f} outside [{scenario.delta_0:.6f}, {scenario.delta_u:.6f}]"
        )


def areas(scenario: EpacScenario, delta_c: float) -> tuple[float, float]:
    _check_clearing(scenario, delta_c)
    a_acc = acceleration_area(scenario.curve_fault, scenario.p_m, scenario.delta_0, delta_c)
    a_dec = deceleration_area(scenario.curve_post, scenario.p_m, delta_c, scenario.delta_u)
    return a_acc, a_dec


def classify(margin: float, band: float = MARGINAL_BAND) -> str:
    if margin > band:
        return "stable"
    if margin < -band:
        return "unstable"
    return "marginal"


def critical_clearing_angle(scenario: EpacScenario, tol: float = 1e-12) -> float:
    """Clearing angle at which acceleration and deceleration areas balance.

    Raises :class:`NoSignChangeError` when the area difference keeps one sign
    on ``[delta_0, delta_u]``.
    """

    def f(d):
        a_acc, a_dec = areas(scenario, d)
        return a_acc - a_dec

    lo, hi = scenario.delta_0, scenario.delta_u
    f_lo, f_hi = f(lo), f(hi)
    if f_lo >= 0:
        raise NoSignChangeError("acceleration already exceeds deceleration at delta_0")
    if f_hi <= 0:
        raise NoSignChangeError("deceleration area never exhausted: stable for any clearing angle")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_clearing_time(
    scenario: EpacScenario,
    params: SystemParams,
    mode: InertiaMode = InertiaMode.EXACT,
    delta_cc: float | None = None,
    dt: float = 1e-3,
    t_max: float = 30.0,
) -> float:
    """Time along the during-fault trajectory from ``(delta_0, omega0)`` to ``delta_cc``."""
    if delta_cc is None:
        delta_cc = critical_clearing_angle(scenario)
    return time_to_angle(
        scenario.curve_fault, params, scenario.delta_0, delta_cc, mode=mode, dt=dt, t_max=t_max
    )


def verdict(
    scenario: EpacScenario,
    delta_c: float,
    params: SystemParams | None = None,
    mode: InertiaMode = InertiaMode.EXACT,
) -> EpacReport:
    """Areas, margin and verdict at ``delta_c``.

    The critical clearing angle is included when it exists, and the critical
    clearing time as well when ``params`` are given.
    """
    a_acc, a_dec = areas(scenario, delta_c)
    margin = a_dec - a_acc
    delta_cc = t_cc = None
    try:
        delta_cc = critical_clearing_angle(scenario)
    except NoSignChangeError:
        pass
    if delta_cc is not None and params is not None:
        try:
            t_cc = critical_clearing_time(scenario, params, mode, delta_cc=delta_cc)
        except SimulationError:
            pass
    return EpacReport(
        a_acc=a_acc,
        a_dec=a_dec,
        margin=margin,
        verdict=classify(margin),
        delta_c=delta_c,
        delta_0=scenario.delta_0,
        delta_u=scenario.delta_u,
        delta_cc=delta_cc,
        t_cc=t_cc,
    )
