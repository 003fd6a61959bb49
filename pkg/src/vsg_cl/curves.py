"""Piecewise P-delta curves per limiter strategy.

The composed pipeline (reference current -> limiter -> ``v . i``) is the
source of truth. :func:`eval_closed_form` evaluates the printed per-strategy
formulas under their ``E = V``, ``r_v = 0`` assumption and serves as a
cross-check. Two printed forms are corrected:

* angle priority, saturated: ``V I_max cos(delta/2)`` (printed without ``V``);
* d priority, third branch: second term carries ``-sign(i_q_ref)``, which is
  ``+`` on ``(0, 2 pi)``. The printed ``-`` is available with
  ``printed_eq10=True``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .config import SystemParams
from .limiters import DqPhasor, LimiterStrategy, Variant
from .network import _current, active_power, pcc_voltage_dq

UNSATURATED = "unsaturated"
SATURATED = "saturated"
D_LIMIT = "d-limit"  # d priority, |i_d_ref| >= i_max
Q_CUT = "q-cut"  # d priority, q trimmed to the remaining headroom
Q_LIMIT = "q-limit"  # q priority, |i_q_ref| >= i_max
D_CUT = "d-cut"  # q priority, d trimmed to the remaining headroom

_SCAN_POINTS = 2049
_BISECT_TOL = 1e-10


@dataclass(frozen=True)
class PDeltaCurve:
    """Evaluable map ``delta -> P_e`` for one strategy at fixed voltages.

    ``regime_boundaries`` holds the angles in ``[0, pi]`` where the active
    saturation branch changes; it is filled in on construction.
    """

    strategy: LimiterStrategy
    e_mag: float
    v_mag: float
    x_v: float
    r_v: float = 0.0
    i_max: float = 2.4
    regime_boundaries: tuple[float, ...] = field(default=None, compare=False)

    def __post_init__(self):
        if self.regime_boundaries is None:
            bounds = regime_boundaries(
                self.strategy, self.e_mag, self.v_mag, self.x_v, self.i_max, self.r_v
            )
            object.__setattr__(self, "regime_boundaries", tuple(bounds))

    @classmethod
    def from_params(
        cls,
        params: SystemParams,
        strategy: LimiterStrategy,
        e_mag: float | None = None,
        v_mag: float | None = None,
    ) -> "PDeltaCurve":
        return cls(
            strategy,
            params.e_ref if e_mag is None else e_mag,
            params.v_grid if v_mag is None else v_mag,
            params.x_v,
            params.r_v,
            params.i_max,
        )

    def currents(self, delta: float) -> tuple[DqPhasor, DqPhasor]:
        i_ref = _current(self.e_mag, self.v_mag, delta, self.r_v, self.x_v)
        return i_ref, self.strategy.apply(i_ref, self.i_max, delta)

    def __call__(self, delta: float) -> float:
        return eval_composed(self, delta)

    def regime(self, delta: float) -> str:
        i_ref = _current(self.e_mag, self.v_mag, delta, self.r_v, self.x_v)
        return _regime_tag(self.strategy.variant, i_ref, self.i_max)


def _regime_tag(variant: Variant, i_ref: DqPhasor, i_max: float) -> str:
    if variant is Variant.NONE or math.hypot(i_ref.d, i_ref.q) <= i_max:
        return UNSATURATED
    if variant is Variant.D:
        return D_LIMIT if abs(i_ref.d) >= i_max else Q_CUT
    if variant is Variant.Q:
        return Q_LIMIT if abs(i_ref.q) >= i_max else D_CUT
    return SATURATED


def eval_composed(curve: PDeltaCurve, delta: float) -> float:
    _, i = curve.currents(delta)
    return active_power(pcc_voltage_dq(curve.v_mag, delta), i)


def eval_closed_form(
    strategy: LimiterStrategy,
    delta: float,
    v_mag: float,
    x_v: float,
    i_max: float,
    *,
    printed_eq10: bool = False,
) -> float:
    """Printed closed-form active power at ``E = V = v_mag``, ``r_v = 0``.

    Valid on ``[0, pi]``; the q-priority third branch assumes ``i_d_ref >= 0``.
    """
    v, x, imax = v_mag, x_v, i_max
    s, c = math.sin(delta), math.cos(delta)
    i_d = v * s / x
    i_q = v * (c - 1.0) / x
    unsat = v * v * s / x
    var = strategy.variant
    if var is Variant.NONE or math.hypot(i_d, i_q) < imax:
        return unsat
    if var is Variant.ANGLE:
        return v * imax * math.cos(0.5 * delta)
    if var is Variant.ADAPTIVE:
        return v * imax * math.cos(strategy.phi(delta) - 0.5 * delta)
    if var is Variant.D:
        if abs(i_d) >= imax:
            return math.copysign(1.0, i_d) * v * imax * c
        root = v * s * math.sqrt(max(imax * imax - i_d * i_d, 0.0))
        sign_q = -1.0 if i_q < 0 else 1.0
        second = -root if printed_eq10 else -sign_q * root
        return v * v / (2.0 * x) * math.sin(2.0 * delta) + second
    # q priority
    if abs(i_q) >= imax:
        sign_q = -1.0 if i_q < 0 else 1.0
        return -v * s * imax * sign_q
    return v * c * math.sqrt(max(imax * imax - i_q * i_q, 0.0)) - v * v / x * s * (c - 1.0)


def _bisect(g, lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    g_lo = g(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _crossings(g, lo: float, hi: float, n: int = _SCAN_POINTS) -> list[float]:
    """Roots of ``g`` on ``[lo, hi]`` bracketed on an ``n``-point scan, then bisected."""
    step = (hi - lo) / (n - 1)
    xs = [lo + k * step for k in range(n)]
    xs[-1] = hi
    gs = [g(x) for x in xs]
    roots = []
    for k in range(n - 1):
        a, b = gs[k], gs[k + 1]
        if a == 0.0 and k > 0:
            roots.append(xs[k])
        elif a * b < 0:
            roots.append(_bisect(g, xs[k], xs[k + 1]))
    if gs[-1] == 0.0:
        roots.append(xs[-1])
    return roots


def regime_boundaries(
    strategy: LimiterStrategy,
    e_mag: float,
    v_mag: float,
    x_v: float,
    i_max: float,
    r_v: float = 0.0,
) -> list[float]:
    """Angles in ``[0, pi]`` where the saturation branch changes, ascending.

    Empty when the curve never saturates on that interval.
    """
    var = strategy.variant
    if var is Variant.NONE:
        return []

    def cur(delta):
        return _current(e_mag, v_mag, delta, r_v, x_v)

    funcs = [lambda d: cur(d).magnitude - i_max]
    if var is Variant.D:
        funcs.append(lambda d: abs(cur(d).d) - i_max)
    elif var is Variant.Q:
        funcs.append(lambda d: abs(cur(d).q) - i_max)
    found = sorted(r for g in funcs for r in _crossings(g, 0.0, math.pi))
    out: list[float] = []
    for r in found:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return out


class CurveRow(NamedTuple):
    delta: float
    pe: float
    regime: str


def emit_curve_table(curve: PDeltaCurve, grid: Iterable[float]) -> list[CurveRow]:
    """One ``(delta, P_e, regime)`` row per grid point, in grid order."""
    rows = [CurveRow(float(d), curve(float(d)), curve.regime(float(d))) for d in grid]
    if not rows:
        raise ValueError("empty delta grid")
    return rows


def default_grid(n: int = 181, upper: float = math.pi) -> Sequence[float]:
    return [upper * k / (n - 1) for k in range(n)]
