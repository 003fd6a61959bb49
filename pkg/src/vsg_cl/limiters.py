"""Current-limiter saturation laws in the VSG dq frame.

All limiters are pure functions of their arguments. A reference current whose
magnitude does not exceed ``i_max`` passes through unchanged.

Where the laws divide a component by its magnitude, ``sign(0)`` is taken as
+1; the surrounding ``min(...)`` still maps a zero component to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class DqPhasor(NamedTuple):
    d: float
    q: float

    @property
    def magnitude(self) -> float:
        return math.hypot(self.d, self.q)

    @property
    def angle(self) -> float:
        return math.atan2(self.q, self.d)


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def limit_angle_priority(i_ref: DqPhasor, i_max: float) -> DqPhasor:
    """Scale the reference down to ``i_max`` keeping its angle."""
    mag = math.hypot(i_ref.d, i_ref.q)
    if mag <= i_max:
        return DqPhasor(i_ref.d, i_ref.q)
    scale = i_max / mag
    return DqPhasor(i_ref.d * scale, i_ref.q * scale)


def limit_d_priority(i_ref: DqPhasor, i_max: float) -> DqPhasor:
    """Keep ``i_d`` up to ``i_max``; the q axis gets whatever headroom is left."""
    d, q = i_ref
    if math.hypot(d, q) <= i_max:
        return DqPhasor(d, q)
    d_star = _sign(d) * min(abs(d), i_max)
    room = math.sqrt(max(i_max * i_max - d_star * d_star, 0.0))
    return DqPhasor(d_star, _sign(q) * min(abs(q), room))


def limit_q_priority(i_ref: DqPhasor, i_max: float) -> DqPhasor:
    """Keep ``i_q`` up to ``i_max``; the d axis gets whatever headroom is left."""
    d, q = i_ref
    if math.hypot(d, q) <= i_max:
        return DqPhasor(d, q)
    q_star = _sign(q) * min(abs(q), i_max)
    room = math.sqrt(max(i_max * i_max - q_star * q_star, 0.0))
    return DqPhasor(_sign(d) * min(abs(d), room), q_star)


def limit_adaptive(i_ref: DqPhasor, i_max: float, delta: float, phi: float) -> DqPhasor:
    """Place a saturated current at angle ``-(delta/2 + phi)`` with magnitude ``i_max``.

    Below the limit the reference passes through.
    """
    if math.hypot(i_ref.d, i_ref.q) <= i_max:
        return DqPhasor(i_ref.d, i_ref.q)
    a = 0.5 * delta + phi
    return DqPhasor(i_max * math.cos(a), -i_max * math.sin(a))


def phi_half_delta(delta: float) -> float:
    return 0.5 * delta


class Variant(str, Enum):
    NONE = "none"
    ANGLE = "angle-priority"
    D = "d-priority"
    Q = "q-priority"
    ADAPTIVE = "adaptive"


_ALIASES = {
    "none": Variant.NONE,
    "off": Variant.NONE,
    "angle": Variant.ANGLE,
    "angle-priority": Variant.ANGLE,
    "angle_priority": Variant.ANGLE,
    "d": Variant.D,
    "d-priority": Variant.D,
    "d_priority": Variant.D,
    "q": Variant.Q,
    "q-priority": Variant.Q,
    "q_priority": Variant.Q,
    "adaptive": Variant.ADAPTIVE,
}

HALF_DELTA = "half-delta"


@dataclass(frozen=True)
class LimiterStrategy:
    """One saturation law, plus the phi law when the variant is adaptive.

    ``phi_law`` is either ``"half-delta"`` (phi = delta / 2) or a fixed angle
    in radians. It is ignored by the other variants.
    """

    variant: Variant = Variant.NONE
    phi_law: str | float = HALF_DELTA

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.variant is Variant.ADAPTIVE:
            if self.phi_law != HALF_DELTA and not isinstance(self.phi_law, (int, float)):
                raise ValueError(f"phi_law must be {HALF_DELTA!r} or a number, got {self.phi_law!r}")

    @classmethod
    def parse(cls, text: str) -> "LimiterStrategy":
        """Parse ``"q"``, ``"angle-priority"``, ``"adaptive"`` or ``"adaptive:0.3"``."""
        name, _, arg = text.strip().lower().partition(":")
        try:
            variant = _ALIASES[name]
        except KeyError:
            raise ValueError(f"unknown limiter strategy {text!r}") from None
        if not arg:
            return cls(variant)
        if variant is not Variant.ADAPTIVE:
            raise ValueError(f"only the adaptive strategy takes a phi argument: {text!r}")
        return cls(variant, HALF_DELTA if arg == HALF_DELTA else float(arg))

    @property
    def name(self) -> str:
        if self.variant is Variant.ADAPTIVE and self.phi_law != HALF_DELTA:
            return f"adaptive:{self.phi_law:g}"
        return self.variant.value

    def phi(self, delta: float) -> float:
        if self.phi_law == HALF_DELTA:
            return phi_half_delta(delta)
        return float(self.phi_law)

    def apply(self, i_ref: DqPhasor, i_max: float, delta: float = 0.0) -> DqPhasor:
        v = self.variant
        if v is Variant.NONE:
            return DqPhasor(i_ref.d, i_ref.q)
        if v is Variant.ANGLE:
            return limit_angle_priority(i_ref, i_max)
        if v is Variant.D:
            return limit_d_priority(i_ref, i_max)
        if v is Variant.Q:
            return limit_q_priority(i_ref, i_max)
        return limit_adaptive(i_ref, i_max, delta, self.phi(delta))


NONE = LimiterStrategy(Variant.NONE)
ANGLE = LimiterStrategy(Variant.ANGLE)
D_PRIORITY = LimiterStrategy(Variant.D)
Q_PRIORITY = LimiterStrategy(Variant.Q)
ADAPTIVE = LimiterStrategy(Variant.ADAPTIVE)
