"""Searcher/target encounter geometry in the searcher-relative frame.

Conventions: the searcher sits at the origin heading along +x.  ``alpha`` is
the target's absolute course measured from the searcher heading (0 means both
steam the same way), so the unalerted relative velocity is
``(U cos(alpha) - V, U sin(alpha))``.  Angles are radians; lengths and speeds
only need to be mutually consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, FastTargetError, InvalidScenario, RegimeError
from .numerics import integrate_mean

GUARD = 1e-12


@dataclass(frozen=True)
class Scenario:
    """The five engagement parameters.

    U: target speed, V: searcher speed, S: active detection range,
    r: counter-detection range with the sensor off, R: with the sensor on.
    """

    U: float
    V: float
    S: float
    r: float
    R: float

    def __post_init__(self):
        for name in ("U", "V", "S", "r", "R"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidScenario(name, f"expected a number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise InvalidScenario(name, f"must be a positive finite number, got {value!r}")
        if not self.S < self.R:
            raise InvalidScenario("S", f"must be less than R ({self.S} >= {self.R})")
        if not self.r < self.R:
            raise InvalidScenario("r", f"must be less than R ({self.r} >= {self.R})")
        if self.U == self.V:
            raise InvalidScenario("U", "target and searcher speeds must differ")

    @property
    def slow_target(self) -> bool:
        return self.U < self.V

    @property
    def speed_ratio(self) -> float:
        return self.U / self.V

    def scaled(self, length: float = 1.0, speed: float = 1.0) -> "Scenario":
        return Scenario(self.U * speed, self.V * speed, self.S * length,
                        self.r * length, self.R * length)

    def as_dict(self) -> dict:
        return {"U": self.U, "V": self.V, "S": self.S, "r": self.r, "R": self.R}


@dataclass(frozen=True)
class CourseGeometry:
    """Unalerted course ``alpha`` and closest-approach range ``d`` of the track."""

    alpha: float
    d: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= math.pi:
            raise DomainError(f"alpha={self.alpha} outside [0, pi]")
        if self.d < 0.0:
            raise DomainError(f"lateral range d={self.d} is negative")


def guarded_sqrt(value: float, scale: float = 1.0) -> float:
    """sqrt that forgives round-off below zero but not genuine negatives."""
    if value >= 0.0:
        return math.sqrt(value)
    if value >= -GUARD * scale * scale:
        return 0.0
    raise DomainError(f"square root of negative quantity {value:.6g}")


def _unit(value: float) -> float:
    if -1.0 <= value <= 1.0:
        return value
    if abs(value) <= 1.0 + GUARD:
        return math.copysign(1.0, value)
    raise DomainError(f"inverse trigonometric argument {value:.17g} outside [-1, 1]")


def guarded_asin(value: float) -> float:
    return math.asin(_unit(value))


def guarded_acos(value: float) -> float:
    return math.acos(_unit(value))


def _require_slow(scn: Scenario) -> None:
    if not scn.U < scn.V:
        raise FastTargetError(f"requires U < V (U={scn.U}, V={scn.V})")


def relative_speed(scn: Scenario, alpha: float) -> float:
    """Speed of the unalerted target relative to the searcher."""
    U, V = scn.U, scn.V
    return guarded_sqrt(U * U + V * V - 2.0 * U * V * math.cos(alpha), max(U, V))


def mean_relative_speed(scn: Scenario) -> float:
    """Relative speed averaged over a uniformly distributed course."""
    return integrate_mean(lambda a: relative_speed(scn, a))


def relative_course(scn: Scenario, alpha: float) -> float:
    """Relative approach course, asin(U sin(alpha) / W), in [0, pi/2]."""
    w = relative_speed(scn, alpha)
    if w == 0.0:
        return 0.0
    return guarded_asin(scn.U / w * math.sin(alpha))


def evasive_course(scn: Scenario) -> float:
    """Best evasive absolute course of a slow target, arccos(U/V)."""
    _require_slow(scn)
    return math.acos(scn.U / scn.V)


def evasive_relative_speed(scn: Scenario) -> float:
    _require_slow(scn)
    return math.sqrt(scn.V * scn.V - scn.U * scn.U)


def evasive_relative_course(scn: Scenario) -> float:
    """Relative course on the limiting lines of escape, asin(U/V)."""
    _require_slow(scn)
    return math.asin(scn.U / scn.V)


def max_width_range(scn: Scenario) -> float:
    """Largest alert range with a positive detection width, S V / U."""
    return scn.S * scn.V / scn.U


def instantaneous_width(scn: Scenario, x: float) -> float:
    """Detection width for a slow target alerted at range ``x >= S``."""
    _require_slow(scn)
    S, q = scn.S, scn.speed_ratio
    if x < S:
        if x < S * (1.0 - GUARD):
            raise DomainError(f"alert range x={x} inside the detection circle S={S}")
        x = S
    if x >= max_width_range(scn):
        return 0.0
    width = 2.0 * S * (math.sqrt(1.0 - q * q) - q * math.sqrt(max((x / S) ** 2 - 1.0, 0.0)))
    return max(width, 0.0)


def detection_condition(scn: Scenario) -> bool:
    """True when a target alerted at r can still be caught: U/V < S/r."""
    return scn.U / scn.V < scn.S / scn.r


def escape_tangent_time(scn: Scenario, radius: float) -> float:
    """Time along a limiting line from range ``radius`` to its tangent point on S."""
    _require_slow(scn)
    if radius < scn.S * (1.0 - GUARD):
        raise DomainError(f"radius={radius} below S={scn.S}")
    return guarded_sqrt(radius * radius - scn.S * scn.S, radius) / evasive_relative_speed(scn)


def ce_distance(scn: Scenario, alpha: float, outer: float | None = None) -> float:
    """Unalerted run from the outer circle to the alert point on circle r.

    The alert point is where the limiting line of escape tangent to S meets
    circle r on the side that shortens the run; ``outer`` defaults to R.
    """
    _require_slow(scn)
    if scn.r < scn.S:
        raise RegimeError("alert point geometry needs S <= r; use unalerted_chord for r < S")
    outer = scn.R if outer is None else outer
    r = scn.r
    theta = (math.acos(scn.S / r) + evasive_relative_course(scn)
             + relative_course(scn, alpha))
    c, s = math.cos(theta), math.sin(theta)
    return guarded_sqrt(outer * outer - r * r * c * c, outer) - r * s


def unalerted_chord(scn: Scenario, d: float) -> float:
    """Track length from circle R to circle r for lateral range ``d <= r``."""
    r, R = scn.r, scn.R
    if d < 0.0 or d > r * (1.0 + GUARD):
        raise DomainError(f"lateral range d={d} outside [0, r={r}]")
    phase = guarded_asin(d / r) - guarded_asin(d / R)
    return guarded_sqrt(r * r + R * R - 2.0 * r * R * math.cos(phase), R)


def alerted_run(scn: Scenario, alpha: float, d: float) -> float:
    """Distance a target alerted at circle r covers before leaving circle S."""
    _require_slow(scn)
    r, S = scn.r, scn.S
    if scn.S <= scn.r:
        raise RegimeError("alerted run inside S needs r < S")
    if d < 0.0 or d > r * (1.0 + GUARD):
        raise DomainError(f"lateral range d={d} outside [0, r={r}]")
    phi = evasive_relative_course(scn) + relative_course(scn, alpha) + guarded_asin(d / r)
    return r * math.cos(phi) + guarded_sqrt(S * S - (r * math.sin(phi)) ** 2, S)


def _require_fast(scn: Scenario) -> None:
    if not scn.V < scn.U:
        raise RegimeError(f"requires V < U (U={scn.U}, V={scn.V})")


def fast_evasive_course(scn: Scenario, alpha: float, d: float) -> float:
    """Relative course of a fast target fleeing radially from its alert point."""
    _require_fast(scn)
    if d < 0.0 or d > scn.r * (1.0 + GUARD):
        raise DomainError(f"lateral range d={d} outside [0, r={scn.r}]")
    return math.pi - relative_course(scn, alpha) - guarded_asin(d / scn.r)


def fast_evasive_relative_speed(scn: Scenario, alpha: float, d: float) -> float:
    """Relative speed along that radial course (law-of-cosines root)."""
    g = fast_evasive_course(scn, alpha, d)
    U, V = scn.U, scn.V
    return V * math.cos(g) + guarded_sqrt(U * U - (V * math.sin(g)) ** 2, U)
