"""Passive/active period planning for every engagement regime.

The active-period model works on a per-course width profile: zero while the
sensor is off, then the detection width of targets alerted at a range that
grows linearly from the first alert range to the outer range, then a constant
tail.  The total period maximizes the time-averaged width; by default it is
found from the straight line through the stationarity residual at the two
breakpoints, optionally refined to the exact root.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import asdict, dataclass, field

from . import kinematics as kin
from .errors import DegenerateError, DomainError, RegimeError
from .kinematics import Scenario
from .numerics import integrate_mean, minimize_2d, minimize_scalar, refine_root

PREFACTORS = ("print", "geometric")
INFINITE_GAIN = math.inf
# lower end of the lateral-range search; d = 0 is the radial limit
LATERAL_FLOOR = 1e-9


class Case(enum.Enum):
    ESCAPE = "EscapeCase"
    CLOSE_ALERT = "CloseAlertCase"
    FAST_TARGET = "FastTargetCase"
    ZERO_DETECTION = "ZeroDetection"


GOVERNING = {
    Case.ESCAPE: ("passive: alert run + tangent run", "active: stationary mean width"),
    Case.CLOSE_ALERT: ("passive: min(alerted run, grazing chord)", "active: stationary mean width from S"),
    Case.FAST_TARGET: ("passive: min(radial flight, grazing chord)", "active: shortest sector sweep"),
    Case.ZERO_DETECTION: (),
}


@dataclass(frozen=True)
class Regime:
    case: Case
    bounded_width: bool
    detection_condition: bool

    @property
    def governing(self) -> tuple[str, ...]:
        labels = GOVERNING[self.case]
        if self.bounded_width and self.case in (Case.ESCAPE, Case.CLOSE_ALERT):
            labels = labels + ("cutoff: opportunities stop at S*V/U",)
        return labels

    @property
    def has_width_profile(self) -> bool:
        return self.case in (Case.ESCAPE, Case.CLOSE_ALERT)


def classify(scn: Scenario) -> Regime:
    cond = kin.detection_condition(scn)
    bounded = kin.max_width_range(scn) <= scn.R
    if scn.U < scn.V:
        if scn.S <= scn.r:
            case = Case.ESCAPE if cond else Case.ZERO_DETECTION
        else:
            case = Case.CLOSE_ALERT
    else:
        case = Case.FAST_TARGET if scn.r < scn.S else Case.ZERO_DETECTION
    return Regime(case, bounded, cond)


def _require(scn, *cases):
    regime = classify(scn)
    if regime.case not in cases:
        names = ", ".join(c.value for c in cases)
        raise RegimeError(f"scenario is {regime.case.value}; operation needs {names}")
    return regime


@dataclass(frozen=True)
class AlphaPolicy:
    """How the unknown unalerted course is handled."""

    kind: str
    alpha: float | None = None

    KINDS = ("per-alpha", "mean", "min-alpha", "min-alpha-d")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.kind == "per-alpha":
            if self.alpha is None or not 0.0 <= self.alpha <= math.pi:
                raise DomainError(f"per-alpha policy needs 0 <= alpha <= pi, got {self.alpha}")

    @classmethod
    def per_alpha(cls, alpha: float) -> "AlphaPolicy":
        return cls("per-alpha", alpha)

    @classmethod
    def mean(cls) -> "AlphaPolicy":
        return cls("mean")

    @classmethod
    def min_alpha(cls) -> "AlphaPolicy":
        return cls("min-alpha")

    @classmethod
    def min_alpha_d(cls) -> "AlphaPolicy":
        return cls("min-alpha-d")


# -- passive periods -------------------------------------------------------

def passive_period_escape(scn: Scenario, alpha: float) -> float:
    _require(scn, Case.ESCAPE)
    return (kin.ce_distance(scn, alpha) / kin.relative_speed(scn, alpha)
            + kin.escape_tangent_time(scn, scn.r))


def _grazing_time(scn, alpha):
    return math.sqrt(scn.R ** 2 - scn.S ** 2) / kin.relative_speed(scn, alpha)


def _alerted_time_close(scn, alpha, d):
    return (kin.unalerted_chord(scn, d) / kin.relative_speed(scn, alpha)
            + kin.alerted_run(scn, alpha, d) / kin.evasive_relative_speed(scn))


def _alerted_time_fast(scn, alpha, d):
    return (kin.unalerted_chord(scn, d) / kin.relative_speed(scn, alpha)
            + (scn.S - scn.r) / kin.fast_evasive_relative_speed(scn, alpha, d))


def _lateral_box(scn):
    return LATERAL_FLOOR * scn.r, scn.r


@functools.lru_cache(maxsize=65536)
def _min_alerted(scn, alpha, fast):
    branch = _alerted_time_fast if fast else _alerted_time_close
    lo, hi = _lateral_box(scn)
    return minimize_scalar(lambda d: branch(scn, alpha, d), lo, hi)


def _passive_two_branch(scn, alpha, d, fast):
    t2 = _grazing_time(scn, alpha)
    if d is not None:
        branch = _alerted_time_fast if fast else _alerted_time_close
        return min(t2, branch(scn, alpha, d))
    return min(t2, _min_alerted(scn, alpha, fast)[1])


def passive_period_close_alert(scn: Scenario, alpha: float, d: float | None = None) -> float:
    """Shortest passive period for ``r < S``, U < V (over ``d`` when not given)."""
    _require(scn, Case.CLOSE_ALERT)
    return _passive_two_branch(scn, alpha, d, fast=False)


def passive_period_fast(scn: Scenario, alpha: float, d: float | None = None) -> float:
    """Shortest passive period for a target faster than the searcher."""
    _require(scn, Case.FAST_TARGET)
    return _passive_two_branch(scn, alpha, d, fast=True)


def passive_period(scn: Scenario, alpha: float) -> float:
    """Passive period for course ``alpha`` under whatever regime applies."""
    case = classify(scn).case
    if case is Case.ESCAPE:
        return passive_period_escape(scn, alpha)
    if case is Case.CLOSE_ALERT:
        return passive_period_close_alert(scn, alpha)
    if case is Case.FAST_TARGET:
        return passive_period_fast(scn, alpha)
    raise RegimeError("no passive period: zero probability of detection")


def absolute_min_passive(scn: Scenario) -> tuple[float, float, float]:
    """Global minimum of the two-branch passive period over course and lateral range.

    Returns ``(alpha, d, tp)``.
    """
    regime = _require(scn, Case.CLOSE_ALERT, Case.FAST_TARGET)
    fast = regime.case is Case.FAST_TARGET
    lo, hi = _lateral_box(scn)
    (alpha, d), tp = minimize_2d(lambda a, dd: _passive_two_branch(scn, a, dd, fast),
                                 ((0.0, math.pi), (lo, hi)))
    return alpha, d, tp


def active_period_fast(scn: Scenario, alpha: float | None = None, d: float | None = None) -> float:
    """Sector-sweep active period for a fast target, minimized over free arguments."""
    _require(scn, Case.FAST_TARGET)
    return _fast_active(scn, alpha, d)[2]


def _fast_active(scn, alpha, d):
    sweep = scn.S - scn.r

    def ta(a, dd):
        return sweep / kin.fast_evasive_relative_speed(scn, a, dd)

    lo, hi = _lateral_box(scn)
    if alpha is not None and d is not None:
        return alpha, d, ta(alpha, d)
    if alpha is not None:
        dd, v = minimize_scalar(lambda x: ta(alpha, x), lo, hi)
        return alpha, dd, v
    if d is not None:
        a, v = minimize_scalar(lambda x: ta(x, d), 0.0, math.pi)
        return a, d, v
    (a, dd), v = minimize_2d(ta, ((0.0, math.pi), (lo, hi)))
    return a, dd, v


# -- active period ---------------------------------------------------------

def alert_horizon(scn: Scenario, alpha: float, tp: float) -> float:
    """End of the transient in which alerted opportunities are still inside S."""
    case = _require(scn, Case.ESCAPE, Case.CLOSE_ALERT).case
    return tp + _transient(scn, case)


def _transient(scn, case):
    if case is Case.ESCAPE:
        alpha_e = kin.evasive_course(scn)
        return kin.ce_distance(scn, alpha_e) / kin.evasive_relative_speed(scn)
    return kin.escape_tangent_time(scn, scn.R)


def area_antiderivative(scn: Scenario, x: float) -> float:
    """Antiderivative of half the instantaneous width with respect to range."""
    kin._require_slow(scn)
    S, q = scn.S, scn.speed_ratio
    if x < S * (1.0 - kin.GUARD):
        raise DomainError(f"x={x} below S={S}")
    root = kin.guarded_sqrt(x * x - S * S, x)
    return S * math.sqrt(1.0 - q * q) * x - q * 0.5 * (x * root - S * S * math.log(x + root))


@dataclass(frozen=True)
class WidthProfile:
    """Width and accumulated area versus time for one course."""

    scn: Scenario
    tp: float
    tr: float
    x_start: float
    x_end: float
    prefactor: str = "print"

    def __post_init__(self):
        if self.prefactor not in PREFACTORS:
            raise ValueError(f"prefactor must be one of {PREFACTORS}")

    @property
    def tail_width(self) -> float:
        return kin.instantaneous_width(self.scn, self.x_end)

    @property
    def _scale_length(self):
        if self.prefactor == "print":
            return self.x_end - self.scn.r
        return self.x_end - self.x_start

    def range_at(self, t: float) -> float:
        span = self.tr - self.tp
        if t < self.tp - 1e-12 * span or t > self.tr + 1e-12 * span:
            raise DomainError(f"t={t} outside the transient [{self.tp}, {self.tr}]")
        f = min(max((t - self.tp) / span, 0.0), 1.0)
        return (1.0 - f) * self.x_start + f * self.x_end

    def width_at(self, t: float) -> float:
        if t < self.tp:
            return 0.0
        if t < self.tr:
            return kin.instantaneous_width(self.scn, self.range_at(t))
        return self.tail_width

    def _transient_area(self, x):
        factor = 2.0 * (self.tr - self.tp) / self._scale_length
        return factor * (area_antiderivative(self.scn, x) - area_antiderivative(self.scn, self.x_start))

    def area_at(self, t: float) -> float:
        if t <= self.tp:
            return 0.0
        if t < self.tr:
            return self._transient_area(self.range_at(t))
        return self._transient_area(self.x_end) + self.tail_width * (t - self.tr)

    def residual(self, t: float) -> float:
        """Stationarity residual t*D - A; its root maximizes A/t."""
        return t * self.width_at(t) - self.area_at(t)

    def rho(self) -> float:
        y0, y1 = self.residual(self.tp), self.residual(self.tr)
        if y1 == y0:
            raise DegenerateError("residual identical at both breakpoints")
        return -y0 / (y1 - y0)

    def surrogate(self, t: float) -> float:
        """Straight line through the residual at the two breakpoints."""
        y0, y1 = self.residual(self.tp), self.residual(self.tr)
        return y0 + (y1 - y0) / (self.tr - self.tp) * (t - self.tp)

    def total_period(self, exact: bool = False) -> float:
        rho = self.rho()
        linear = self.tp + rho * (self.tr - self.tp)
        if not exact or not 0.0 < rho < 1.0:
            return linear
        return refine_root(self.residual, self.tp, self.tr, xtol=1e-13)

    def avg_width(self, t: float) -> float:
        return self.area_at(t) / t if t > 0 else 0.0


def profile_from_passive(scn: Scenario, tp: float, prefactor: str = "print") -> WidthProfile:
    case = _require(scn, Case.ESCAPE, Case.CLOSE_ALERT).case
    x_start = scn.r if case is Case.ESCAPE else scn.S
    x_end = min(scn.R, kin.max_width_range(scn))
    return WidthProfile(scn, tp, tp + _transient(scn, case), x_start, x_end, prefactor)


def profile(scn: Scenario, alpha: float, prefactor: str = "print") -> WidthProfile:
    return profile_from_passive(scn, passive_period(scn, alpha), prefactor)


def range_at_time(scn: Scenario, alpha: float, t: float) -> float:
    return profile(scn, alpha).range_at(t)


def width_at_time(scn: Scenario, alpha: float, t: float) -> float:
    return profile(scn, alpha).width_at(t)


def accumulated_area(scn: Scenario, alpha: float, t: float, prefactor: str = "print") -> float:
    return profile(scn, alpha, prefactor).area_at(t)


def stationarity_residual(scn: Scenario, alpha: float, t: float, prefactor: str = "print") -> float:
    prof = profile(scn, alpha, prefactor)
    span = prof.tr - prof.tp
    if t < prof.tp - 1e-12 * span or t > prof.tr + 1e-12 * span:
        raise DomainError(f"t={t} outside [{prof.tp}, {prof.tr}]")
    return prof.residual(t)


def interpolation_ratio(scn: Scenario, alpha: float, prefactor: str = "print") -> float:
    return profile(scn, alpha, prefactor).rho()


def total_period(scn: Scenario, alpha: float, exact: bool = False,
                 prefactor: str = "print") -> tuple[float, float]:
    """Total period and active period ``(T, Ta)`` for course ``alpha``."""
    prof = profile(scn, alpha, prefactor)
    t = prof.total_period(exact)
    return t, t - prof.tp


def max_avg_width(scn: Scenario, alpha: float, exact: bool = False,
                  prefactor: str = "print") -> float:
    prof = profile(scn, alpha, prefactor)
    return prof.avg_width(prof.total_period(exact))


def gain(scn: Scenario, mean_width: float) -> float:
    """Relative improvement over continuous pinging; INFINITE_GAIN when that is blind."""
    continuous = kin.instantaneous_width(scn, scn.R)
    if continuous > 0.0:
        return mean_width / continuous - 1.0
    return INFINITE_GAIN


def area_rate(scn: Scenario, exact: bool = False, prefactor: str = "print") -> tuple[float, float]:
    """Mean swept area per unit time: exact course average and meanW * meanD."""
    _require(scn, Case.ESCAPE, Case.CLOSE_ALERT)
    stats = _course_stats(scn, exact, prefactor)
    integral = integrate_mean(lambda a: kin.relative_speed(scn, a) * stats(a)[3])
    mean_d = integrate_mean(lambda a: stats(a)[3])
    return integral, kin.mean_relative_speed(scn) * mean_d


def active_cutoff(scn: Scenario, alpha: float, course: str = "evasive") -> float | None:
    """Time after activation beyond which no new opportunity can emerge.

    Only exists when S*V/U <= R.  ``course`` selects whether the relative
    course entering the geometry is that of the evasive course (default) or of
    the unalerted course ``alpha``.
    """
    _require(scn, Case.ESCAPE)
    reach = kin.max_width_range(scn)
    if reach > scn.R:
        return None
    if course == "evasive":
        a = kin.evasive_course(scn)
    elif course == "unalerted":
        a = alpha
    else:
        raise ValueError("course must be 'evasive' or 'unalerted'")
    return kin.ce_distance(scn, a, outer=reach) / kin.evasive_relative_speed(scn)


def _course_stats(scn, exact, prefactor):
    """Memoized per-course (tp, tr, T, A(T)/T, rho)."""

    @functools.lru_cache(maxsize=None)
    def stats(alpha):
        prof = profile(scn, alpha, prefactor)
        t = prof.total_period(exact)
        rho = (t - prof.tp) / (prof.tr - prof.tp) if exact else prof.rho()
        return prof.tp, prof.tr, t, prof.avg_width(t), rho

    return stats


# -- plans -----------------------------------------------------------------

@dataclass
class SchedulePlan:
    regime: Regime
    policy: AlphaPolicy
    tp: float | None = None
    ta: float | None = None
    total: float | None = None
    tr: float | None = None
    rho: float | None = None
    max_avg_width: float | None = None
    gain: float | None = None
    cutoff: float | None = None
    alpha: float | None = None
    d: float | None = None
    continuous_preferred: bool = False
    moe1_guaranteed: bool = True
    area_rate: float | None = None
    area_rate_product: float | None = None
    exact: bool = False
    prefactor: str = "print"
    notes: list[str] = field(default_factory=list)

    @property
    def detection_possible(self) -> bool:
        return self.regime.case is not Case.ZERO_DETECTION

    @property
    def period(self) -> float | None:
        return self.total

    def as_dict(self) -> dict:
        out = asdict(self)
        out["regime"] = {"case": self.regime.case.value,
                         "bounded_width": self.regime.bounded_width,
                         "detection_condition": self.regime.detection_condition}
        out["policy"] = {"kind": self.policy.kind, "alpha": self.policy.alpha}
        return out


def build_plan(scn: Scenario, policy: AlphaPolicy, exact: bool = False,
               prefactor: str = "print") -> SchedulePlan:
    regime = classify(scn)
    plan = SchedulePlan(regime, policy, exact=exact, prefactor=prefactor)
    if regime.case is Case.ZERO_DETECTION:
        plan.moe1_guaranteed = False
        plan.notes.append("zero probability of detection: the target always evades")
        return plan
    if regime.case is Case.FAST_TARGET:
        _fill_fast(scn, plan)
    else:
        _fill_width_plan(scn, plan)
    if policy.kind == "mean":
        plan.moe1_guaranteed = False
        plan.notes.append("course-averaged passive period does not guarantee zero missed opportunities")
    if plan.continuous_preferred:
        plan.notes.append("no interior maximum of the average width: continuous pinging preferred")
    return plan


def _fill_width_plan(scn, plan):
    policy = plan.policy
    stats = _course_stats(scn, plan.exact, plan.prefactor)
    escape = plan.regime.case is Case.ESCAPE
    if policy.kind == "mean":
        tp = integrate_mean(lambda a: stats(a)[0])
        total = integrate_mean(lambda a: stats(a)[2])
        mean_d = integrate_mean(lambda a: stats(a)[3])
        plan.tp, plan.total = tp, total
        plan.tr = tp + _transient(scn, plan.regime.case)
        plan.ta = total - tp
        plan.rho = integrate_mean(lambda a: stats(a)[4])
        plan.max_avg_width = mean_d
        plan.gain = gain(scn, mean_d)
        plan.area_rate = integrate_mean(lambda a: kin.relative_speed(scn, a) * stats(a)[3])
        plan.area_rate_product = kin.mean_relative_speed(scn) * mean_d
        if escape and plan.regime.bounded_width:
            plan.cutoff = active_cutoff(scn, 0.0)
    else:
        if policy.kind == "per-alpha":
            alpha, tp = policy.alpha, stats(policy.alpha)[0]
        elif policy.kind == "min-alpha" or escape:
            alpha, tp = minimize_scalar(lambda a: stats(a)[0], 0.0, math.pi)
        else:
            alpha, d, tp = absolute_min_passive(scn)
            plan.d = d
        prof = profile_from_passive(scn, tp, plan.prefactor)
        total = prof.total_period(plan.exact)
        plan.alpha, plan.tp, plan.tr, plan.total = alpha, tp, prof.tr, total
        plan.ta = total - tp
        plan.rho = (total - tp) / (prof.tr - tp) if plan.exact else prof.rho()
        plan.max_avg_width = prof.avg_width(total)
        plan.gain = gain(scn, plan.max_avg_width)
        if escape and plan.regime.bounded_width:
            plan.cutoff = active_cutoff(scn, alpha)
    interior = (plan.tp < plan.total < plan.tr) if plan.exact else (0.0 < plan.rho < 1.0)
    plan.continuous_preferred = not interior


def _fill_fast(scn, plan):
    policy = plan.policy
    if policy.kind == "per-alpha":
        plan.alpha = policy.alpha
        plan.tp = passive_period_fast(scn, policy.alpha)
        plan.ta = _fast_active(scn, policy.alpha, None)[2]
    elif policy.kind == "mean":
        plan.tp = integrate_mean(lambda a: passive_period_fast(scn, a))
        plan.ta = integrate_mean(lambda a: _fast_active(scn, a, None)[2])
    elif policy.kind == "min-alpha":
        plan.alpha, plan.tp = minimize_scalar(lambda a: passive_period_fast(scn, a), 0.0, math.pi)
        plan.ta = _fast_active(scn, plan.alpha, None)[2]
    else:
        plan.alpha, plan.d, plan.tp = absolute_min_passive(scn)
        plan.ta = _fast_active(scn, None, None)[2]
    plan.total = plan.tp + plan.ta


# -- curves ----------------------------------------------------------------

@dataclass(frozen=True)
class WidthCurve:
    alpha: float
    tp: float
    tr: float
    samples: tuple[tuple[float, float, float, float], ...]

    @property
    def breakpoints(self) -> tuple[float, float, float]:
        return 0.0, self.tp, self.tr

    segments = (("zero", "off"), ("transient", "width of targets alerted at growing range"),
                ("tail", "constant continuous width"))


def build_curve(scn: Scenario, alpha: float, resolution: int = 200, prefactor: str = "print",
                t_end: float | None = None) -> WidthCurve:
    """Sample (t, D, A, A/t) on a uniform grid merged with the breakpoints.

    The grid has ``resolution`` points on ``[0, t_end]`` (default ``TR``) and
    the breakpoints ``0, Tp, TR`` are always present; exact duplicates are
    dropped, so ``resolution=2`` with the default end yields the breakpoints
    alone.  The rows at ``Tp`` and ``TR`` carry right-hand values.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    prof = profile(scn, alpha, prefactor)
    end = prof.tr if t_end is None else t_end
    grid = [end * k / (resolution - 1) for k in range(resolution)]
    times = sorted(set(grid) | {0.0, prof.tp, prof.tr})
    rows = tuple((t, prof.width_at(t), prof.area_at(t), prof.avg_width(t)) for t in times)
    return WidthCurve(alpha, prof.tp, prof.tr, rows)


def sweep(scn: Scenario, grid: int = 180, exact: bool = False, prefactor: str = "print") -> list[dict]:
    """Per-course plan on ``grid + 1`` evenly spaced courses over ``[0, pi]``."""
    if grid < 1:
        raise ValueError("grid must be >= 1")
    rows = []
    for k in range(grid + 1):
        alpha = math.pi * k / grid
        plan = build_plan(scn, AlphaPolicy.per_alpha(alpha), exact, prefactor)
        rows.append({"alpha": alpha, "Tp": plan.tp, "T": plan.total, "rho": plan.rho,
                     "A_over_T": plan.max_avg_width,
                     "continuous_preferred": plan.continuous_preferred})
    return rows
