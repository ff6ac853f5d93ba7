"""Geometric and Monte Carlo validation of the planner.

Everything here is computed from first principles in the searcher-relative
frame: straight unalerted tracks, a single course change at alert, and a
cookie-cutter sensor.  No closed-form width or period from the planner is
used; schedules enter only as sensor on/off timings.

Two track engines are provided.  ``trace_track`` is event driven and solves
every circle crossing in closed form; ``simulate_track`` marches in fixed time
steps and locates events by bisection.  They are independent implementations
of the same semantics and are cross-checked by the test-suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import planner
from .errors import DomainError, RegimeError, StepSizeError
from .kinematics import Scenario
from .numerics import golden_section
from .planner import AlphaPolicy, Case

EVENT_TOL = 1e-9


class Verdict(enum.Enum):
    DETECTED = "Detected"
    ESCAPED = "Escaped"
    MISSED = "MissedOpportunity"


@dataclass(frozen=True)
class TrackSpec:
    """Unalerted straight track entering the engagement.

    ``d`` is the signed closest-approach range of the unalerted track;
    ``start_phase`` is the position within the sensor cycle at spawn.
    """

    alpha: float
    d: float
    start_range: float
    start_phase: float = 0.0

    def __post_init__(self):
        if not abs(self.d) < self.start_range:
            raise DomainError("|d| must be below the start range")


@dataclass(frozen=True)
class DetectionOutcome:
    verdict: Verdict
    t_alert: float | None
    t_detect: float | None
    min_range: float
    t_loss: float | None = None

    @property
    def detected(self) -> bool:
        return self.verdict is Verdict.DETECTED


@dataclass(frozen=True)
class Cycle:
    """Periodic sensor schedule: off for ``tp``, on until ``total``, repeat.

    ``tp == 0`` means continuous pinging.  ``tr`` (end of the alert-range
    transient) is only needed by the width-sampling estimators.
    """

    tp: float
    total: float
    tr: float | None = None

    def __post_init__(self):
        if self.tp < 0 or (self.tp > 0 and not self.total > self.tp):
            raise DomainError(f"invalid cycle tp={self.tp}, total={self.total}")

    @classmethod
    def continuous(cls) -> "Cycle":
        return cls(0.0, math.inf, 0.0)

    @classmethod
    def from_plan(cls, plan) -> "Cycle":
        if plan.tp is None:
            return cls.continuous()
        return cls(plan.tp, plan.total, plan.tr)

    @property
    def is_continuous(self) -> bool:
        return self.tp == 0.0

    def sensor_on(self, t: float, phase: float = 0.0) -> bool:
        if self.is_continuous:
            return True
        return math.fmod(t + phase, self.total) >= self.tp

    def next_switch(self, t: float, phase: float = 0.0) -> float:
        """First switching instant strictly after ``t``."""
        if self.is_continuous:
            return math.inf
        u = t + phase
        k = math.floor(u / self.total)
        local = u - k * self.total
        nxt = self.tp if local < self.tp else self.total
        out = k * self.total + nxt - phase
        if out <= t:  # rounding at a boundary
            out = (k + 1) * self.total + (self.tp if nxt == self.total else self.total) - phase
        return out


Schedule = Union[Cycle, Callable[[float], Cycle]]


def plan_schedule(scn: Scenario, exact: bool = False, prefactor: str = "print") -> Callable[[float], Cycle]:
    """Per-course schedule of the planner: alpha -> Cycle(Tp, T, TR)."""
    cache = {}

    def cycle(alpha):
        key = float(alpha)
        if key not in cache:
            plan = planner.build_plan(scn, AlphaPolicy.per_alpha(key), exact, prefactor)
            cache[key] = Cycle.from_plan(plan)
        return cache[key]

    return cycle


def _cycle_for(schedule, alpha):
    if isinstance(schedule, Cycle):
        return schedule
    if hasattr(schedule, "regime") and hasattr(schedule, "tp"):
        return Cycle.from_plan(schedule)
    return schedule(alpha)


# -- motion primitives -----------------------------------------------------

def unalerted_velocity(scn: Scenario, alpha):
    alpha = np.asarray(alpha, dtype=float)
    return np.stack([scn.U * np.cos(alpha) - scn.V, scn.U * np.sin(alpha)], axis=-1)


def start_position(scn, alpha, d, start_range):
    """Point at ``start_range`` on the inbound leg of the track (alpha, d)."""
    v = unalerted_velocity(scn, alpha)
    u = v / np.linalg.norm(v, axis=-1, keepdims=True)
    n = np.stack([-u[..., 1], u[..., 0]], axis=-1)
    d = np.asarray(d, dtype=float)[..., None]
    back = np.sqrt(start_range ** 2 - d ** 2)
    return d * n - back * u


def _ray_min_range(p, u):
    """Closest approach of the ray p + s u, s >= 0 (u unit)."""
    along = np.sum(p * u, axis=-1)
    cross = np.abs(p[..., 0] * u[..., 1] - p[..., 1] * u[..., 0])
    return np.where(along >= 0.0, np.linalg.norm(p, axis=-1), cross)


def evasive_velocity(scn: Scenario, p):
    """Relative velocity adopted by a target alerted at position ``p``.

    A slower target takes the better of the two limiting-line courses (the one
    whose ray stays farthest from the searcher); a faster target flees
    radially at its best relative speed.
    """
    p = np.asarray(p, dtype=float)
    U, V = scn.U, scn.V
    if U < V:
        q = U / V
        c, s = math.sqrt(1.0 - q * q), q
        up = np.broadcast_to(np.array([-c, s]), p.shape)
        dn = np.broadcast_to(np.array([-c, -s]), p.shape)
        pick_up = _ray_min_range(p, up) >= _ray_min_range(p, dn)
        u = np.where(pick_up[..., None], up, dn)
        return u * math.sqrt(V * V - U * U)
    rng = np.linalg.norm(p, axis=-1, keepdims=True)
    e = p / rng
    w = -V * e[..., :1] + np.sqrt(U * U - V * V * (1.0 - e[..., :1] ** 2))
    return e * w


def _entry(p, u, radius):
    """Distance along unit ray to the first crossing into the circle (nan if none)."""
    b = np.sum(p * u, axis=-1)
    c = np.sum(p * p, axis=-1) - radius * radius
    disc = b * b - c
    root = np.sqrt(np.where(disc >= 0, disc, np.nan))
    s = -b - root
    return np.where((disc > 0) & (s >= 0), s, np.nan)


def _exit(p, u, radius):
    """Distance along unit ray to leaving the circle (p inside or entering)."""
    b = np.sum(p * u, axis=-1)
    c = np.sum(p * p, axis=-1) - radius * radius
    disc = b * b - c
    return np.where(disc > 0, -b + np.sqrt(np.where(disc > 0, disc, 0.0)), np.nan)


# -- event-driven exact tracer --------------------------------------------

def _first_hit(p, v, radius, t0, t1):
    """First time in [t0, t1] at which |p + v (t - t0)| <= radius, else None."""
    if p @ p <= radius * radius:
        return t0
    vv = v @ v
    if vv == 0.0:
        return None
    b = p @ v
    c = p @ p - radius * radius
    disc = b * b - vv * c
    if disc < 0.0:
        return None
    tau = (-b - math.sqrt(disc)) / vv
    if tau < 0.0 or t0 + tau > t1:
        return None
    return t0 + tau


def _done(p, v, rng, alerted, scn):
    outward = p @ v >= 0.0
    return outward and (rng > scn.R or (alerted and rng > scn.S))


def trace_track(scn: Scenario, schedule, track: TrackSpec, t_max: float | None = None) -> DetectionOutcome:
    """Closed-form event tracing of one track under a periodic schedule."""
    cycle = _cycle_for(schedule, track.alpha)
    phase = track.start_phase
    p = start_position(scn, track.alpha, track.d, track.start_range)
    v = unalerted_velocity(scn, track.alpha)
    alerted = False
    t = 0.0
    t_alert = t_detect = t_loss = None
    inside_off = False
    min_range = float(np.linalg.norm(p))
    horizon = t_max if t_max is not None else _horizon(scn, track)
    while t < horizon:
        on = cycle.sensor_on(t, phase)
        t_end = min(cycle.next_switch(t, phase), horizon)
        # detection has priority over alert at the same instant
        hit_s = _first_hit(p, v, scn.S, t, t_end) if on else None
        hit_a = None
        if not alerted:
            hit_a = _first_hit(p, v, scn.R if on else scn.r, t, t_end)
        if hit_s is not None and (hit_a is None or hit_s <= hit_a):
            min_range = min(min_range, scn.S)
            return DetectionOutcome(Verdict.DETECTED, t_alert if t_alert is not None else hit_s,
                                    hit_s, min_range, t_loss)
        stop = t_end if hit_a is None else hit_a
        seg_min, ent, ext = _segment_stats(p, v, stop - t, scn.S)
        min_range = min(min_range, seg_min)
        if not on and ent is not None:
            inside_off = True
            if ext is not None:
                t_loss = t + ext
        p = p + v * (stop - t)
        t = stop
        if hit_a is not None:
            alerted, t_alert = True, hit_a
            v = evasive_velocity(scn, p)
            continue
        if _done(p, v, float(np.linalg.norm(p)), alerted, scn):
            break
    verdict = Verdict.MISSED if inside_off else Verdict.ESCAPED
    return DetectionOutcome(verdict, t_alert, t_detect, min_range, t_loss)


def _segment_stats(p, v, dt, radius):
    """Min range over the segment and relative entry/exit times of the circle."""
    vv = v @ v
    if vv == 0.0 or dt <= 0.0:
        return float(np.linalg.norm(p)), None, None
    tau = min(max(-(p @ v) / vv, 0.0), dt)
    seg_min = float(np.linalg.norm(p + v * tau))
    if seg_min >= radius:
        return seg_min, None, None
    b, c = p @ v, p @ p - radius * radius
    root = math.sqrt(max(b * b - vv * c, 0.0))
    t_in, t_out = (-b - root) / vv, (-b + root) / vv
    ext = t_out if t_out <= dt else None
    return seg_min, max(t_in, 0.0), ext


def _horizon(scn, track):
    slow = min(abs(scn.V - scn.U), math.sqrt(abs(scn.V ** 2 - scn.U ** 2)))
    return 4.0 * (track.start_range + scn.R) / slow


# -- time-stepping simulator ------------------------------------------------

def max_step(scn: Scenario) -> float:
    """Largest admissible simulation step."""
    return 1e-3 * min(scn.S, scn.r) / (scn.U + scn.V)


def simulate_track(scn: Scenario, schedule, track: TrackSpec, dt: float | None = None) -> DetectionOutcome:
    """March one track in steps of ``dt`` and resolve events by bisection.

    Steps are split at sensor switching instants; within a sub-step the
    motion is straight so the closest point of the segment tells whether a
    range threshold is crossed, and the crossing is then bisected to
    ``EVENT_TOL``.
    """
    limit = max_step(scn)
    if dt is None:
        dt = limit
    if not 0.0 < dt <= limit * (1.0 + 1e-12):
        raise StepSizeError(f"dt={dt} exceeds the admissible step {limit:.3g}")
    cycle = _cycle_for(schedule, track.alpha)
    phase = track.start_phase
    p = start_position(scn, track.alpha, track.d, track.start_range)
    v = unalerted_velocity(scn, track.alpha)
    px, py = float(p[0]), float(p[1])
    vx, vy = float(v[0]), float(v[1])
    alerted = False
    t = 0.0
    t_alert = t_loss = None
    inside_off = False
    min_range = math.hypot(px, py)
    horizon = _horizon(scn, track)
    switch = cycle.next_switch(0.0, phase)
    on = cycle.sensor_on(0.0, phase)
    S, R, r = scn.S, scn.R, scn.r
    while t < horizon:
        t1 = min(t + dt, switch)
        h = t1 - t
        qx, qy = px + vx * h, py + vy * h
        vv = vx * vx + vy * vy
        tau = min(max(-(px * vx + py * vy) / vv, 0.0), h) if vv > 0 else 0.0
        closest = math.hypot(px + vx * tau, py + vy * tau)
        hit_s = on and closest <= S
        thresh = R if on else r
        hit_a = not alerted and closest <= thresh
        if hit_s or hit_a:
            ts = _bisect_crossing(px, py, vx, vy, tau, S) if hit_s else math.inf
            ta = _bisect_crossing(px, py, vx, vy, tau, thresh) if hit_a else math.inf
            if hit_s and ts <= ta:
                return DetectionOutcome(Verdict.DETECTED, t_alert if t_alert is not None else t + ts,
                                        t + ts, min(min_range, S), t_loss)
            # alert: advance to the alert point and change course
            px, py = px + vx * ta, py + vy * ta
            t = t + ta
            alerted, t_alert = True, t
            e = evasive_velocity(scn, np.array([px, py]))
            vx, vy = float(e[0]), float(e[1])
            min_range = min(min_range, math.hypot(px, py))
            continue
        if not on and closest < S:
            inside_off = True
            r0, r1 = math.hypot(px, py), math.hypot(qx, qy)
            if r0 < S <= r1:
                t_loss = t + _bisect_exit(px, py, vx, vy, h, S)
        min_range = min(min_range, closest)
        px, py, t = qx, qy, t1
        if t >= switch:
            on = not on
            switch = cycle.next_switch(t, phase)
        if (px * vx + py * vy) >= 0 and (math.hypot(px, py) > R or (alerted and math.hypot(px, py) > S)):
            break
    verdict = Verdict.MISSED if inside_off else Verdict.ESCAPED
    return DetectionOutcome(verdict, t_alert, None, min_range, t_loss)


def _bisect_crossing(px, py, vx, vy, tau, radius):
    """First s in [0, tau] with range <= radius; range is decreasing there."""
    if math.hypot(px, py) <= radius:
        return 0.0
    lo, hi = 0.0, tau
    while hi - lo > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        if math.hypot(px + vx * mid, py + vy * mid) <= radius:
            hi = mid
        else:
            lo = mid
    return hi


def _bisect_exit(px, py, vx, vy, h, radius):
    lo, hi = 0.0, h
    while hi - lo > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        if math.hypot(px + vx * mid, py + vy * mid) < radius:
            lo = mid
        else:
            hi = mid
    return hi


# -- widths ----------------------------------------------------------------

def _detected_at_range(scn, x, y):
    """Detection of targets alerted at range x, lateral offset y, sensor on."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.stack(np.broadcast_arrays(np.sqrt(np.maximum(x * x - y * y, 0.0)), y), axis=-1)
    e = evasive_velocity(scn, p)
    u = e / np.linalg.norm(e, axis=-1, keepdims=True)
    return _ray_min_range(p, u) <= scn.S


def measured_width_at_range(scn: Scenario, x: float, rel_tol: float = 1e-6) -> float:
    """Measure of lateral offsets, alerted at range ``x``, that end detected.

    The detected set is symmetric and starts at zero offset; its edge is
    found by bisection to ``rel_tol * S``.
    """
    if not scn.U < scn.V:
        raise RegimeError("widths are defined for targets slower than the searcher")
    if x < scn.S:
        raise DomainError(f"alert range {x} inside S")
    top = min(x, scn.S)
    if not bool(_detected_at_range(scn, x, 0.0)):
        return 0.0
    if bool(_detected_at_range(scn, x, top)):
        return 2.0 * top
    lo, hi = 0.0, top
    while hi - lo > rel_tol * scn.S:
        mid = 0.5 * (lo + hi)
        if bool(_detected_at_range(scn, x, mid)):
            lo = mid
        else:
            hi = mid
    return lo + hi


def _alert_range(scn, cycle, t):
    """Alert range of the opportunities that are live at time t of the cycle."""
    x_start = scn.r if scn.S <= scn.r else scn.S
    x_end = min(scn.R, scn.S * scn.V / scn.U)
    t = np.asarray(t, dtype=float)
    if cycle.is_continuous:
        return np.full(t.shape, scn.R)
    f = np.clip((t - cycle.tp) / (cycle.tr - cycle.tp), 0.0, 1.0)
    x = (1.0 - f) * x_start + f * x_end
    return np.where(t >= cycle.tr, scn.R, x)


def measured_width(scn: Scenario, schedule, t_eval: float, alpha: float = 0.0) -> float:
    """Empirical detection width at time ``t_eval`` of the cycle for course ``alpha``."""
    regime = planner.classify(scn)
    if regime.case is Case.ZERO_DETECTION:
        raise RegimeError("no detection possible")
    cycle = _cycle_for(schedule, alpha)
    if not cycle.is_continuous and t_eval < cycle.tp:
        return 0.0
    return measured_width_at_range(scn, float(_alert_range(scn, cycle, t_eval)))


# -- opportunity loss -------------------------------------------------------

def _loss_times(scn, alpha, d):
    """Time at which a sensor-off track spawned on R at t=0 leaves S (inf if never inside)."""
    alpha, d = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(d, float))
    S, r, R = scn.S, scn.r, scn.R
    v = unalerted_velocity(scn, alpha)
    w = np.linalg.norm(v, axis=-1)
    u = v / w[..., None]
    n = np.stack([-u[..., 1], u[..., 0]], axis=-1)
    ad = np.abs(d)
    inbound = np.sqrt(np.maximum(R * R - d * d, 0.0))
    out = np.full(d.shape, np.inf)
    alerted = ad < r
    # tracks that never reach r but cut through S (only possible when r < S)
    cut = (~alerted) & (ad < S)
    out = np.where(cut, (inbound + np.sqrt(np.maximum(S * S - d * d, 0.0))) / w, out)
    depth = np.sqrt(np.maximum(r * r - d * d, 0.0))
    t_a = (inbound - depth) / w
    p_a = d[..., None] * n - depth[..., None] * u
    e = evasive_velocity(scn, p_a)
    we = np.linalg.norm(e, axis=-1)
    ue = e / we[..., None]
    if r < S:
        s = _exit(p_a, ue, S)
    else:
        s = np.where(np.isnan(_entry(p_a, ue, S)), np.nan, _exit(p_a, ue, S))
    lost = t_a + s / we
    out = np.where(alerted & ~np.isnan(lost), lost, out)
    return out


def _min_over_lateral(scn, alpha, n=1201):
    """Infimum over signed d of the loss time at course alpha -> (t, d)."""
    span = max(scn.r, scn.S)
    ds = np.linspace(-span, span, n) * (1.0 - 1e-12)
    # the alerted/unalerted switch at |d| = r can be a discontinuity
    extra = np.array([0.0, scn.r, -scn.r, scn.r, -scn.r]) * np.array([1, 1 - 1e-12, 1 - 1e-12, 1 + 1e-12, 1 + 1e-12])
    ds = np.sort(np.concatenate([ds, extra[np.abs(extra) < span]]))
    ts = _loss_times(scn, alpha, ds)
    finite = np.isfinite(ts)
    if not finite.any():
        return math.inf, math.nan
    k = int(np.argmin(np.where(finite, ts, np.inf)))
    best = (float(ts[k]), float(ds[k]))
    # push each feasible/infeasible transition to the boundary
    edges = np.nonzero(finite[:-1] != finite[1:])[0]
    if len(edges):
        lo = np.where(finite[edges], ds[edges], ds[edges + 1])
        hi = np.where(finite[edges], ds[edges + 1], ds[edges])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            ok = np.isfinite(_loss_times(scn, alpha, mid))
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        tb = _loss_times(scn, alpha, lo)
        j = int(np.argmin(tb))
        if tb[j] < best[0]:
            best = (float(tb[j]), float(lo[j]))
    # polish interior local minima
    for i in range(1, len(ds) - 1):
        if finite[i - 1] and finite[i + 1] and ts[i] <= ts[i - 1] and ts[i] <= ts[i + 1] \
                and ts[i] < best[0] + 1e-3 * best[0]:
            x, fx = golden_section(lambda dd: float(_loss_times(scn, alpha, dd)),
                                   ds[i - 1], ds[i + 1], 1e-12 * span)
            if fx < best[0]:
                best = (fx, x)
    return best


def loss_witness(scn: Scenario, alpha: float | None = None) -> tuple[float, float, float]:
    """Earliest irrecoverable loss of an opportunity created with the sensor off.

    Returns ``(t, alpha, d)`` for the minimizing sensor-off track spawned on
    circle R at the start of the cycle.  Courses cover ``[0, pi]`` with signed
    lateral range, which includes the mirror image of every geometry.
    """
    if planner.classify(scn).case is Case.ZERO_DETECTION:
        raise RegimeError("no detection possible")
    if alpha is not None:
        t, d = _min_over_lateral(scn, alpha)
        return t, alpha, d
    alphas = np.linspace(0.0, math.pi, 91)
    values = [_min_over_lateral(scn, a)[0] for a in alphas]
    order = np.argsort(values)[:3]
    best = (values[order[0]], float(alphas[order[0]]))
    for i in order:
        lo, hi = alphas[max(i - 1, 0)], alphas[min(i + 1, len(alphas) - 1)]
        a, t = golden_section(lambda x: _min_over_lateral(scn, x)[0], lo, hi, 1e-7)
        if t < best[0]:
            best = (t, a)
    t, d = _min_over_lateral(scn, best[1])
    return t, best[1], d


def min_loss_time(scn: Scenario, alpha: float | None = None) -> float:
    return loss_witness(scn, alpha)[0]


def missed_opportunity_track(scn: Scenario, tp: float, alpha: float | None = None) -> TrackSpec | None:
    """A concrete sensor-off track that enters and leaves S before ``tp``.

    The witness is taken strictly inside the feasible set (not at the grazing
    limit) so that simulating it is numerically unambiguous.
    """
    alphas = np.linspace(0.0, math.pi, 91) if alpha is None else np.array([alpha])
    span = max(scn.r, scn.S)
    ds = np.linspace(-span, span, 801)[1:-1]
    aa, dd = np.meshgrid(alphas, ds, indexing="ij")
    ts = _loss_times(scn, aa, dd)
    ok = np.isfinite(ts) & (ts < tp * (1.0 - 1e-3))
    if not ok.any():
        return None
    # an early loss well away from the grazing limit: the loss time closest
    # to the midpoint between the earliest loss and tp
    target = 0.5 * (ts[ok].min() + tp)
    i, j = np.unravel_index(np.argmin(np.where(ok, np.abs(ts - target), np.inf)), ts.shape)
    return TrackSpec(float(aa[i, j]), float(dd[i, j]), scn.R, 0.0)


# -- Monte Carlo ------------------------------------------------------------

@dataclass(frozen=True)
class RateEstimate:
    rate: float
    stderr: float
    n: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.rate - 1.96 * self.stderr, self.rate + 1.96 * self.stderr

    @property
    def ci_width(self) -> float:
        return 2 * 1.96 * self.stderr


ALPHA_STRATA = 2048


def _alpha_cycles(scn, schedule):
    """Courses on the midpoint grid used by the estimators and their cycles."""
    alphas = (np.arange(ALPHA_STRATA) + 0.5) * math.pi / ALPHA_STRATA
    if isinstance(schedule, Cycle):
        cycles = [schedule] * ALPHA_STRATA
    else:
        cycles = [_cycle_for(schedule, float(a)) for a in alphas]
    return alphas, cycles


def estimate_detection_rate(scn: Scenario, schedule, n_samples: int, seed: int,
                            chunk: int = 200_000) -> RateEstimate:
    """Time-averaged detection width, estimated by sampling opportunities.

    Each sample draws a course (uniform over a fine midpoint grid of
    ``[0, pi]``), a time uniform within that course's cycle and a lateral
    offset uniform on ``[-S, S]``.  The opportunity live at that time is
    alerted at the cycle's current alert range and its fate is resolved
    geometrically with the sensor on.  The rate is ``2S`` times the detected
    fraction.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    regime = planner.classify(scn)
    if regime.case is Case.ZERO_DETECTION:
        return RateEstimate(0.0, 0.0, n_samples)
    if regime.case is Case.FAST_TARGET:
        raise RegimeError("width sampling is defined for targets slower than the searcher")
    alphas, cycles = _alpha_cycles(scn, schedule)
    tp = np.array([c.tp for c in cycles])
    total = np.array([c.total if not c.is_continuous else 1.0 for c in cycles])
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        k = rng.integers(0, ALPHA_STRATA, m)
        t = rng.random(m) * total[k]
        y = (2.0 * rng.random(m) - 1.0) * scn.S
        x = np.empty(m)
        live = np.ones(m, dtype=bool)
        for idx in np.unique(k):
            sel = k == idx
            c = cycles[idx]
            x[sel] = _alert_range(scn, c, t[sel])
            if not c.is_continuous:
                live[sel] = t[sel] >= tp[idx]
        det = np.zeros(m, dtype=bool)
        if live.any():
            det[live] = _detected_at_range(scn, x[live], y[live])
        hits += int(det.sum())
        done += m
    p = hits / n_samples
    width = 2.0 * scn.S
    return RateEstimate(width * p, width * math.sqrt(p * (1.0 - p) / n_samples), n_samples)


@dataclass(frozen=True)
class GainEstimate:
    gain: float
    stderr: float
    intermittent: RateEstimate
    continuous: RateEstimate


def estimate_gain(scn: Scenario, n_samples: int, seed: int, schedule=None,
                  exact: bool = False, prefactor: str = "print") -> GainEstimate:
    """Ratio of intermittent to continuous detection rate, minus one."""
    if schedule is None:
        schedule = plan_schedule(scn, exact, prefactor)
    ss = np.random.SeedSequence(seed)
    s1, s2 = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
    a = estimate_detection_rate(scn, schedule, n_samples, s1)
    b = estimate_detection_rate(scn, Cycle.continuous(), n_samples, s2)
    if b.rate == 0.0:
        return GainEstimate(math.inf, math.inf, a, b)
    ratio = a.rate / b.rate
    se = ratio * math.hypot(a.stderr / a.rate if a.rate else 0.0, b.stderr / b.rate)
    return GainEstimate(ratio - 1.0, se, a, b)


def estimate_kinematic_gain(scn: Scenario, n_tracks: int, seed: int, schedule=None) -> GainEstimate:
    """Whole-track Monte Carlo of detections per unit of traffic.

    Tracks with uniform course, signed lateral range uniform on ``[-R, R]``
    and uniform cycle phase are traced through the full alert/evasion
    kinematics.  This counts every detection the schedules actually achieve,
    including targets alerted during the passive period that are caught
    later, which the width model does not credit.
    """
    if schedule is None:
        schedule = plan_schedule(scn)
    rng = np.random.default_rng(seed)
    alphas, cycles = _alpha_cycles(scn, schedule)
    k = rng.integers(0, ALPHA_STRATA, n_tracks)
    d = (2.0 * rng.random(n_tracks) - 1.0) * scn.R * (1.0 - 1e-9)
    u = rng.random(n_tracks)
    start = scn.R * (1.0 + 1e-9)
    counts = []
    for sched in (None, Cycle.continuous()):
        hits = 0
        for i in range(n_tracks):
            c = cycles[k[i]] if sched is None else sched
            phase = 0.0 if c.is_continuous else u[i] * c.total
            out = trace_track(scn, c, TrackSpec(float(alphas[k[i]]), float(d[i]), start, phase))
            hits += out.detected
        counts.append(hits)
    width = 2.0 * scn.R
    rates = [RateEstimate(width * h / n_tracks, width * math.sqrt(h / n_tracks * (1 - h / n_tracks) / n_tracks),
                          n_tracks) for h in counts]
    if counts[1] == 0:
        return GainEstimate(math.inf, math.inf, *rates)
    ratio = counts[0] / counts[1]
    se = ratio * math.sqrt(1.0 / max(counts[0], 1) + 1.0 / counts[1])
    return GainEstimate(ratio - 1.0, se, *rates)
