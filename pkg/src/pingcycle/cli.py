"""Command-line front end: ``pingcycle {classify,plan,curves,sweep,verify} SCENARIO``.

SCENARIO is a JSON object or ``key=value`` text file with U, V, S, r, R, or
the name of a bundled example (EX-A, EX-B, EX-C).  Exit codes: 0 ok, 2 parse
error, 3 invariant violation, 4 zero detection (with --fail-on-zero),
5 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from importlib import resources

import numpy as np

from . import kinematics as kin
from . import oracle, planner
from .errors import InvalidScenario, ModelError, RegimeError
from .kinematics import Scenario
from .planner import AlphaPolicy, Case

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_ZERO, EXIT_VERIFY = 0, 2, 3, 4, 5
SCHEMA = 1
FIELDS = ("U", "V", "S", "r", "R")
BUNDLED = ("EX-A", "EX-B", "EX-C")
_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(deg|rad)?\s*$")


class ParseError(Exception):
    pass


def parse_angle(text) -> float:
    """'90deg', '1.5708rad' or a bare number of radians."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    m = _ANGLE.match(str(text))
    if not m:
        raise ParseError(f"cannot parse angle {text!r} (use e.g. 90deg or 1.5708rad)")
    value = float(m.group(1))
    return math.radians(value) if m.group(2) == "deg" else value


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _read_source(source: str) -> str:
    if source in BUNDLED:
        return resources.files("pingcycle").joinpath(f"scenarios/{source}.json").read_text("utf-8")
    try:
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror}") from None


def parse_scenario_text(text: str) -> dict:
    """Parse a scenario document into a plain dict (values still unchecked)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ParseError("scenario JSON must be an object")
        return doc
    doc = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            doc[key] = _number(value)
        except ValueError:
            doc[key] = value
    return doc


def scenario_from_doc(doc: dict) -> Scenario:
    values = {}
    for name in FIELDS:
        if name not in doc:
            raise ParseError(f"missing field {name!r}")
        value = doc[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"field {name!r}: expected a number, got {value!r}")
        values[name] = value
    return Scenario(**values)


def load(source: str):
    doc = parse_scenario_text(_read_source(source))
    return scenario_from_doc(doc), doc


# -- formatting ------------------------------------------------------------

class Fmt:
    def __init__(self, precision: int):
        self.p = precision

    def num(self, x) -> str:
        if x is None:
            return ""
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, float) and math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.{self.p}g}"

    def val(self, x):
        """JSON value rounded to the output precision."""
        if x is None or isinstance(x, (bool, str)):
            return x
        if math.isinf(x):
            return "InfiniteGain"
        return float(f"{x:.{self.p}g}")

    def angle(self, a) -> str:
        return f"{self.num(a)} rad ({self.num(math.degrees(a))} deg)"


def _echo(scn_doc: dict, args) -> dict:
    out = {"schema": SCHEMA}
    for name in FIELDS:
        out[name] = scn_doc[name]
    if "label" in scn_doc:
        out["label"] = scn_doc["label"]
    return out


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _regime_dict(regime):
    return {"case": regime.case.value, "bounded_width": regime.bounded_width,
            "detection_condition": regime.detection_condition,
            "governing": list(regime.governing)}


# -- commands --------------------------------------------------------------

def _resolve_policy(args, doc):
    alpha = args.alpha if args.alpha is not None else doc.get("alpha")
    kind = args.policy or doc.get("policy")
    if alpha is not None:
        alpha = parse_angle(alpha)
    if kind is None:
        kind = "per-alpha" if alpha is not None else "mean"
    if kind == "per-alpha":
        if alpha is None:
            raise ParseError("--policy per-alpha needs --alpha")
        return AlphaPolicy.per_alpha(alpha)
    return AlphaPolicy(kind)


def _options(args, doc):
    exact = args.exact or bool(doc.get("exact", False))
    prefactor = args.prefactor or doc.get("prefactor", "print")
    if prefactor not in planner.PREFACTORS:
        raise ParseError(f"prefactor must be one of {planner.PREFACTORS}")
    return exact, prefactor


def cmd_classify(args, scn, doc, fmt):
    regime = planner.classify(scn)
    if args.json:
        out = _echo(doc, args)
        out["regime"] = _regime_dict(regime)
        _emit_json(out)
    else:
        head = regime.case.value
        if regime.governing:
            head += "; " + " / ".join(regime.governing)
        print(head)
        rel = "<" if regime.detection_condition else ">="
        print(f"detection condition: {fmt.num(regime.detection_condition)} "
              f"(U/V = {fmt.num(scn.U / scn.V)} {rel} S/r = {fmt.num(scn.S / scn.r)})")
        reach = kin.max_width_range(scn)
        rel = "<=" if regime.bounded_width else ">"
        print(f"bounded width: {fmt.num(regime.bounded_width)} (S*V/U = {fmt.num(reach)} {rel} R = {fmt.num(scn.R)})")
    if args.fail_on_zero and regime.case is Case.ZERO_DETECTION:
        return EXIT_ZERO
    return EXIT_OK


PLAN_KEYS = (("Tp", "tp"), ("Ta", "ta"), ("T", "total"), ("TR", "tr"), ("rho", "rho"),
             ("maxAvgWidth", "max_avg_width"), ("G", "gain"), ("cutoff", "cutoff"),
             ("areaRate", "area_rate"), ("areaRateProduct", "area_rate_product"),
             ("alphaOpt", "alpha"), ("dOpt", "d"))


def cmd_plan(args, scn, doc, fmt):
    policy = _resolve_policy(args, doc)
    exact, prefactor = _options(args, doc)
    plan = planner.build_plan(scn, policy, exact, prefactor)
    if args.json:
        out = _echo(doc, args)
        out.update({"policy": policy.kind, "alpha": policy.alpha, "exact": exact, "prefactor": prefactor})
        out["regime"] = _regime_dict(plan.regime)
        body = {key: fmt.val(getattr(plan, attr)) for key, attr in PLAN_KEYS}
        body.update({"continuousPreferred": plan.continuous_preferred,
                     "moe1Guaranteed": plan.moe1_guaranteed,
                     "detectionPossible": plan.detection_possible,
                     "notes": list(plan.notes)})
        out["plan"] = body
        _emit_json(out)
    else:
        print(f"regime: {plan.regime.case.value}")
        pol = policy.kind if policy.alpha is None else f"{policy.kind} alpha = {fmt.angle(policy.alpha)}"
        print(f"policy: {pol}" + (" (exact root)" if exact else ""))
        if not plan.detection_possible:
            print("verdict: no detection possible")
        for key, attr in PLAN_KEYS:
            value = getattr(plan, attr)
            if value is None:
                continue
            if key == "G":
                text = "InfiniteGain" if math.isinf(value) else f"{fmt.num(100 * value)}%"
            elif key == "alphaOpt":
                text = fmt.angle(value)
            else:
                text = fmt.num(value)
            print(f"{key} = {text}")
        if plan.regime.has_width_profile and plan.cutoff is None and plan.detection_possible:
            print("cutoff: none")
        print(f"continuous preferred: {fmt.num(plan.continuous_preferred)}")
        print(f"MOE1 guaranteed: {fmt.num(plan.moe1_guaranteed)}")
        for note in plan.notes:
            print(f"note: {note}")
    if args.fail_on_zero and not plan.detection_possible:
        return EXIT_ZERO
    return EXIT_OK


def _csv(rows, header, fmt):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt.num(v) if not isinstance(v, str) else v for v in row])
    sys.stdout.write(buf.getvalue())


def _require_profile(scn):
    regime = planner.classify(scn)
    if regime.case is Case.ZERO_DETECTION:
        raise RegimeError("no detection possible: nothing to plot")
    return regime


def cmd_curves(args, scn, doc, fmt):
    regime = _require_profile(scn)
    if not regime.has_width_profile:
        raise RegimeError(f"{regime.case.value} has no width profile")
    alpha = parse_angle(args.alpha if args.alpha is not None else doc.get("alpha", 0.0))
    _, prefactor = _options(args, doc)
    prof = planner.profile(scn, alpha, prefactor)
    end = prof.tr + (prof.tr - prof.tp)
    n = args.samples
    grid = [end * k / (n - 1) for k in range(n)]
    times = sorted(grid + [prof.tp, prof.tr])
    rows = [(t, prof.width_at(t), prof.area_at(t), prof.avg_width(t)) for t in times]
    _csv(rows, ("t", "D", "A", "A_over_t"), fmt)
    return EXIT_OK


def cmd_sweep(args, scn, doc, fmt):
    _require_profile(scn)
    exact, prefactor = _options(args, doc)
    rows = planner.sweep(scn, args.grid, exact, prefactor)
    table = [(r["alpha"], r["Tp"], r["T"], r["rho"], r["A_over_T"],
              "ContinuousPreferred" if r["continuous_preferred"] else "") for r in rows]
    _csv(table, ("alpha", "Tp", "T", "rho", "A_over_T", "flag"), fmt)
    return EXIT_OK


def _override(tp, spec):
    if spec is None:
        return tp
    spec = spec.strip()
    try:
        if spec.endswith("%"):
            return tp * (1.0 + float(spec[:-1]) / 100.0)
        return float(spec)
    except ValueError:
        raise ParseError(f"cannot parse --override-tp {spec!r}") from None


def _verify_checks(args, scn, doc, fmt):
    """Yield (name, passed, message) for each oracle check."""
    regime = planner.classify(scn)
    exact, prefactor = _options(args, doc)
    rng = np.random.default_rng(args.seed)
    if regime.case is Case.ZERO_DETECTION:
        hits = 0
        for _ in range(200):
            d = rng.uniform(-1, 1) * scn.R * 0.999
            track = oracle.TrackSpec(rng.uniform(0, math.pi), d, scn.R * 1.001)
            hits += oracle.trace_track(scn, oracle.Cycle.continuous(), track).detected
        yield "zero-detection", hits == 0, f"no detection possible ({hits} of 200 continuous-sensor tracks detected)"
        return

    if scn.U < scn.V:
        x0 = scn.r if regime.case is Case.ESCAPE else scn.S
        x1 = min(scn.R, kin.max_width_range(scn))
        tol = 1e-3 * scn.S
        for x in [x0 + f * (x1 - x0) for f in (0.1, 0.3, 0.5, 0.7, 0.9)] + [scn.R]:
            measured = oracle.measured_width_at_range(scn, x)
            analytic = kin.instantaneous_width(scn, x)
            ok = abs(measured - analytic) <= tol
            yield (f"width x={fmt.num(x)}", ok,
                   f"measured {fmt.num(measured)} vs analytic {fmt.num(analytic)} (tol {fmt.num(tol)})")

    plan = planner.build_plan(scn, AlphaPolicy.min_alpha_d(), exact, prefactor)
    tp = _override(plan.tp, args.override_tp)
    t_loss, a_w, d_w = oracle.loss_witness(scn)
    msg = f"Tp {fmt.num(tp)} vs earliest loss {fmt.num(t_loss)} at alpha={fmt.num(a_w)}, d={fmt.num(d_w)}"
    if tp > t_loss + 0.01:
        track = oracle.missed_opportunity_track(scn, tp)
        cycle = oracle.Cycle(tp, tp + plan.ta)
        out = oracle.simulate_track(scn, cycle, track, args.dt)
        yield ("MOE1", False, f"{msg}; missed opportunities found: track alpha={fmt.num(track.alpha)} "
               f"d={fmt.num(track.d)} -> {out.verdict.value}, lost at t={fmt.num(out.t_loss)}")
    elif tp < t_loss - 0.01:
        yield "MOE1", False, f"{msg}; passive period not tight (shorter than needed)"
    else:
        yield "MOE1", True, msg

    cycle = oracle.Cycle.from_plan(plan) if args.override_tp is None else oracle.Cycle(tp, tp + plan.ta)
    disagree = 0
    for _ in range(20):
        track = oracle.TrackSpec(rng.uniform(0, math.pi), rng.uniform(-1, 1) * scn.R * 0.99,
                                 scn.R * 1.01, rng.uniform(0, cycle.total))
        a = oracle.simulate_track(scn, cycle, track, args.dt)
        b = oracle.trace_track(scn, cycle, track)
        disagree += a.verdict is not b.verdict
    yield "engines", disagree == 0, f"time-stepped vs event-driven verdicts disagree on {disagree} of 20 tracks"

    if scn.U < scn.V:
        mean_plan = planner.build_plan(scn, AlphaPolicy.mean(), exact, prefactor)
        est = oracle.estimate_gain(scn, args.samples, args.seed, exact=exact, prefactor=prefactor)
        if math.isinf(mean_plan.gain):
            ok = math.isinf(est.gain)
        else:
            ok = abs(est.gain - mean_plan.gain) <= 0.05
        yield ("gain", ok, f"Monte Carlo {fmt.num(est.gain)} +/- {fmt.num(1.96 * est.stderr)} "
               f"vs G {fmt.num(mean_plan.gain)} (tol 0.05, n={args.samples})")


def cmd_verify(args, scn, doc, fmt):
    results = list(_verify_checks(args, scn, doc, fmt))
    passed = all(ok for _, ok, _ in results)
    if args.json:
        out = _echo(doc, args)
        out["checks"] = [{"name": n, "pass": ok, "detail": m} for n, ok, m in results]
        out["pass"] = passed
        _emit_json(out)
    else:
        for name, ok, message in results:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {message}")
        print(f"verification: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_VERIFY


COMMANDS = {"classify": cmd_classify, "plan": cmd_plan, "curves": cmd_curves,
            "sweep": cmd_sweep, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario file (JSON or key=value) or EX-A/EX-B/EX-C")
    common.add_argument("--alpha", help="unalerted course, e.g. 90deg or 1.5708rad")
    common.add_argument("--policy", choices=AlphaPolicy.KINDS)
    common.add_argument("--exact", action="store_true", help="solve the stationarity root exactly")
    common.add_argument("--prefactor", choices=planner.PREFACTORS,
                        help="close-alert area prefactor (default print)")
    common.add_argument("--precision", type=int, default=4, help="significant digits (default 4)")
    common.add_argument("--json", action="store_true")
    common.add_argument("--fail-on-zero", action="store_true", help="exit 4 when detection is impossible")

    parser = argparse.ArgumentParser(prog="pingcycle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="regime of a scenario")
    sub.add_parser("plan", parents=[common], help="passive/active periods and figures of merit")
    p = sub.add_parser("curves", parents=[common], help="CSV of D, A and A/t versus time")
    p.add_argument("--samples", type=int, default=200)
    p = sub.add_parser("sweep", parents=[common], help="CSV of the per-course plan over [0, pi]")
    p.add_argument("--grid", type=int, default=180)
    p = sub.add_parser("verify", parents=[common], help="check the plan against the oracle")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--dt", type=float, default=None, help="simulation step (default: largest admissible)")
    p.add_argument("--override-tp", help="replace Tp by a value or a relative change such as +20%%")
    return parser


def _join_signed_values(argv):
    """Let ``--override-tp -20%`` through argparse, which reads ``-20%`` as an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--override-tp" and i + 1 < len(argv):
            out.append(f"--override-tp={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_signed_values(argv))
    if args.precision < 1:
        parser.error("--precision must be >= 1")
    if getattr(args, "samples", 2) < (2 if args.command == "curves" else 1):
        parser.error("--samples is too small")
    if getattr(args, "grid", 1) < 1:
        parser.error("--grid must be >= 1")
    fmt = Fmt(args.precision)
    try:
        scn, doc = load(args.scenario)
        return COMMANDS[args.command](args, scn, doc, fmt)
    except ParseError as exc:
        print(f"pingcycle: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidScenario as exc:
        print(f"pingcycle: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ModelError as exc:
        print(f"pingcycle: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
