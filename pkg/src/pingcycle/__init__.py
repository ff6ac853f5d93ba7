"""Intermittent active-sensor scheduling against an evasive target.

Modules: ``kinematics`` (encounter geometry), ``planner`` (periods and
figures of merit per regime), ``numerics`` (quadrature, minimization, root
refinement), ``oracle`` (independent geometric / Monte Carlo checks) and
``cli``.
"""

from .errors import (ConvergenceError, DegenerateError, DomainError, FastTargetError,
                     InvalidScenario, ModelError, RegimeError, StepSizeError)
from .kinematics import CourseGeometry, Scenario
from .planner import AlphaPolicy, Case, Regime, SchedulePlan, WidthCurve, build_curve, build_plan, classify

__version__ = "0.1.0"

__all__ = [
    "AlphaPolicy", "Case", "ConvergenceError", "CourseGeometry", "DegenerateError", "DomainError",
    "FastTargetError", "InvalidScenario", "ModelError", "Regime", "RegimeError", "Scenario",
    "SchedulePlan", "StepSizeError", "WidthCurve", "build_curve", "build_plan", "classify",
]
