"""Wolff and Riesz potentials of measures, and a monotone solver for the
sublinear system u = W(v^{q1} d sigma), v = W(u^{q2} d sigma)."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (AccuracyFailure, ConditionFailure, DegenerateMeasure, InvalidArgument,
                     NumericFailure, ParameterError, SandwichFailure, SupersolutionFailure,
                     WolffError)
from .radial import RadialFunction, log_grid
from .measures import (Atomic, BallLebesgue, RadialDensity, Scaled, Weighted, ball_mass, dirac,
                       scale_measure, total_mass, unit_ball, weight_measure, zero_measure)
from .params import Params, validate
from .exponents import (Exponents, LowerBoundSequence, gamma_exponents, limit_constant,
                        lower_bound_sequence, subsolution_scale)
from .quadrature import QuadratureConfig
from .potentials import RadialPotentialOperator, riesz, wolff, wolff_many, wolff_profile
from .conditions import (ConditionReport, capacity_ball_scaling, finiteness_condition,
                         kappa_estimate, local_integrability, weaker_condition_lambda)
from .solver import (Barriers, IterationTrace, SolutionPair, SolveResult, SolverConfig,
                     build_barriers, iterate, solve, verify_sandwich)

__all__ = [
    "AccuracyFailure", "Atomic", "BallLebesgue", "Barriers", "ConditionFailure", "ConditionReport",
    "DegenerateMeasure", "Exponents", "InvalidArgument", "IterationTrace", "LowerBoundSequence",
    "NumericFailure", "ParameterError", "Params", "QuadratureConfig", "RadialDensity",
    "RadialFunction", "RadialPotentialOperator", "SandwichFailure", "Scaled", "SolutionPair",
    "SolveResult", "SolverConfig", "SupersolutionFailure", "Weighted", "WolffError", "ball_mass",
    "build_barriers", "capacity_ball_scaling", "dirac", "finiteness_condition", "gamma_exponents",
    "iterate", "kappa_estimate", "limit_constant", "local_integrability", "log_grid",
    "lower_bound_sequence", "riesz", "scale_measure", "solve", "subsolution_scale", "total_mass",
    "unit_ball", "validate", "verify_sandwich", "weaker_condition_lambda", "weight_measure",
    "wolff", "wolff_many", "wolff_profile", "zero_measure",
]
