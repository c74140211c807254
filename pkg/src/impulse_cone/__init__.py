"""Positive solutions of second-order impulsive boundary value problems
with nonlocal Stieltjes boundary conditions.

The problem

    u'' + g(t) f(t, u) = 0   on (0,1) away from the impulse times,
    jump of u at tau_i equal to I_i(u(tau_i)),
    jump of u' at tau_i equal to I_i(u(tau_i)) / (tau_i - 1),
    u(0) = A0 + integral of u dA,   u(1) = 0,

is recast as a fixed-point equation for a perturbed Hammerstein integral
operator on a cone of positive functions.  The package machine-checks
the scalar inequalities that certify existence of a positive solution,
computes one by Nystrom-style fixed-point iteration (with a Newton
finishing stage), and independently verifies it by piecewise
Runge-Kutta shooting.
"""

from .conditions import ConditionReport, check_I0, check_I1, check_pair, find_H
from .constants import ProblemAnalysis, ProblemConstants, analyze
from .errors import (
    DegenerateProblemError,
    EvalDomainError,
    ExprSyntaxError,
    GammaBoundError,
    InvalidSpecError,
    QuadratureAccuracyError,
    UnboundVariableError,
)
from .hammerstein import (
    Impulse,
    ProblemSpec,
    apply_T,
    cone_mapping_check,
    residual,
)
from .kernel import KernelSpec, builtin_dirichlet, verify_bounds
from .measure import BoundaryFunctional, StieltjesMeasure, augment, total_mass
from .pcfun import ConeParams, PCFunction
from .shooting import boundary_residuals, crosscheck, integrate_ivp, solve_shooting
from .solver import multi_start, solve_fixed_point
from .specfile import LoadedProblem, Numerics, load_problem, loads_problem

__version__ = "0.1.0"

__all__ = [
    "BoundaryFunctional", "ConditionReport", "ConeParams", "DegenerateProblemError",
    "EvalDomainError", "ExprSyntaxError", "GammaBoundError", "Impulse",
    "InvalidSpecError", "KernelSpec", "LoadedProblem", "Numerics", "PCFunction",
    "ProblemAnalysis", "ProblemConstants", "ProblemSpec", "QuadratureAccuracyError",
    "StieltjesMeasure", "UnboundVariableError", "analyze", "apply_T", "augment",
    "boundary_residuals", "builtin_dirichlet", "check_I0", "check_I1", "check_pair",
    "cone_mapping_check", "crosscheck", "find_H", "integrate_ivp", "load_problem",
    "loads_problem", "multi_start", "residual", "solve_fixed_point",
    "solve_shooting", "total_mass", "verify_bounds",
]
