"""Fixed-point solver on the nodal discretization.

Damped Picard iteration u <- (1-d) u + d Tu, with divergence, stagnation
and trivial-collapse guards, plus an optional Newton-Krylov stage on the
nodal system x - T(x) = 0 for the cases Picard cannot reach.  Picard
converges where the operator contracts (sublinear or affine data); at a
cone fixed point of a superlinear nonlinearity the linearization
dominates the identity on the cone, Picard iterates are repelled, and
the Newton stage does the finishing.  Multi-start spreads initializers
over the radius band suggested by a certified hypothesis pair and
rejects the trivial solution by a sup-norm floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import NoConvergence, newton_krylov

from . import quad
from .hammerstein import ProblemSpec, apply_T
from .pcfun import PCFunction

__all__ = ["SolveResult", "MultiStartResult", "solve_fixed_point", "multi_start"]

DIVERGENCE_CAP = 1e12
STAGNATION_WINDOW = 50
STAGNATION_FACTOR = 1e-3
DEFAULT_TOL = 1e-9
DEFAULT_DAMPING = 0.5
DEFAULT_MAX_ITER = 10_000


@dataclass
class SolveResult:
    success: bool
    u: Optional[PCFunction]
    residual: float
    iterations: int
    method: str
    message: str
    residual_history: List[float] = field(default_factory=list)
    cone_margin: Optional[float] = None

    def __str__(self):
        state = "converged" if self.success else "failed"
        return (f"{state} [{self.method}] after {self.iterations} iterations, "
                f"residual {self.residual:.3e}: {self.message}")


def _finish(spec, u, res, iters, method, message, history, success):
    margin = None
    if u is not None:
        try:
            margin = u.cone_margin(spec.cone)
        except Exception:
            margin = None
    return SolveResult(success, u, res, iters, method, message,
                       history, margin)


def solve_fixed_point(spec: ProblemSpec, init: PCFunction,
                      damping: float = DEFAULT_DAMPING,
                      max_iter: int = DEFAULT_MAX_ITER,
                      tol: float = DEFAULT_TOL,
                      quad_tol: float = quad.DEFAULT_TOL,
                      min_norm: float = 0.0,
                      newton_fallback: bool = False) -> SolveResult:
    """Damped Picard from ``init`` (clamped nonnegative).

    Success means the plain fixed-point residual sup|u - Tu| dropped to
    ``tol``.  ``min_norm`` aborts runs that collapse toward the trivial
    fixed point below that sup-norm; ``newton_fallback`` hands the
    original initializer to Newton-Krylov when Picard gives up.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    u = init.with_values(np.maximum(init.values, 0.0))
    history: List[float] = []
    best_res, best_u = np.inf, u
    message = "maximum iterations exceeded"
    for it in range(1, max_iter + 1):
        Tu = apply_T(spec, u, quad_tol)
        res = float(np.max(np.abs(u.values - Tu.values)))
        history.append(res)
        if res < best_res:
            best_res, best_u = res, u
        if res <= tol:
            return _finish(spec, u, res, it, "picard", "fixed-point residual met",
                           history, success=True)
        if Tu.sup_norm() > DIVERGENCE_CAP:
            message = f"diverged: image sup-norm exceeded {DIVERGENCE_CAP:g}"
            break
        if min_norm > 0.0 and Tu.sup_norm() < min_norm * 0.5:
            message = (f"collapsed toward the trivial fixed point "
                       f"(sup-norm below {min_norm * 0.5:g})")
            break
        if (len(history) > STAGNATION_WINDOW
                and history[-1] > history[-1 - STAGNATION_WINDOW]
                * (1.0 - STAGNATION_FACTOR)):
            message = "stagnated: residual no longer decreasing"
            break
        u = u.with_values((1.0 - damping) * u.values + damping * Tu.values)
    iterations = len(history)
    if newton_fallback:
        nk = _newton_stage(spec, init, tol, quad_tol)
        nk.iterations += iterations
        nk.residual_history = history + nk.residual_history
        if nk.success:
            nk.method = "picard+newton-krylov"
            return nk
        message += f"; newton stage: {nk.message}"
    return _finish(spec, best_u, best_res, iterations, "picard", message,
                   history, success=False)


def _newton_stage(spec: ProblemSpec, init: PCFunction, tol: float,
                  quad_tol: float) -> SolveResult:
    """Newton-Krylov on the nodal residual, inputs clamped nonnegative so
    the nonlinearity never sees negative trial values."""
    evals = [0]

    def F(x):
        evals[0] += 1
        u = init.with_values(np.maximum(x, 0.0))
        return x - apply_T(spec, u, quad_tol).values

    x0 = np.maximum(init.values, 0.0)
    try:
        x = newton_krylov(F, x0, f_tol=tol * 0.5, maxiter=60, method="lgmres")
    except NoConvergence as err:
        x = np.asarray(err.args[0], dtype=float)
        u = init.with_values(np.maximum(x, 0.0))
        res = float(np.max(np.abs(u.values - apply_T(spec, u, quad_tol).values)))
        return _finish(spec, u, res, evals[0], "newton-krylov",
                       "did not converge", [res], success=False)
    except ValueError as err:
        return _finish(spec, None, np.inf, evals[0], "newton-krylov",
                       f"linear algebra failure: {err}", [], success=False)
    if float(np.min(x)) < -1e-9:
        u = init.with_values(np.maximum(x, 0.0))
        res = float(np.max(np.abs(u.values - apply_T(spec, u, quad_tol).values)))
        return _finish(spec, u, res, evals[0], "newton-krylov",
                       "converged to a sign-changing root", [res], success=False)
    u = init.with_values(np.maximum(x, 0.0))
    res = float(np.max(np.abs(u.values - apply_T(spec, u, quad_tol).values)))
    return _finish(spec, u, res, evals[0], "newton-krylov",
                   "newton residual met" if res <= tol else "residual re-check failed",
                   [res], success=res <= tol)


@dataclass
class MultiStartResult:
    success: bool
    solution: Optional[SolveResult]
    attempts: List[tuple] = field(default_factory=list)  # (description, SolveResult)

    def __str__(self):
        if self.success:
            return f"multi-start solved: {self.solution}"
        return f"multi-start failed after {len(self.attempts)} attempts"


def multi_start(spec: ProblemSpec, rho1: float, rho2: float,
                n_starts: int = 8,
                damping: float = DEFAULT_DAMPING,
                max_iter: int = DEFAULT_MAX_ITER,
                tol: float = DEFAULT_TOL,
                quad_tol: float = quad.DEFAULT_TOL,
                n_per_piece: int = None) -> MultiStartResult:
    """Launch the solver from constants log-spaced in [rho1, rho2/c] and
    from scaled boundary profiles; first success (by start order) wins.
    Solutions with sup-norm below rho1*(1-1e-6) are rejected as trivial.
    """
    if not 0.0 < rho1 < rho2:
        raise ValueError("need 0 < rho1 < rho2")
    floor = rho1 * (1.0 - 1e-6)
    hi = rho2 / spec.cone.c
    starts = [(f"constant {r:.6g}", spec.grid_function(r, n_per_piece))
              for r in np.geomspace(rho1, hi, max(n_starts - 2, 1))]
    gamma_fn = spec.kernel.gamma
    for r in np.geomspace(max(rho1, 1e-3), hi, 2):
        profile = spec.grid_function(lambda t: gamma_fn(t), n_per_piece)
        scale = r / profile.sup_norm()
        starts.append((f"boundary profile x {scale * 1:.6g}", profile * scale))

    result = MultiStartResult(success=False, solution=None)
    for label, init in starts:
        run = solve_fixed_point(spec, init, damping, max_iter, tol, quad_tol,
                                min_norm=floor, newton_fallback=True)
        result.attempts.append((label, run))
        if run.success and run.u.sup_norm() >= floor:
            result.success = True
            result.solution = run
            return result
        if run.success:
            run.success = False
            run.message += "; rejected: sup-norm below the positive-solution floor"
    return result
