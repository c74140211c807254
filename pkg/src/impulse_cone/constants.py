"""Scalar constants consumed by the existence conditions.

For a kernel k with weight g, boundary profile gamma and the augmented
boundary measures, this module computes

    1/m      = sup over t in [0,1]  of the integral of k(t,s)g(s) ds over [0,1],
    1/M(a,b) = inf over t in [a,b]  of the integral of k(t,s)g(s) ds over [a,b],
    Gamma    = integral of gamma against the upper augmented measure,
    the coupling integral of K(s)g(s) with K(s) the measure-average of k(.,s),

plus the sampled nonlinearity bounds (sup of f/rho on a box, inf of
f/rho on the cone annulus) and the default lower bound alpha0 for the
boundary functional on the index-0 boundary set.

sup/inf over t use a dense grid plus golden-section refinement (the
integrals are continuous in t); the f-bounds are sampling-based and
marked as such in condition reports, with optional user-asserted
analytic overrides at the CLI level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import measure, quad
from .errors import DegenerateProblemError, InvalidSpecError

__all__ = ["ProblemConstants", "ProblemAnalysis", "compute_m", "compute_M",
           "compute_Gamma", "compute_K_g", "f_sup", "f_inf", "alpha0_default",
           "gamma_sup", "analyze"]

T_GRID = 513           # coarse scan before golden-section refinement
X_TOL = 1e-12          # refinement tolerance in the argument
F_GRID = 129           # nonlinearity sampling grid per axis
U_SEARCH_CAP = 1e6     # cap on the upper u-limit of the inf search

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                xtol: float = X_TOL):
    """Golden-section maximization on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _scan_extremum(f: Callable[[float], float], lo: float, hi: float,
                   maximize: bool, n_grid: int = T_GRID):
    """Dense scan plus golden-section refinement around the best bracket."""
    ts = np.linspace(lo, hi, n_grid)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmax(vals) if maximize else np.argmin(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    bl = float(ts[max(i - 1, 0)])
    bh = float(ts[min(i + 1, n_grid - 1)])
    if bh > bl:
        g = f if maximize else (lambda t: -f(t))
        xt, vt = _golden_max(g, bl, bh)
        vt = vt if maximize else -vt
        if (vt > best_v) == maximize and vt != best_v:
            best_t, best_v = xt, vt
    return best_t, best_v


def _row_integral(ks, g, t: float, lo: float, hi: float, tol: float) -> float:
    breaks = list(ks.kinks(t)) + list(getattr(g, "breakpoints", ()))

    def integrand(s):
        return np.asarray(ks.k(t, s), dtype=float) * np.asarray(g(s), dtype=float)

    return quad.integrate(integrand, lo, hi, breaks, tol)


def compute_m(ks, g, tol: float = quad.DEFAULT_TOL) -> float:
    """m with 1/m the supremum over t of the full-interval kernel action."""
    _, sup = _scan_extremum(lambda t: _row_integral(ks, g, t, 0.0, 1.0, tol),
                            0.0, 1.0, maximize=True)
    if sup <= 1e-15:
        raise DegenerateProblemError(
            "kernel action with this weight is identically zero; the weight "
            "must have positive mass against the kernel")
    return 1.0 / sup


def compute_M(ks, g, a: float, b: float, tol: float = quad.DEFAULT_TOL) -> float:
    """M(a,b) with 1/M the infimum over the window of the window-restricted
    kernel action."""
    if not a < b:
        raise InvalidSpecError(f"window [{a}, {b}] must have positive length")
    check = quad.integrate(
        lambda s: np.asarray(ks.phi(s), dtype=float) * np.asarray(g(s), dtype=float),
        a, b, getattr(g, "breakpoints", ()), tol)
    if check <= 0.0:
        raise DegenerateProblemError(
            f"the weight has no mass against the majorant on [{a}, {b}]")
    _, inf = _scan_extremum(lambda t: _row_integral(ks, g, t, a, b, tol),
                            a, b, maximize=False)
    if inf <= 1e-15:
        raise DegenerateProblemError("window kernel action has zero infimum")
    return 1.0 / inf


def gamma_sup(ks, tol: float = X_TOL) -> float:
    """Sup norm of the boundary profile on [0,1]."""
    _, sup = _scan_extremum(lambda t: abs(float(ks.gamma(t))), 0.0, 1.0,
                            maximize=True)
    if sup <= 0.0:
        raise DegenerateProblemError("boundary profile is identically zero")
    return sup


def compute_Gamma(ks, dA2: measure.StieltjesMeasure,
                  tol: float = quad.DEFAULT_TOL) -> float:
    """Integral of gamma against the upper augmented boundary measure.
    The caller must reject values >= 1 before any index-1 arithmetic."""
    return measure.integrate(dA2, ks.gamma, "left", tol)


def compute_K_g(ks, dA2: measure.StieltjesMeasure, g,
                tol: float = quad.DEFAULT_TOL) -> float:
    """Coupling integral: integrate over s the measure-average of k(.,s)
    times g(s).  Outer panels split at atom locations (kernel kinks) and
    weight breakpoints."""
    atoms = dA2.atoms
    dens = dA2.density


    def outer(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for loc, w in atoms:
            out += w * np.asarray(ks.k(loc, s), dtype=float)
        if dens is not None:
            inner = np.empty_like(s)
            for i, si in enumerate(np.ravel(s)):
                breaks = list(dens.breakpoints)
                breaks.append(float(si))  # kink of t -> k(t, si)
                inner.flat[i] = quad.integrate(
                    lambda t: np.asarray(ks.k(t, si), dtype=float)
                    * np.asarray(dens(t), dtype=float),
                    0.0, 1.0, breaks, tol)
            out += inner
        return out * np.asarray(g(s), dtype=float)

    breaks = [loc for loc, _ in atoms]
    breaks.extend(getattr(g, "breakpoints", ()))
    if dens is not None:
        breaks.extend(dens.breakpoints)
    return quad.integrate(outer, 0.0, 1.0, breaks, tol)


def _refine_extremum_2d(f, pts, bounds, maximize: bool):
    """Nelder-Mead polish from the given starting points, clamped to bounds."""
    (t_lo, t_hi), (u_lo, u_hi) = bounds
    sign = -1.0 if maximize else 1.0

    def objective(x):
        t = min(max(x[0], t_lo), t_hi)
        u = min(max(x[1], u_lo), u_hi)
        return sign * float(f(np.asarray(t), np.asarray(u)))

    best = -math.inf if maximize else math.inf
    for p in pts:
        res = minimize(objective, p, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
        val = sign * res.fun
        if (val > best) == maximize:
            best = val
    return best


def f_sup(f, rho: float, n_grid: int = F_GRID) -> float:
    """Sampled sup of f(t,u)/rho over [0,1] x [0,rho]."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    ts = np.linspace(0.0, 1.0, n_grid)
    us = np.linspace(0.0, rho, n_grid)
    grid = np.broadcast_to(
        np.asarray(f(ts[:, None], us[None, :]), dtype=float), (n_grid, n_grid))
    flat = np.argsort(grid, axis=None)[-5:]
    pts = [(float(ts[i // n_grid]), float(us[i % n_grid])) for i in flat]
    best = _refine_extremum_2d(f, pts, ((0.0, 1.0), (0.0, rho)), maximize=True)
    return max(float(np.max(grid)), best) / rho


def f_inf(f, rho: float, c: float, a: float, b: float,
          n_grid: int = F_GRID) -> float:
    """Sampled inf of f(t,u)/rho over [a,b] x [rho, rho/c] (u capped)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    u_hi = rho / c
    if u_hi > U_SEARCH_CAP and rho < U_SEARCH_CAP:
        warnings.warn(
            f"inf search range [rho, rho/c] = [{rho:g}, {u_hi:g}] capped at "
            f"{U_SEARCH_CAP:g}; the reported bound is not certified beyond the cap",
            RuntimeWarning, stacklevel=2)
        u_hi = U_SEARCH_CAP
    ts = np.linspace(a, b, n_grid)
    us = np.linspace(rho, u_hi, n_grid)
    grid = np.broadcast_to(
        np.asarray(f(ts[:, None], us[None, :]), dtype=float), (n_grid, n_grid))
    flat = np.argsort(grid, axis=None)[:5]
    pts = [(float(ts[i // n_grid]), float(us[i % n_grid])) for i in flat]
    best = _refine_extremum_2d(f, pts, ((a, b), (rho, u_hi)), maximize=False)
    return min(float(np.min(grid)), best) / rho


def alpha0_default(boundary: measure.BoundaryFunctional,
                   dA1: measure.StieltjesMeasure, a: float, b: float,
                   rho: float, tol: float = quad.DEFAULT_TOL) -> float:
    """Default lower-bound coefficient for the boundary functional on the
    index-0 boundary set: on that set u >= rho on [a,b] and u >= 0
    elsewhere, so  alpha1[u] >= A0 + rho * dA1([a,b])  = alpha0 * rho.
    Mass outside the window is dropped (it only contributes u >= 0)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return boundary.A0 / rho + dA1.mass_on(a, b, tol)


@dataclass(frozen=True)
class ProblemConstants:
    """Every scalar the index conditions consume."""

    m: float
    M: float
    Gamma: float
    int_K_g: float
    c: float
    A0: float
    norm_gamma: float

    def __post_init__(self):
        if self.m > self.M * (1 + 1e-9):
            raise InvalidSpecError(
                f"inconsistent constants: m={self.m} exceeds M={self.M}")

    def i1_coefficient(self) -> float:
        """Multiplier of the f-sup bound in the index-1 inequality."""
        if self.Gamma >= 1.0:
            return math.inf
        return self.norm_gamma * self.int_K_g / (1.0 - self.Gamma) + 1.0 / self.m

    def to_dict(self) -> dict:
        return {
            "m": self.m, "M": self.M, "Gamma": self.Gamma,
            "int_K_g": self.int_K_g, "c": self.c, "A0": self.A0,
            "norm_gamma": self.norm_gamma,
        }


@dataclass(frozen=True)
class ProblemAnalysis:
    """Constants plus the augmented measures they came from."""

    constants: ProblemConstants
    dA1: measure.StieltjesMeasure
    dA2: measure.StieltjesMeasure
    c2: float
    window: tuple
    dA1_window_mass: float

    def alpha0(self, rho: float) -> float:
        return self.constants.A0 / rho + self.dA1_window_mass

    def thresholds(self) -> dict:
        """Certification thresholds on the nonlinearity bounds, exact when
        A0 = 0 (otherwise the A0/rho terms tighten them per rho):
        index-1 needs f-sup <= 1/i1_coefficient, index-0 needs
        f-inf >= (1 - c2*||gamma||*alpha0) * M."""
        pc = self.constants
        coef = pc.i1_coefficient()
        f_sup_max = 1.0 / coef if coef > 0 else math.inf
        f_inf_min = (1.0 - self.c2 * pc.norm_gamma * self.dA1_window_mass) * pc.M
        return {"f_sup_max": f_sup_max, "f_inf_min": f_inf_min}


def analyze(spec, tol: float = quad.DEFAULT_TOL) -> ProblemAnalysis:
    """Assemble all condition constants for a problem spec (duck-typed:
    needs .kernel, .g, .boundary, .impulses with tau/delta1/delta2, .cone)."""
    ks = spec.kernel
    cone = spec.cone
    dA1 = measure.augment(spec.boundary, [(i.tau, i.delta1) for i in spec.impulses])
    dA2 = measure.augment(spec.boundary, [(i.tau, i.delta2) for i in spec.impulses])
    constants = ProblemConstants(
        m=compute_m(ks, spec.g, tol),
        M=compute_M(ks, spec.g, cone.a, cone.b, tol),
        Gamma=compute_Gamma(ks, dA2, tol),
        int_K_g=compute_K_g(ks, dA2, spec.g, tol),
        c=cone.c,
        A0=spec.boundary.A0,
        norm_gamma=gamma_sup(ks),
    )
    return ProblemAnalysis(
        constants=constants,
        dA1=dA1,
        dA2=dA2,
        c2=ks.c2,
        window=(cone.a, cone.b),
        dA1_window_mass=dA1.mass_on(cone.a, cone.b, tol),
    )
