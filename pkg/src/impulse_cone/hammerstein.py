"""The perturbed Hammerstein operator and full problem description.

The operator acts on nonnegative piecewise-continuous functions as

    Tu(t) = gamma(t) * ( F[u] + sum_i chi_(tau_i,1](t) * I_i(u(tau_i)) / (1 - tau_i) )
            + integral over s of k(t,s) g(s) f(s, u(s)) ds,

where F is the affine Stieltjes boundary functional and u(tau_i) means
the left limit.  Fixed points of T are the solutions of the impulsive
boundary value problem.  The indicator uses the right node at each jump:
chi is 0 on the left node at tau_i and 1 on the right node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import constants as _constants
from . import quad
from .errors import InvalidSpecError
from .kernel import KernelSpec
from .measure import BoundaryFunctional
from .pcfun import ConeParams, PCFunction

__all__ = ["Impulse", "ProblemSpec", "apply_T", "residual",
           "cone_mapping_check", "ConeCheckReport"]

C7_SAMPLE = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 49)])
NONNEG_TOL = 1e-12


@dataclass(frozen=True)
class Impulse:
    """One impulse: jump I(u(tau)) in u at time tau, with linear envelope
    delta1 * x <= I(x) <= delta2 * x."""

    tau: float
    fn: Callable[[float], float]
    delta1: float
    delta2: float
    source: str = ""  # original expression text, if any

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise InvalidSpecError(f"impulse time {self.tau} outside (0, 1)")
        if self.delta1 < 0 or self.delta2 < 0:
            raise InvalidSpecError("impulse envelope slopes must be >= 0")
        if self.delta1 > self.delta2:
            raise InvalidSpecError(
                f"impulse envelope inverted: delta1={self.delta1} > delta2={self.delta2}")


class ProblemSpec:
    """Everything defining one impulsive boundary value problem.

    f is a vectorized callable of (t, u); g a vectorized callable of one
    variable carrying optional ``breakpoints``; impulses a nonempty
    tuple ordered in time and strictly left of the cone window.
    Construction audits the sign and envelope assumptions by sampling.
    """

    def __init__(self, f: Callable, g: Callable,
                 impulses: Sequence[Impulse],
                 boundary: BoundaryFunctional,
                 kernel: KernelSpec,
                 cone: ConeParams,
                 f_source: str = "", g_source: str = ""):
        impulses = tuple(impulses)
        if not impulses:
            raise InvalidSpecError(
                "at least one impulse is required (use a zero-weight impulse "
                "for the continuous problem)")
        taus = [imp.tau for imp in impulses]
        if sorted(set(taus)) != taus:
            raise InvalidSpecError("impulse times must be strictly increasing")
        if taus[-1] >= cone.a:
            raise InvalidSpecError(
                f"cone window [{cone.a}, {cone.b}] must lie strictly right of "
                f"the last impulse at {taus[-1]}")
        boundary.check_clear_of(taus)
        self.f = f
        self.g = g
        self.impulses = impulses
        self.boundary = boundary
        self.kernel = kernel
        self.cone = cone
        self.f_source = f_source
        self.g_source = g_source
        self._audit()
        self._analysis: Optional[_constants.ProblemAnalysis] = None

    def _audit(self):
        # impulse envelope (sampled): delta1*x <= I(x) <= delta2*x
        for imp in self.impulses:
            for x in C7_SAMPLE:
                y = float(imp.fn(float(x)))
                slack = 1e-9 * max(1.0, abs(y))
                if y < imp.delta1 * x - slack or y > imp.delta2 * x + slack:
                    raise InvalidSpecError(
                        f"impulse at {imp.tau} violates its envelope at x={x:g}: "
                        f"I(x)={y:g} not in [{imp.delta1 * x:g}, {imp.delta2 * x:g}]")
                if y < -slack:
                    raise InvalidSpecError(
                        f"impulse at {imp.tau} is negative at x={x:g}")
        # nonnegative data (sampled)
        ts = np.linspace(0.0, 1.0, 33)
        us = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 25)])
        fv = np.asarray(self.f(ts[:, None], us[None, :]), dtype=float)
        if np.min(fv) < -NONNEG_TOL:
            it, iu = np.unravel_index(np.argmin(fv), fv.shape)
            raise InvalidSpecError(
                f"nonlinearity is negative at t={ts[it]:g}, u={us[iu]:g}")
        ss = np.linspace(0.0, 1.0, 257)
        gv = np.asarray(self.g(ss), dtype=float)
        if np.min(gv) < -NONNEG_TOL:
            raise InvalidSpecError(
                f"weight is negative at s={ss[int(np.argmin(gv))]:g}")

    @property
    def jumps(self) -> Tuple[float, ...]:
        return tuple(imp.tau for imp in self.impulses)

    def alpha(self, u: PCFunction) -> float:
        """Boundary functional of u (left limits at jumps)."""
        return self.boundary(u)

    def analysis(self, tol: float = quad.DEFAULT_TOL) -> _constants.ProblemAnalysis:
        if self._analysis is None:
            self._analysis = _constants.analyze(self, tol)
        return self._analysis

    def grid_function(self, fn_or_value, n_per_piece: int = None) -> PCFunction:
        """Sample a callable or constant on this problem's default grid."""
        kwargs = {} if n_per_piece is None else {"n_per_piece": n_per_piece}
        if callable(fn_or_value):
            return PCFunction.from_callable(fn_or_value, self.jumps, **kwargs)
        return PCFunction.constant(float(fn_or_value), self.jumps, **kwargs)


def _impulse_indicators(spec: ProblemSpec, u: PCFunction) -> np.ndarray:
    """chi_(tau_i,1] sampled on u's grid: 0 on the left node at tau_i,
    1 on the right node, shape (n_impulses, n_nodes)."""
    grid = u.grid
    chi = np.empty((len(spec.impulses), grid.size))
    for row, imp in enumerate(spec.impulses):
        chi[row] = (grid > imp.tau).astype(float)
        li = int(np.searchsorted(grid, imp.tau, side="left"))
        chi[row, li] = 0.0
        chi[row, li + 1] = 1.0
    return chi


def apply_T(spec: ProblemSpec, u: PCFunction, tol: float = quad.DEFAULT_TOL) -> PCFunction:
    """Evaluate the operator on u, sampled on u's grid.

    The Hammerstein term is assembled with one composite Gauss pass whose
    panels are the grid intervals (plus weight breakpoints), so the
    integrand is smooth on every panel and the kernel kink at s = t
    always falls on a panel edge when t is a grid node.  Kernels whose
    kink locus leaves the grid fall back to adaptive quadrature at the
    affected nodes.
    """
    if float(np.min(u.values)) < -NONNEG_TOL:
        raise ValueError("operator input must be nonnegative")
    if u.jumps != spec.jumps:
        raise ValueError(
            f"input jump points {list(u.jumps)} do not match the problem's "
            f"impulse times {list(spec.jumps)}")

    grid = u.grid
    ks = spec.kernel
    alpha_u = spec.boundary(u, tol)
    jump_coef = np.array([imp.fn(u.eval(imp.tau, "left")) / (1.0 - imp.tau)
                          for imp in spec.impulses])
    chi = _impulse_indicators(spec, u)
    gamma_vals = np.asarray(ks.gamma(grid), dtype=float)

    edges = np.unique(np.concatenate([
        grid, np.asarray(list(getattr(spec.g, "breakpoints", ())), dtype=float)]))
    nodes, weights = quad.gauss_panels(edges)
    load = weights * np.asarray(spec.g(nodes), dtype=float) \
        * np.asarray(spec.f(nodes, u(nodes)), dtype=float)

    if ks.separable is not None:
        integral = _separable_sums(ks.separable, edges, nodes, load, grid)
    else:
        integral = np.empty_like(grid)
        for j, t in enumerate(grid):
            kinks = [x for x in ks.kinks(float(t)) if 0.0 < x < 1.0]
            if all(np.any(np.abs(edges - x) < 1e-15) for x in kinks):
                integral[j] = float(np.dot(np.asarray(ks.k(t, nodes), dtype=float), load))
            else:
                integral[j] = quad.kernel_action(ks, spec.g,
                                                 lambda s: spec.f(s, u(s)),
                                                 float(t), tol)

    values = gamma_vals * (alpha_u + chi.T @ jump_coef) + integral
    return u.with_values(values)


def _separable_sums(parts, edges, nodes, load, grid):
    """Hammerstein term for a diagonally-separable kernel: the integral at
    each grid node is a prefix panel sum from the left part plus a suffix
    panel sum from the right part (grid nodes are always panel edges, so
    no panel straddles the diagonal)."""
    order = nodes.size // (edges.size - 1)
    lower = (np.asarray(parts.lower_s(nodes), dtype=float) * load).reshape(-1, order).sum(axis=1)
    upper = (np.asarray(parts.upper_s(nodes), dtype=float) * load).reshape(-1, order).sum(axis=1)
    prefix_lower = np.concatenate([[0.0], np.cumsum(lower)])
    suffix_upper = np.concatenate([np.cumsum(upper[::-1])[::-1], [0.0]])
    idx = np.searchsorted(edges, grid)
    return (np.asarray(parts.lower_t(grid), dtype=float) * prefix_lower[idx]
            + np.asarray(parts.upper_t(grid), dtype=float) * suffix_upper[idx])


def residual(spec: ProblemSpec, u: PCFunction, tol: float = quad.DEFAULT_TOL) -> float:
    """Sup-norm of u - Tu on u's grid."""
    return (u - apply_T(spec, u, tol)).sup_norm()


@dataclass
class ConeCheckReport:
    """Outcome of the randomized cone-invariance test."""

    n_checked: int
    failures: list = field(default_factory=list)  # (index, cone margin, sup norm)
    tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return not self.failures

    def __str__(self):
        state = "pass" if self.passed else "FAIL"
        return (f"cone invariance [{state}]: {self.n_checked - len(self.failures)}"
                f"/{self.n_checked} mapped into the cone (tol {self.tol:g})")


def random_cone_element(spec: ProblemSpec, rng: np.random.Generator,
                        n_per_piece: int = None) -> PCFunction:
    """|trigonometric polynomial| + constant, shifted and scaled into the
    cone; covers both smooth interiors and near-boundary members."""
    cone = spec.cone
    a = rng.normal(size=5)
    b = rng.normal(size=5)
    c0 = rng.uniform(0.05, 1.0)

    def profile(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k in range(5):
            out += a[k] * np.cos((k + 1) * np.pi * t) \
                + b[k] * np.sin((k + 1) * np.pi * t)
        return np.abs(out) + c0

    u = spec.grid_function(profile, n_per_piece)
    margin = u.min_on(cone.a, cone.b) - cone.c * u.sup_norm()
    if margin < 0 and cone.c < 1.0:
        shift = (cone.c * u.sup_norm() - u.min_on(cone.a, cone.b)) / (1.0 - cone.c)
        u = u.with_values(u.values + shift * (1 + 1e-12))
    elif margin < 0:
        u = u.with_values(np.full_like(u.values, u.sup_norm()))
    scale = rng.uniform(0.1, 10.0) / u.sup_norm()
    return u * scale


def cone_mapping_check(spec: ProblemSpec, n_random: int, seed: int = 0,
                       tol: float = 1e-10,
                       n_per_piece: int = None) -> ConeCheckReport:
    """Push seeded random cone elements through the operator and verify
    the images stay in the cone."""
    rng = np.random.default_rng(seed)
    report = ConeCheckReport(n_checked=n_random, tol=tol)
    for i in range(n_random):
        u = random_cone_element(spec, rng, n_per_piece)
        Tu = apply_T(spec, u)
        if not Tu.in_cone(spec.cone, tol):
            report.failures.append((i, Tu.cone_margin(spec.cone), Tu.sup_norm()))
    return report
