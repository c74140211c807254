"""Breakpoint-aware adaptive quadrature on subintervals of [0,1].

Composite Gauss-Legendre of fixed order per panel, with panels split at
declared breakpoints and recursive bisection of any panel whose two-level
estimate disagrees.  Integrands must accept numpy arrays (elementwise);
everything in this package evaluates vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import QuadratureAccuracyError

__all__ = ["GAUSS_ORDER", "DEFAULT_TOL", "MAX_DEPTH",
           "PiecewiseFn", "integrate", "kernel_action", "gauss_panels"]

GAUSS_ORDER = 16
DEFAULT_TOL = 1e-11
MAX_DEPTH = 30

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


@dataclass(frozen=True)
class PiecewiseFn:
    """Callable bundled with its declared breakpoints, so quadrature
    panels never straddle a discontinuity or kink."""

    fn: Callable
    breakpoints: tuple = field(default_factory=tuple)

    def __call__(self, x):
        return self.fn(x)


def _gauss(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    x = lo + half * (_NODES + 1.0)
    return float(half * np.dot(_WEIGHTS, np.asarray(f(x), dtype=float)))


def _gauss_halves(f, lo: float, mid: float, hi: float):
    # both half-panels in a single integrand call
    h1 = 0.5 * (mid - lo)
    h2 = 0.5 * (hi - mid)
    x = np.concatenate([lo + h1 * (_NODES + 1.0), mid + h2 * (_NODES + 1.0)])
    y = np.asarray(f(x), dtype=float)
    return float(h1 * np.dot(_WEIGHTS, y[:GAUSS_ORDER])), \
        float(h2 * np.dot(_WEIGHTS, y[GAUSS_ORDER:]))


def _adapt(f, lo, hi, whole, tol, depth):
    """Returns (value, error_bound, converged)."""
    mid = 0.5 * (lo + hi)
    left, right = _gauss_halves(f, lo, mid, hi)
    two = left + right
    err = abs(two - whole)
    if err <= tol * (1.0 + abs(two)):
        return two, err, True
    if depth >= MAX_DEPTH:
        return two, err, False
    v1, e1, ok1 = _adapt(f, lo, mid, left, tol, depth + 1)
    v2, e2, ok2 = _adapt(f, mid, hi, right, tol, depth + 1)
    return v1 + v2, e1 + e2, ok1 and ok2


def integrate(f: Callable, lo: float, hi: float,
              breakpoints: Iterable[float] = (),
              tol: float = DEFAULT_TOL) -> float:
    """Integrate ``f`` over [lo, hi] with panels split at ``breakpoints``.

    Raises :class:`QuadratureAccuracyError` (carrying the best estimate
    and an error bound) if bisection to depth ``MAX_DEPTH`` cannot meet
    ``tol``.
    """
    if hi < lo:
        raise ValueError(f"inverted interval [{lo}, {hi}]")
    if hi == lo:
        return 0.0
    cuts = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo, *cuts, hi]
    values, errors, ok = [], [], True
    for a, b in zip(edges[:-1], edges[1:]):
        whole = _gauss(f, a, b)
        v, e, converged = _adapt(f, a, b, whole, tol, 0)
        values.append(v)
        errors.append(e)
        ok = ok and converged
    total = math.fsum(values)
    if not ok:
        raise QuadratureAccuracyError(total, math.fsum(errors), tol)
    return total


def gauss_panels(edges: np.ndarray):
    """Gauss nodes and weights for the composite rule on consecutive
    panels ``[edges[i], edges[i+1]]``; returns flat (nodes, weights).

    One fixed-order pass is exact when the integrand is smooth on every
    panel, which is how the operator assembly uses it (panel edges at
    every grid node).
    """
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = edges[:-1] + half
    nodes = mid[:, None] + half[:, None] * _NODES[None, :]
    weights = half[:, None] * _WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def kernel_action(ks, g, h, t: float, tol: float = DEFAULT_TOL) -> float:
    """Integral over s in [0,1] of k(t,s) * g(s) * h(s).

    Panel breakpoints come from the kernel's kink locus at this ``t``,
    ``g``'s declared breakpoints, and the jump points of ``h``.
    """
    breaks = list(ks.kinks(t))
    breaks.extend(getattr(g, "breakpoints", ()))
    breaks.extend(getattr(h, "jumps", ()))

    def integrand(s):
        return ks.k(t, s) * np.asarray(g(s), dtype=float) * np.asarray(h(s), dtype=float)

    return integrate(integrand, 0.0, 1.0, breaks, tol)
