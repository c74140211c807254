"""Lebesgue-Stieltjes measures on [0,1] and affine boundary functionals.

A measure is a finite list of nonnegative atoms plus an optional
nonnegative density with declared breakpoints.  Boundary functionals
have the affine form  F[u] = A0 + integral of u dA;  impulse terms enter
the existence analysis through Dirac augmentation of dA by weights
delta/(1-tau) at each impulse location.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from . import quad
from .errors import InvalidSpecError
from .pcfun import PCFunction

__all__ = ["StieltjesMeasure", "BoundaryFunctional", "total_mass",
           "integrate", "augment"]

ATOM_COLLISION_TOL = 1e-14


@dataclass(frozen=True)
class StieltjesMeasure:
    """Nonnegative atoms at strictly increasing locations in [0,1],
    plus an optional piecewise-continuous density."""

    atoms: Tuple[Tuple[float, float], ...] = ()
    density: Optional[quad.PiecewiseFn] = None

    def __post_init__(self):
        atoms = tuple((float(loc), float(w)) for loc, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        prev = -np.inf
        for loc, w in atoms:
            if not 0.0 <= loc <= 1.0:
                raise InvalidSpecError(f"atom location {loc} outside [0, 1]")
            if w < 0.0 or not np.isfinite(w):
                raise InvalidSpecError(f"atom weight {w} must be finite and >= 0")
            if loc - prev <= ATOM_COLLISION_TOL:
                raise InvalidSpecError(
                    f"atom locations must be strictly increasing; {loc} collides "
                    f"with {prev} (tolerance {ATOM_COLLISION_TOL:g})")
            prev = loc

    @property
    def is_empty(self) -> bool:
        return not self.atoms and self.density is None

    def atom_at(self, loc: float, tol: float = ATOM_COLLISION_TOL) -> bool:
        return any(abs(a - loc) <= tol for a, _ in self.atoms)

    def mass_on(self, a: float, b: float, tol: float = quad.DEFAULT_TOL) -> float:
        """Measure of the closed interval [a,b]."""
        total = sum(w for loc, w in self.atoms if a <= loc <= b)
        if self.density is not None:
            total += quad.integrate(self.density, a, b,
                                    self.density.breakpoints, tol)
        return total


def total_mass(m: StieltjesMeasure, tol: float = quad.DEFAULT_TOL) -> float:
    """Total mass: atom weights plus the integral of the density."""
    return m.mass_on(0.0, 1.0, tol)


def integrate(m: StieltjesMeasure, phi, side_rule: str = "left",
              tol: float = quad.DEFAULT_TOL) -> float:
    """Integral of phi against the measure.

    At atom locations where phi jumps, ``side_rule`` picks the one-sided
    value ('left' is the package-wide convention for functions of the
    solution space).  The density part is integrated with panels split
    at the density's breakpoints and phi's jump points.
    """
    if side_rule not in ("left", "right"):
        raise ValueError(f"bad side rule {side_rule!r}")
    total = 0.0
    if isinstance(phi, PCFunction):
        total += sum(w * phi.eval(loc, side_rule) for loc, w in m.atoms)
    else:
        total += sum(w * float(phi(loc)) for loc, w in m.atoms)
    if m.density is not None:
        dens = m.density
        breaks = list(dens.breakpoints)
        breaks.extend(getattr(phi, "jumps", ()))
        breaks.extend(getattr(phi, "breakpoints", ()))

        def integrand(s):
            return np.asarray(phi(s), dtype=float) * np.asarray(dens(s), dtype=float)

        total += quad.integrate(integrand, 0.0, 1.0, breaks, tol)
    return total


@dataclass(frozen=True)
class BoundaryFunctional:
    """Affine functional  u -> A0 + integral of u dA."""

    A0: float = 0.0
    dA: StieltjesMeasure = field(default_factory=StieltjesMeasure)

    def __post_init__(self):
        if self.A0 < 0.0 or not np.isfinite(self.A0):
            raise InvalidSpecError(f"constant term A0={self.A0} must be finite and >= 0")

    def __call__(self, u, tol: float = quad.DEFAULT_TOL) -> float:
        """Apply the functional; left-limit convention at jump points."""
        return self.A0 + integrate(self.dA, u, "left", tol)

    def check_clear_of(self, points: Iterable[float]):
        """The measure must have no atom at any of the given locations
        (continuity of the boundary data at the impulse points)."""
        for p in points:
            if self.dA.atom_at(p):
                raise InvalidSpecError(
                    f"boundary measure has an atom at the impulse location {p}")


def apply_functional(F: BoundaryFunctional, u, tol: float = quad.DEFAULT_TOL) -> float:
    return F(u, tol)


def augment(F: BoundaryFunctional, impulses: Sequence[Tuple[float, float]]) -> StieltjesMeasure:
    """dA plus a Dirac atom of weight delta/(1-tau) at each impulse time.

    Feeding the lower impulse slopes produces the measure for the
    index-0 side, the upper slopes the one for the index-1 side.  An
    impulse landing on an existing atom is a spec error; zero-weight
    impulses leave the measure unchanged.
    """
    extra = []
    for tau, delta in impulses:
        tau = float(tau)
        delta = float(delta)
        if not 0.0 < tau < 1.0:
            raise InvalidSpecError(f"impulse location {tau} outside (0, 1)")
        if delta < 0.0:
            raise InvalidSpecError(f"impulse slope {delta} must be >= 0")
        if F.dA.atom_at(tau):
            raise InvalidSpecError(
                f"impulse location {tau} collides with an atom of the boundary measure")
        if delta > 0.0:
            extra.append((tau, delta / (1.0 - tau)))
    if not extra:
        return F.dA
    merged = sorted(list(F.dA.atoms) + extra)
    return StieltjesMeasure(atoms=tuple(merged), density=F.dA.density)
