"""Piecewise-continuous functions on [0,1] and cone membership.

A :class:`PCFunction` is continuous except at finitely many interior
jump points, where left and right limits both exist.  The nodal
representation is piecewise linear: every jump point appears twice in
the grid (left node then right node), so sup-norms and window minima are
exact finite maxima and solver unknowns are plain vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidSpecError

__all__ = ["PCFunction", "ConeParams", "default_grid"]

DEFAULT_NODES_PER_PIECE = 257


def default_grid(jumps: Sequence[float] = (), n_per_piece: int = DEFAULT_NODES_PER_PIECE) -> np.ndarray:
    """Uniform nodes per continuity piece; each jump becomes a double node."""
    if n_per_piece < 2:
        raise ValueError("need at least 2 nodes per piece")
    bounds = [0.0, *jumps, 1.0]
    pieces = [np.linspace(lo, hi, n_per_piece)
              for lo, hi in zip(bounds[:-1], bounds[1:])]
    return np.concatenate(pieces)


class PCFunction:
    """Piecewise-linear function with double nodes at its jump points."""

    __slots__ = ("jumps", "grid", "values", "_bounds", "_left_idx", "_right_idx")

    def __init__(self, grid, values, jumps: Sequence[float] = ()):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid[0] != 0.0 or grid[-1] != 1.0:
            raise ValueError("grid must span [0, 1]")
        if np.any(np.diff(grid) < 0):
            raise ValueError("grid must be sorted")
        jumps = tuple(float(j) for j in jumps)
        if any(not 0.0 < j < 1.0 for j in jumps):
            raise ValueError("jump points must lie in (0,1)")
        if list(jumps) != sorted(set(jumps)):
            raise ValueError("jump points must be strictly increasing")
        left_idx, right_idx = [], []
        for j in jumps:
            lo = int(np.searchsorted(grid, j, side="left"))
            hi = int(np.searchsorted(grid, j, side="right"))
            if hi - lo != 2:
                raise ValueError(f"jump point {j} must appear exactly twice in the grid")
            left_idx.append(lo)
            right_idx.append(lo + 1)
        self.jumps = jumps
        self.grid = grid
        self.values = values
        self._bounds = (0.0, *jumps, 1.0)
        self._left_idx = tuple(left_idx)
        self._right_idx = tuple(right_idx)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_callable(cls, fn: Callable, jumps: Sequence[float] = (),
                      n_per_piece: int = DEFAULT_NODES_PER_PIECE) -> "PCFunction":
        grid = default_grid(jumps, n_per_piece)
        try:
            values = np.asarray(fn(grid), dtype=float)
            if values.shape != grid.shape:
                raise TypeError
        except (TypeError, ValueError):
            values = np.array([float(fn(t)) for t in grid])
        return cls(grid, values, jumps)

    @classmethod
    def constant(cls, value: float, jumps: Sequence[float] = (),
                 n_per_piece: int = DEFAULT_NODES_PER_PIECE) -> "PCFunction":
        grid = default_grid(jumps, n_per_piece)
        return cls(grid, np.full_like(grid, float(value)), jumps)

    def with_values(self, values) -> "PCFunction":
        return PCFunction(self.grid, values, self.jumps)

    # -- evaluation --------------------------------------------------------

    def eval(self, t: float, side: str = "default") -> float:
        """Piecewise-linear value; one-sided at jump points (default = left)."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"evaluation point {t} outside [0, 1]")
        if side not in ("default", "left", "right"):
            raise ValueError(f"bad side {side!r}")
        for j, li, ri in zip(self.jumps, self._left_idx, self._right_idx):
            if t == j:
                return float(self.values[ri if side == "right" else li])
        return float(np.interp(t, self.grid, self.values))

    def __call__(self, ts):
        """Vectorized evaluation; meant for points that are not jump
        abscissae (exactly at a jump, np.interp picks the right node).
        Use :meth:`eval` for one-sided values at jumps."""
        return np.interp(ts, self.grid, self.values)

    def jump(self, tau: float) -> float:
        """Jump size (right limit minus left limit) at the jump point tau."""
        for j, li, ri in zip(self.jumps, self._left_idx, self._right_idx):
            if j == tau:
                return float(self.values[ri] - self.values[li])
        raise ValueError(f"{tau} is not a jump point of this function")

    # -- norms and cone tests ----------------------------------------------

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_on(self, a: float, b: float) -> float:
        """Minimum over the window [a,b], which must not contain a jump."""
        if not (0.0 <= a < b <= 1.0):
            raise ValueError(f"bad window [{a}, {b}]")
        if any(a <= j <= b for j in self.jumps):
            raise InvalidSpecError(f"window [{a}, {b}] contains a jump point")
        inside = (self.grid >= a) & (self.grid <= b)
        candidates = [self.eval(a), self.eval(b)]
        if np.any(inside):
            candidates.append(float(np.min(self.values[inside])))
        return min(candidates)

    def in_cone(self, params: "ConeParams", tol: float = 0.0) -> bool:
        """Nonnegative everywhere and min over [a,b] >= c * sup norm."""
        if float(np.min(self.values)) < -tol:
            return False
        return self.min_on(params.a, params.b) >= params.c * self.sup_norm() - tol

    def cone_margin(self, params: "ConeParams") -> float:
        """min over [a,b] minus c * sup norm (negative outside the cone)."""
        return self.min_on(params.a, params.b) - params.c * self.sup_norm()

    # -- arithmetic on a shared grid ----------------------------------------

    def _compatible(self, other: "PCFunction"):
        if self.jumps != other.jumps or not np.array_equal(self.grid, other.grid):
            raise ValueError("PCFunctions live on different grids")

    def __add__(self, other):
        self._compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._compatible(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    # -- export -------------------------------------------------------------

    def rows(self):
        """(t, side, value) rows; side is 'L'/'R' at jump nodes, '' elsewhere."""
        sides = [""] * len(self.grid)
        for li, ri in zip(self._left_idx, self._right_idx):
            sides[li] = "L"
            sides[ri] = "R"
        for t, s, v in zip(self.grid, sides, self.values):
            yield float(t), s, float(v)

    def __repr__(self):
        return (f"PCFunction({len(self.grid)} nodes, jumps={list(self.jumps)}, "
                f"sup={self.sup_norm():.6g})")


@dataclass(frozen=True)
class ConeParams:
    """Cone window [a,b] and lower-bound ratio c: membership means
    u >= 0 on [0,1] and min over [a,b] of u >= c * sup norm of u."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.a < self.b < 1.0:
            raise InvalidSpecError(f"cone window [{self.a}, {self.b}] must satisfy 0 < a < b < 1")
        if not 0.0 < self.c <= 1.0:
            raise InvalidSpecError(f"cone ratio c={self.c} must lie in (0, 1]")
