"""Independent shooting oracle for the impulsive boundary value problem.

Integrates  u'' + g(t) f(t,u) = 0  directly with classical fourth-order
Runge-Kutta between impulse times, applies the prescribed jumps

    u(tau+)  = u(tau-) + I(u(tau-)),
    u'(tau+) = u'(tau-) + I(u(tau-)) / (tau - 1),

and root-finds the two initial conditions (A, B) = (u(0), u'(0)) against
the nonlocal boundary residuals  r1 = u(1)  and  r2 = A - F[u]  with a
damped finite-difference Newton method.  Everything here is independent
of the integral-operator route, so agreement between the two solvers is
meaningful evidence.

Mesh nodes are forced onto the boundary-measure atom locations (the
functional then reads exact nodal values) and onto declared weight and
density breakpoints.  The nonlinearity is extended below u = 0 by its
value at 0, which only affects non-solution trial trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .hammerstein import ProblemSpec
from .pcfun import PCFunction

__all__ = ["Trajectory", "ShootResult", "integrate_ivp", "boundary_residuals",
           "solve_shooting", "crosscheck", "default_guesses"]

DEFAULT_STEPS = 2048
RESIDUAL_TOL = 1e-10
NEG_SLACK = 1e-9
FD_STEP = 1e-6


@dataclass
class Trajectory:
    u: PCFunction
    du: PCFunction

    @property
    def end_value(self) -> float:
        return float(self.u.values[-1])


def _piece_meshes(spec: ProblemSpec, n_steps: int) -> List[np.ndarray]:
    """Per continuity piece, step nodes with forced interior points at the
    boundary atoms and declared breakpoints; fixed step per segment."""
    forced = {loc for loc, _ in spec.boundary.dA.atoms}
    forced.update(getattr(spec.g, "breakpoints", ()))
    dens = spec.boundary.dA.density
    if dens is not None:
        forced.update(dens.breakpoints)
    bounds = [0.0, *spec.jumps, 1.0]
    meshes = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        inner = sorted(x for x in forced if lo < x < hi)
        edges = [lo, *inner, hi]
        width = hi - lo
        nodes = [np.array([lo])]
        for a, b in zip(edges[:-1], edges[1:]):
            n = max(1, int(round(n_steps * (b - a) / width)))
            nodes.append(np.linspace(a, b, n + 1)[1:])
        meshes.append(np.concatenate(nodes))
    return meshes


def integrate_ivp(spec: ProblemSpec, A: float, B: float,
                  n_steps: int = DEFAULT_STEPS) -> Trajectory:
    """RK4 on (u, u') from u(0)=A, u'(0)=B, jumps applied at each impulse."""
    g = spec.g
    f = spec.f

    def rhs(t: float, u: float) -> float:
        return -float(g(t)) * float(f(t, max(u, 0.0)))

    meshes = _piece_meshes(spec, n_steps)
    grid_parts, u_parts, du_parts = [], [], []
    u, v = float(A), float(B)
    for piece, mesh in enumerate(meshes):
        us = np.empty_like(mesh)
        vs = np.empty_like(mesh)
        us[0], vs[0] = u, v
        for i in range(mesh.size - 1):
            t, h = mesh[i], mesh[i + 1] - mesh[i]
            k1u, k1v = v, rhs(t, u)
            k2u, k2v = v + 0.5 * h * k1v, rhs(t + 0.5 * h, u + 0.5 * h * k1u)
            k3u, k3v = v + 0.5 * h * k2v, rhs(t + 0.5 * h, u + 0.5 * h * k2u)
            k4u, k4v = v + h * k3v, rhs(t + h, u + h * k3u)
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            if not (math.isfinite(u) and math.isfinite(v)):
                raise FloatingPointError(
                    f"trajectory left the finite range near t={mesh[i + 1]:.6g}")
            us[i + 1], vs[i + 1] = u, v
        grid_parts.append(mesh)
        u_parts.append(us)
        du_parts.append(vs)
        if piece < len(spec.impulses):
            imp = spec.impulses[piece]
            jump = float(imp.fn(u))
            u = u + jump
            v = v + jump / (imp.tau - 1.0)
    grid = np.concatenate(grid_parts)
    return Trajectory(
        u=PCFunction(grid, np.concatenate(u_parts), spec.jumps),
        du=PCFunction(grid, np.concatenate(du_parts), spec.jumps),
    )


def boundary_residuals(spec: ProblemSpec, A: float, B: float,
                       n_steps: int = DEFAULT_STEPS) -> Tuple[float, float, Trajectory]:
    """(u(1), A - F[u]) for the trajectory from (A, B)."""
    traj = integrate_ivp(spec, A, B, n_steps)
    r1 = traj.end_value
    r2 = float(A) - spec.boundary(traj.u)
    return r1, r2, traj


@dataclass
class ShootResult:
    success: bool
    trajectory: Optional[Trajectory]
    A: float
    B: float
    residual_norm: float
    message: str
    attempts: List[tuple] = field(default_factory=list)  # (A0, B0, outcome)

    @property
    def u(self) -> Optional[PCFunction]:
        return self.trajectory.u if self.trajectory else None

    def __str__(self):
        state = "converged" if self.success else "failed"
        return (f"shooting {state}: A={self.A:.8g}, B={self.B:.8g}, "
                f"boundary residual {self.residual_norm:.3e}")


def _newton_2d(spec, A, B, n_steps, tol, max_iter=40):
    rA, rB, traj = boundary_residuals(spec, A, B, n_steps)
    for _ in range(max_iter):
        norm = max(abs(rA), abs(rB))
        if norm <= tol:
            return A, B, traj, norm, True
        hA = FD_STEP * max(1.0, abs(A))
        hB = FD_STEP * max(1.0, abs(B))
        rA1, rB1, _ = boundary_residuals(spec, A + hA, B, n_steps)
        rA2, rB2, _ = boundary_residuals(spec, A, B + hB, n_steps)
        J = np.array([[(rA1 - rA) / hA, (rA2 - rA) / hB],
                      [(rB1 - rB) / hA, (rB2 - rB) / hB]])
        try:
            dA, dB = np.linalg.solve(J, np.array([rA, rB]))
        except np.linalg.LinAlgError:
            return A, B, traj, norm, False
        lam = 1.0
        while lam >= 2.0 ** -16:
            try:
                tA, tB, ttraj = boundary_residuals(spec, A - lam * dA,
                                                   B - lam * dB, n_steps)
            except FloatingPointError:
                lam *= 0.5
                continue
            if max(abs(tA), abs(tB)) < norm * (1.0 - 0.25 * lam) + 1e-15:
                A, B = A - lam * dA, B - lam * dB
                rA, rB, traj = tA, tB, ttraj
                break
            lam *= 0.5
        else:
            return A, B, traj, norm, False
    return A, B, traj, max(abs(rA), abs(rB)), max(abs(rA), abs(rB)) <= tol


def solve_shooting(spec: ProblemSpec, guesses: Sequence[Tuple[float, float]],
                   n_steps: int = DEFAULT_STEPS,
                   tol: float = RESIDUAL_TOL) -> ShootResult:
    """Damped Newton from each (A, B) guess; a root must also keep the
    trajectory above -1e-9 to count as a positive solution."""
    attempts = []
    for A0, B0 in guesses:
        try:
            A, B, traj, norm, ok = _newton_2d(spec, float(A0), float(B0),
                                              n_steps, tol)
        except FloatingPointError as err:
            attempts.append((A0, B0, f"blow-up: {err}"))
            continue
        if not ok:
            attempts.append((A0, B0, f"stalled at residual {norm:.3e}"))
            continue
        if float(np.min(traj.u.values)) < -NEG_SLACK:
            attempts.append((A0, B0, "converged to a sign-changing trajectory"))
            continue
        return ShootResult(True, traj, A, B, norm,
                           "boundary residuals met", attempts)
    return ShootResult(False, None, math.nan, math.nan, math.inf,
                       f"all {len(attempts)} guesses failed", attempts)


def default_guesses(spec: ProblemSpec, solution: Optional[PCFunction] = None,
                    rho_hi: float = 10.0) -> List[Tuple[float, float]]:
    """Informed guess from an integral-equation solution when available
    (value and one-sided slope at 0), then a coarse (A, B) grid."""
    guesses: List[Tuple[float, float]] = []
    if solution is not None:
        A = solution.eval(0.0)
        t1 = float(solution.grid[1])
        B = (solution.eval(t1) - A) / t1 if t1 > 0 else 0.0
        guesses.append((A, B))
    for A in np.linspace(0.0, rho_hi, 5):
        for B in np.linspace(-10.0, 10.0, 5):
            guesses.append((float(A), float(B)))
    return guesses


def crosscheck(u1: PCFunction, u2: PCFunction) -> float:
    """Sup-norm of the difference on the common grid refinement, with
    one-sided comparison at the union of the jump points."""
    jumps = sorted(set(u1.jumps) | set(u2.jumps))
    grid = np.union1d(u1.grid, u2.grid)
    smooth = ~np.isin(grid, jumps)
    diff = np.abs(u1(grid[smooth]) - u2(grid[smooth]))
    worst = float(np.max(diff)) if diff.size else 0.0
    for j in jumps:
        for side in ("left", "right"):
            worst = max(worst, abs(u1.eval(j, side) - u2.eval(j, side)))
    return worst
