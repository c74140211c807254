"""Problem-file loading (TOML).

A problem file has sections [problem], [kernel], [boundary],
[[impulses]], [cone] and [numerics]; all functions are expression
strings.  Schema::

    [problem]
    f = "u^2"                # nonlinearity f(t,u), variables in {t, u}
    g = "1"                  # weight, single variable s (or t)
    g_breakpoints = []       # optional discontinuity/kink locations of g

    [kernel]
    type = "dirichlet"       # builtin second-order two-point kernel
    # type = "custom" additionally takes:
    # k_lower = "s*(1-t)"    # kernel value for s <= kink(t)
    # k_upper = "t*(1-s)"    # kernel value for s >  kink(t)
    # kink = "t"             # kink location in s as a function of t
    # gamma = "1-t"          # boundary profile
    # phi = "s*(1-s)"        # majorant
    # c1 = 0.25              # window lower-bound constants (audited)
    # c2 = 0.25

    [boundary]
    A0 = 0.0
    atoms = [[0.5, 0.8]]     # [location, weight] pairs of the measure
    # density = "1"          # optional density expression in s
    # density_breakpoints = []

    [[impulses]]             # one block per impulse, ordered by tau
    tau = 0.2
    I = "x/2"                # jump function, variable x
    delta1 = 0.5             # envelope delta1*x <= I(x) <= delta2*x
    delta2 = 0.5

    [cone]
    a = 0.25
    b = 0.75
    # c = 0.25               # optional, defaults to min(c1, c2)

    [numerics]               # all optional, defaults shown
    nodes_per_piece = 257
    quad_tol = 1e-11
    solve_tol = 1e-9
    damping = 0.5
    max_iter = 10000
    n_starts = 8
    shoot_steps = 2048
    seed = 0
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import expr
from .errors import InvalidSpecError
from .hammerstein import Impulse, ProblemSpec
from .kernel import KernelSpec, builtin_dirichlet
from .measure import BoundaryFunctional, StieltjesMeasure
from .pcfun import ConeParams
from .quad import PiecewiseFn

__all__ = ["Numerics", "LoadedProblem", "load_problem", "loads_problem"]


@dataclass(frozen=True)
class Numerics:
    nodes_per_piece: int = 257
    quad_tol: float = 1e-11
    solve_tol: float = 1e-9
    damping: float = 0.5
    max_iter: int = 10_000
    n_starts: int = 8
    shoot_steps: int = 2048
    seed: int = 0


@dataclass
class LoadedProblem:
    spec: ProblemSpec
    numerics: Numerics
    path: Optional[str] = None


def _require(table: dict, key: str, section: str):
    if key not in table:
        raise InvalidSpecError(f"problem file: [{section}] is missing {key!r}")
    return table[key]


def _parse_checked(source, allowed: set, what: str) -> expr.Expr:
    if not isinstance(source, str):
        raise InvalidSpecError(f"problem file: {what} must be an expression string")
    tree = expr.parse(source)
    stray = expr.free_vars(tree) - allowed
    if stray:
        raise InvalidSpecError(
            f"problem file: {what} uses variables {sorted(stray)}; "
            f"allowed: {sorted(allowed)}")
    return tree


def _weight_fn(problem: dict) -> PiecewiseFn:
    source = _require(problem, "g", "problem")
    tree = _parse_checked(source, {"s", "t"}, "weight g")
    fv = expr.free_vars(tree)
    if len(fv) > 1:
        raise InvalidSpecError(
            "problem file: weight g must use a single variable, s or t")
    var = fv.pop() if fv else "s"
    breaks = tuple(float(x) for x in problem.get("g_breakpoints", ()))
    if any(not 0.0 < x < 1.0 for x in breaks):
        raise InvalidSpecError("problem file: g_breakpoints must lie in (0, 1)")
    return PiecewiseFn(expr.compile_fn(tree, (var,), vector=True), breaks)


def _custom_kernel(kern: dict) -> KernelSpec:
    lower = _parse_checked(_require(kern, "k_lower", "kernel"), {"t", "s"}, "k_lower")
    upper = _parse_checked(_require(kern, "k_upper", "kernel"), {"t", "s"}, "k_upper")
    kink = _parse_checked(_require(kern, "kink", "kernel"), {"t"}, "kink")
    gamma = _parse_checked(_require(kern, "gamma", "kernel"), {"t"}, "gamma")
    phi = _parse_checked(_require(kern, "phi", "kernel"), {"s"}, "phi")
    c1 = float(_require(kern, "c1", "kernel"))
    c2 = float(_require(kern, "c2", "kernel"))
    k_lo = expr.compile_fn(lower, ("t", "s"), vector=True)
    k_hi = expr.compile_fn(upper, ("t", "s"), vector=True)
    kink_v = expr.compile_fn(kink, ("t",), vector=True)
    kink_s = expr.compile_fn(kink, ("t",), vector=False)

    def k(t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        return np.where(s <= kink_v(t), k_lo(t, s), k_hi(t, s))

    def kinks(t):
        x = kink_s(float(t))
        return (float(x),) if 0.0 < x < 1.0 else ()

    return KernelSpec(
        k=k,
        gamma=expr.compile_fn(gamma, ("t",), vector=True),
        phi=expr.compile_fn(phi, ("s",), vector=True),
        c1=c1, c2=c2, kinks=kinks, name="custom")


def _boundary(table: dict) -> BoundaryFunctional:
    A0 = float(table.get("A0", 0.0))
    atoms = []
    for pair in table.get("atoms", ()):
        if len(pair) != 2:
            raise InvalidSpecError(
                "problem file: boundary atoms must be [location, weight] pairs")
        atoms.append((float(pair[0]), float(pair[1])))
    density = None
    if "density" in table:
        tree = _parse_checked(table["density"], {"s"}, "boundary density")
        breaks = tuple(float(x) for x in table.get("density_breakpoints", ()))
        density = PiecewiseFn(expr.compile_fn(tree, ("s",), vector=True), breaks)
    return BoundaryFunctional(A0, StieltjesMeasure(tuple(atoms), density))


def _impulses(blocks) -> tuple:
    if not blocks:
        raise InvalidSpecError(
            "problem file: at least one [[impulses]] block is required "
            "(use delta1 = delta2 = 0 and I = \"0\" for the continuous problem)")
    out = []
    for blk in blocks:
        tau = float(_require(blk, "tau", "impulses"))
        source = _require(blk, "I", "impulses")
        tree = _parse_checked(source, {"x"}, f"impulse at {tau}")
        out.append(Impulse(
            tau=tau,
            fn=expr.compile_fn(tree, ("x",), vector=False),
            delta1=float(_require(blk, "delta1", "impulses")),
            delta2=float(_require(blk, "delta2", "impulses")),
            source=source,
        ))
    return tuple(out)


def loads_problem(text: str, path: Optional[str] = None) -> LoadedProblem:
    """Parse problem-file text; raises InvalidSpecError / ExprSyntaxError
    on schema or expression problems."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise InvalidSpecError(f"problem file: TOML parse error: {err}") from None

    problem = data.get("problem")
    if problem is None:
        raise InvalidSpecError("problem file: [problem] section is required")
    f_tree = _parse_checked(_require(problem, "f", "problem"), {"t", "u"},
                            "nonlinearity f")
    g = _weight_fn(problem)

    cone_tbl = data.get("cone")
    if cone_tbl is None:
        raise InvalidSpecError("problem file: [cone] section is required")
    a = float(_require(cone_tbl, "a", "cone"))
    b = float(_require(cone_tbl, "b", "cone"))

    kern = data.get("kernel", {"type": "dirichlet"})
    ktype = kern.get("type", "dirichlet")
    if ktype == "dirichlet":
        ks = builtin_dirichlet((a, b))
    elif ktype == "custom":
        ks = _custom_kernel(kern)
    else:
        raise InvalidSpecError(f"problem file: unknown kernel type {ktype!r}")

    c = float(cone_tbl.get("c", ks.cone_ratio()))
    cone = ConeParams(a, b, c)

    spec = ProblemSpec(
        f=expr.compile_fn(f_tree, ("t", "u"), vector=True),
        g=g,
        impulses=_impulses(data.get("impulses", ())),
        boundary=_boundary(data.get("boundary", {})),
        kernel=ks,
        cone=cone,
        f_source=problem["f"],
        g_source=problem["g"],
    )

    num_tbl = data.get("numerics", {})
    defaults = Numerics()
    unknown = set(num_tbl) - set(defaults.__dataclass_fields__)
    if unknown:
        raise InvalidSpecError(
            f"problem file: unknown [numerics] keys {sorted(unknown)}")
    numerics = Numerics(**{k: type(getattr(defaults, k))(v)
                           for k, v in num_tbl.items()})
    if numerics.nodes_per_piece < 2 or numerics.max_iter < 1:
        raise InvalidSpecError("problem file: bad [numerics] sizes")
    if not 0.0 < numerics.damping <= 1.0:
        raise InvalidSpecError("problem file: damping must lie in (0, 1]")
    return LoadedProblem(spec=spec, numerics=numerics, path=path)


def load_problem(path) -> LoadedProblem:
    """Load a problem file from disk."""
    text = Path(path).read_text(encoding="utf-8")
    return loads_problem(text, str(path))
