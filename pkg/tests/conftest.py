import numpy as np

from impulse_cone import expr
from impulse_cone.hammerstein import Impulse, ProblemSpec
from impulse_cone.kernel import builtin_dirichlet
from impulse_cone.measure import BoundaryFunctional, StieltjesMeasure
from impulse_cone.pcfun import ConeParams

_FUNCS1 = ["sin", "cos", "exp", "abs", "sqrt"]


def compiled(src, args, vector=True):
    return expr.compile_fn(expr.parse(src), args, vector=vector)


def make_spec(f="u^2", g="1", impulses=((0.2, "x/2", 0.5, 0.5),),
              A0=0.0, atoms=((0.5, 0.8),), window=(0.25, 0.75), c=None):
    """Problem builder mirroring the production loading path."""
    ks = builtin_dirichlet(window)
    cone = ConeParams(window[0], window[1], c if c is not None else ks.cone_ratio())
    imps = tuple(
        Impulse(tau, compiled(src, ("x",), vector=False), d1, d2, source=src)
        for tau, src, d1, d2 in impulses)
    return ProblemSpec(
        f=compiled(f, ("t", "u")),
        g=compiled(g, ("s",)),
        impulses=imps,
        boundary=BoundaryFunctional(A0, StieltjesMeasure(atoms=tuple(atoms))),
        kernel=ks,
        cone=cone,
        f_source=f,
        g_source=g,
    )


def example_spec(**overrides):
    """The worked single-impulse example: tau=1/5, xi=1/2, alpha=4/5,
    delta=1/2, window [1/4, 3/4], f = u^2, I = x/2."""
    return make_spec(**overrides)


def two_impulse_spec(f="1 + u/2"):
    """Two impulses at 1/4 and 1/2 with I = x/2, window [0.6, 0.9]."""
    return make_spec(
        f=f,
        impulses=((0.25, "x/2", 0.5, 0.5), (0.5, "x/2", 0.5, 0.5)),
        atoms=(),
        window=(0.6, 0.9),
    )


def random_expr(rng: np.random.Generator, depth: int = 4) -> expr.Expr:
    """Random AST over a small variable pool; sqrt/log guarded by abs."""
    roll = rng.integers(0, 10)
    if depth <= 0 or roll < 3:
        kind = rng.integers(0, 3)
        if kind == 0:
            return expr.Num(float(np.round(rng.uniform(0, 10), 3)))
        if kind == 1:
            return expr.Var(str(rng.choice(["t", "u", "x", "s"])))
        return expr.Const(str(rng.choice(["pi", "e"])))
    if roll < 7:
        op = str(rng.choice(["+", "-", "*", "/", "^"]))
        left = random_expr(rng, depth - 1)
        right = random_expr(rng, depth - 1)
        if op == "^":
            # keep exponents small and integral so values stay finite
            right = expr.Num(float(rng.integers(0, 4)))
        return expr.BinOp(op, left, right)
    if roll < 8:
        return expr.Neg(random_expr(rng, depth - 1))
    name = str(rng.choice(_FUNCS1 + ["min", "max"]))
    if name in ("min", "max"):
        return expr.Call(name, (random_expr(rng, depth - 1),
                                random_expr(rng, depth - 1)))
    arg = random_expr(rng, depth - 1)
    if name == "sqrt":
        arg = expr.Call("abs", (arg,))
    return expr.Call(name, (arg,))
