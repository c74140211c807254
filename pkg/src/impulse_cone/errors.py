"""Exception types shared across the package."""


class InvalidSpecError(ValueError):
    """Problem data fails a structural validation rule."""


class ExprSyntaxError(ValueError):
    """Malformed expression source.

    Carries the byte offset of the offending token and a description of
    what was expected there.
    """

    def __init__(self, message: str, offset: int, expected: str = ""):
        self.offset = offset
        self.expected = expected
        detail = f"syntax error at offset {offset}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class EvalDomainError(ArithmeticError):
    """Evaluation left the real domain (log of non-positive, sqrt of
    negative, fractional power of a negative base, division by zero)."""


class UnboundVariableError(LookupError):
    """A variable in the expression has no binding."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class QuadratureAccuracyError(RuntimeError):
    """Adaptive quadrature hit its recursion limit before reaching the
    requested tolerance.  Carries the best estimate and an error bound."""

    def __init__(self, best: float, error_bound: float, tol: float):
        self.best = best
        self.error_bound = error_bound
        self.tol = tol
        super().__init__(
            f"quadrature did not reach tol={tol:g}: best estimate {best!r}, "
            f"estimated error {error_bound:g}"
        )


class DegenerateProblemError(ValueError):
    """A quantity that must be positive (e.g. the supremum defining 1/m)
    vanished, so the problem data is degenerate."""


class GammaBoundError(ValueError):
    """The index-1 inequality was requested with Gamma >= 1, where its
    derivation is invalid."""

    def __init__(self, gamma: float):
        self.gamma = gamma
        super().__init__(
            f"index-1 check requires Gamma < 1, got Gamma = {gamma!r}; "
            "the upper boundary measure is too heavy"
        )
