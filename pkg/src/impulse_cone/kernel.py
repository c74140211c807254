"""Integral kernels, boundary profiles and their cone constants.

A :class:`KernelSpec` carries the kernel k(t,s), the boundary profile
gamma(t), a majorant phi(s) with the two-sided bounds

    k(t,s) <= phi(s)          on [0,1] x [0,1],
    k(t,s) >= c1 * phi(s)     for t in the cone window [a,b],
    gamma(t) >= c2 * ||gamma||  for t in [a,b],

plus the kink locus of s -> k(t,s) so quadrature can split panels there.
The Dirichlet-type instance (second-order two-point problem) is built
in; user-supplied kernels declare their own constants and are audited
numerically by :func:`verify_bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import InvalidSpecError
from .pcfun import ConeParams

__all__ = ["KernelSpec", "SeparableParts", "builtin_dirichlet",
           "verify_bounds", "KernelAudit"]

MARGIN_TOL = 1e-12


@dataclass(frozen=True)
class SeparableParts:
    """Rank-one structure on each side of the diagonal:
    k(t,s) = lower_t(t) * lower_s(s) for s <= t, upper_t(t) * upper_s(s)
    for s > t.  Lets the operator assembly replace the full t x s double
    loop by two cumulative panel sums."""

    lower_t: Callable
    lower_s: Callable
    upper_t: Callable
    upper_s: Callable


@dataclass(frozen=True)
class KernelSpec:
    """Kernel data; k, gamma, phi are vectorized callables."""

    k: Callable
    gamma: Callable
    phi: Callable
    c1: float
    c2: float
    kinks: Callable = lambda t: ()
    name: str = "custom"
    separable: Optional[SeparableParts] = None

    def __post_init__(self):
        if not 0.0 < self.c1 <= 1.0:
            raise InvalidSpecError(f"kernel lower constant c1={self.c1} must lie in (0, 1]")
        if not 0.0 < self.c2 <= 1.0:
            raise InvalidSpecError(f"boundary profile constant c2={self.c2} must lie in (0, 1]")

    def cone_ratio(self) -> float:
        return min(self.c1, self.c2)


def _dirichlet_k(t, s):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.where(s <= t, s * (1.0 - t), t * (1.0 - s))


def builtin_dirichlet(window: Union[ConeParams, Tuple[float, float]]) -> KernelSpec:
    """Kernel of the second-order Dirichlet problem on [0,1]:
    k(t,s) = s(1-t) for s <= t and t(1-s) for s > t, gamma(t) = 1-t,
    phi(s) = s(1-s), with c1 = min(a, 1-b) and c2 = 1-b for the window."""
    a, b = (window.a, window.b) if isinstance(window, ConeParams) else window
    if not 0.0 < a < b < 1.0:
        raise InvalidSpecError(f"window [{a}, {b}] must satisfy 0 < a < b < 1")
    return KernelSpec(
        k=_dirichlet_k,
        gamma=lambda t: 1.0 - np.asarray(t, dtype=float),
        phi=lambda s: np.asarray(s, dtype=float) * (1.0 - np.asarray(s, dtype=float)),
        c1=min(a, 1.0 - b),
        c2=1.0 - b,
        kinks=lambda t: (float(t),) if 0.0 < t < 1.0 else (),
        name="dirichlet",
        separable=SeparableParts(
            lower_t=lambda t: 1.0 - np.asarray(t, dtype=float),
            lower_s=lambda s: np.asarray(s, dtype=float),
            upper_t=lambda t: np.asarray(t, dtype=float),
            upper_s=lambda s: 1.0 - np.asarray(s, dtype=float),
        ),
    )


@dataclass
class KernelAudit:
    """Worst-case sampled margins for the three kernel inequalities;
    a negative margin below tolerance is a violation."""

    passed: bool
    margin_upper: float       # min of phi(s) - k(t,s) over the full square
    margin_lower: float       # min of k(t,s) - c1*phi(s) for t in the window
    margin_gamma: float       # min of gamma(t) - c2*||gamma|| in the window
    witness_upper: Optional[Tuple[float, float]] = None
    witness_lower: Optional[Tuple[float, float]] = None
    witness_gamma: Optional[float] = None
    n_samples: int = 0

    def __str__(self):
        state = "pass" if self.passed else "FAIL"
        return (f"kernel audit [{state}] margins: upper {self.margin_upper:.3e}, "
                f"lower {self.margin_lower:.3e}, gamma {self.margin_gamma:.3e}")


def verify_bounds(ks: KernelSpec, params: ConeParams, n_samples: int = 101) -> KernelAudit:
    """Sample an n x n grid and report the worst violation margin of each
    of the three inequalities; passes iff all margins >= -1e-12."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples per axis")
    t_full = np.linspace(0.0, 1.0, n_samples)
    s_full = np.linspace(0.0, 1.0, n_samples)
    t_win = np.linspace(params.a, params.b, n_samples)

    phi_s = np.asarray(ks.phi(s_full), dtype=float)
    k_full = np.asarray(ks.k(t_full[:, None], s_full[None, :]), dtype=float)
    upper = phi_s[None, :] - k_full
    iu = np.unravel_index(np.argmin(upper), upper.shape)

    k_win = np.asarray(ks.k(t_win[:, None], s_full[None, :]), dtype=float)
    lower = k_win - ks.c1 * phi_s[None, :]
    il = np.unravel_index(np.argmin(lower), lower.shape)

    gamma_full = np.asarray(ks.gamma(t_full), dtype=float)
    gamma_win = np.asarray(ks.gamma(t_win), dtype=float)
    gam = gamma_win - ks.c2 * np.max(np.abs(gamma_full))
    ig = int(np.argmin(gam))

    margins = (float(upper[iu]), float(lower[il]), float(gam[ig]))
    return KernelAudit(
        passed=all(m >= -MARGIN_TOL for m in margins),
        margin_upper=margins[0],
        margin_lower=margins[1],
        margin_gamma=margins[2],
        witness_upper=(float(t_full[iu[0]]), float(s_full[iu[1]])),
        witness_lower=(float(t_win[il[0]]), float(s_full[il[1]])),
        witness_gamma=float(t_win[ig]),
        n_samples=n_samples,
    )
