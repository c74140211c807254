"""Index conditions and the existence hypotheses built from them.

Two scalar inequalities drive everything:

  index-1 at rho:  A0*||gamma|| / ((1-Gamma) rho)
                   + fsup(rho) * ( ||gamma|| * intKg / (1-Gamma) + 1/m )  <= 1,
  index-0 at rho:  c2 * ||gamma|| * alpha0(rho) + finf(rho) / M(a,b)      >= 1,

with fsup/finf the (sampled or asserted) nonlinearity bounds.  A
positive solution is certified when some rho1 < rho2 satisfies index-1
at rho1 and index-0 at rho2 (verdict H1), or some rho1 < c*rho2
satisfies index-0 at rho1 and index-1 at rho2 (verdict H2).  The
index-1 inequality is meaningless when Gamma >= 1 and is refused.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import constants as _constants
from .errors import GammaBoundError

__all__ = ["IndexCheck", "HVerdict", "ConditionReport",
           "check_I1", "check_I0", "check_pair", "find_H", "DEFAULT_RHO_GRID"]

VERDICT_TOL = 1e-12
MARGINAL_BAND = 1e-6
DEFAULT_RHO_GRID = tuple(np.geomspace(1e-3, 1e3, 25))

STANDING_NOTE = (
    "standing hypothesis: the index arguments assume no fixed point lies "
    "exactly on the comparison boundaries; that case is benign (such a "
    "point is itself a solution)")


@dataclass(frozen=True)
class IndexCheck:
    """One inequality evaluated at one radius."""

    kind: str                # "index1" or "index0"
    rho: float
    lhs: float
    holds: bool
    marginal: bool           # |lhs - 1| within the sampling noise band
    f_bound: float
    f_bound_source: str      # "sampled" or "asserted"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "rho": self.rho, "lhs": self.lhs,
            "holds": self.holds, "marginal": self.marginal,
            "f_bound": self.f_bound, "f_bound_source": self.f_bound_source,
        }


@dataclass(frozen=True)
class HVerdict:
    """A certified hypothesis pair."""

    kind: str                # "H1" or "H2"
    rho1: float
    rho2: float
    first: IndexCheck
    second: IndexCheck

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rho1": self.rho1, "rho2": self.rho2,
                "first": self.first.to_dict(), "second": self.second.to_dict()}


@dataclass
class ConditionReport:
    """All computed constants plus inequality outcomes and the verdict."""

    constants: _constants.ProblemConstants
    thresholds: dict
    index1: List[IndexCheck] = field(default_factory=list)
    index0: List[IndexCheck] = field(default_factory=list)
    verdict: Optional[HVerdict] = None
    notes: List[str] = field(default_factory=lambda: [STANDING_NOTE])

    @property
    def certified(self) -> bool:
        return self.verdict is not None

    def to_dict(self) -> dict:
        return {
            "constants": self.constants.to_dict(),
            "thresholds": dict(self.thresholds),
            "index1": [c.to_dict() for c in self.index1],
            "index0": [c.to_dict() for c in self.index0],
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "notes": list(self.notes),
        }


def check_I1(spec, rho: float, f_bound: float = None) -> IndexCheck:
    """Index-1 inequality at rho; refuses when Gamma >= 1."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    an = spec.analysis()
    pc = an.constants
    if pc.Gamma >= 1.0:
        raise GammaBoundError(pc.Gamma)
    source = "asserted" if f_bound is not None else "sampled"
    fs = f_bound if f_bound is not None else _constants.f_sup(spec.f, rho)
    lhs = pc.A0 * pc.norm_gamma / ((1.0 - pc.Gamma) * rho) + fs * pc.i1_coefficient()
    return IndexCheck("index1", rho, lhs, lhs <= 1.0 + VERDICT_TOL,
                      abs(lhs - 1.0) < MARGINAL_BAND, fs, source)


def check_I0(spec, rho: float, f_bound: float = None) -> IndexCheck:
    """Index-0 inequality at rho."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    an = spec.analysis()
    pc = an.constants
    source = "asserted" if f_bound is not None else "sampled"
    fi = f_bound if f_bound is not None else _constants.f_inf(
        spec.f, rho, pc.c, an.window[0], an.window[1])
    lhs = an.c2 * pc.norm_gamma * an.alpha0(rho) + fi / pc.M
    return IndexCheck("index0", rho, lhs, lhs >= 1.0 - VERDICT_TOL,
                      abs(lhs - 1.0) < MARGINAL_BAND, fi, source)


def _report(spec) -> ConditionReport:
    an = spec.analysis()
    return ConditionReport(constants=an.constants, thresholds=an.thresholds())


def check_pair(spec, rho1: float, rho2: float,
               f_sup_bound: float = None, f_inf_bound: float = None) -> ConditionReport:
    """Evaluate one explicit (rho1, rho2) pair, trying H1 then H2."""
    report = _report(spec)
    c = spec.cone.c
    i1_at_1 = check_I1(spec, rho1, f_sup_bound)
    i0_at_2 = check_I0(spec, rho2, f_inf_bound)
    report.index1.append(i1_at_1)
    report.index0.append(i0_at_2)
    if rho1 < rho2 and i1_at_1.holds and i0_at_2.holds:
        report.verdict = HVerdict("H1", rho1, rho2, i1_at_1, i0_at_2)
        return report
    i0_at_1 = check_I0(spec, rho1, f_inf_bound)
    i1_at_2 = check_I1(spec, rho2, f_sup_bound)
    report.index0.insert(0, i0_at_1)
    report.index1.append(i1_at_2)
    if rho1 < c * rho2 and i0_at_1.holds and i1_at_2.holds:
        report.verdict = HVerdict("H2", rho1, rho2, i0_at_1, i1_at_2)
    return report


def find_H(spec, rho_grid: Sequence[float] = None) -> ConditionReport:
    """Scan a radius grid for the first certified hypothesis pair.

    Pairs are scanned lexicographically (rho1 ascending, then rho2), H1
    checked before H2 at each pair.  Returns an uncertified report when
    no pair on the grid works or when Gamma >= 1 blocks the index-1 side.
    """
    rhos = [float(r) for r in (rho_grid if rho_grid is not None else DEFAULT_RHO_GRID)]
    if any(r <= 0 for r in rhos) or sorted(rhos) != rhos:
        raise ValueError("rho grid must be positive and increasing")
    report = _report(spec)
    c = spec.cone.c
    if report.constants.Gamma >= 1.0:
        report.notes.append(
            f"Gamma = {report.constants.Gamma:.6g} >= 1: the index-1 "
            "inequality is unavailable, no hypothesis can be certified")
        report.index0.extend(check_I0(spec, r) for r in rhos)
        return report
    i1 = [check_I1(spec, r) for r in rhos]
    i0 = [check_I0(spec, r) for r in rhos]
    report.index1.extend(i1)
    report.index0.extend(i0)
    for i, r1 in enumerate(rhos):
        for j, r2 in enumerate(rhos):
            if r1 < r2 and i1[i].holds and i0[j].holds:
                report.verdict = HVerdict("H1", r1, r2, i1[i], i0[j])
                return report
            if r1 < c * r2 and i0[i].holds and i1[j].holds:
                report.verdict = HVerdict("H2", r1, r2, i0[i], i1[j])
                return report
    return report
