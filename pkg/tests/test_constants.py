import numpy as np
import pytest

from impulse_cone import constants, quad
from impulse_cone.errors import DegenerateProblemError, InvalidSpecError
from impulse_cone.kernel import builtin_dirichlet
from impulse_cone.measure import StieltjesMeasure
from impulse_cone.pcfun import ConeParams

ONE = lambda s: np.ones_like(np.asarray(s, dtype=float))
TWO = lambda s: 2.0 * np.ones_like(np.asarray(s, dtype=float))
ZERO = lambda s: np.zeros_like(np.asarray(s, dtype=float))

WINDOW = ConeParams(0.25, 0.75, 0.25)
KS = builtin_dirichlet(WINDOW)

# upper augmented measure of the worked example: boundary atom 4/5 at 1/2
# plus impulse atom (1/2)/(1-1/5) = 5/8 at 1/5
EXAMPLE_DA2 = StieltjesMeasure(atoms=((0.2, 0.625), (0.5, 0.8)))


def test_m_value():
    assert constants.compute_m(KS, ONE) == pytest.approx(8.0, abs=1e-9)
    assert constants.compute_m(KS, TWO) == pytest.approx(4.0, abs=1e-9)
    with pytest.raises(DegenerateProblemError):
        constants.compute_m(KS, ZERO)


def test_M_value():
    assert constants.compute_M(KS, ONE, 0.25, 0.75) == pytest.approx(16.0, abs=1e-9)
    assert constants.compute_M(KS, TWO, 0.25, 0.75) == pytest.approx(8.0, abs=1e-9)
    with pytest.raises(InvalidSpecError):
        constants.compute_M(KS, ONE, 0.5, 0.5)
    with pytest.raises(DegenerateProblemError):
        constants.compute_M(KS, ZERO, 0.25, 0.75)


def test_scaling_in_weight():
    lam = 3.7
    g_lam = lambda s: lam * ONE(s)
    assert constants.compute_m(KS, g_lam) == pytest.approx(8.0 / lam, rel=1e-10)
    assert constants.compute_M(KS, g_lam, 0.25, 0.75) == pytest.approx(16.0 / lam, rel=1e-10)


def test_gamma_values():
    assert constants.compute_Gamma(KS, EXAMPLE_DA2) == pytest.approx(0.9, abs=1e-12)
    assert constants.compute_Gamma(KS, StieltjesMeasure()) == 0.0
    heavy = StieltjesMeasure(atoms=((0.25, 2.0),))
    assert constants.compute_Gamma(KS, heavy) == pytest.approx(1.5, abs=1e-12)


def test_coupling_integral():
    got = constants.compute_K_g(KS, EXAMPLE_DA2, ONE)
    assert got == pytest.approx(0.15, abs=1e-12)
    assert constants.compute_K_g(KS, StieltjesMeasure(), ONE) == 0.0
    doubled = StieltjesMeasure(atoms=((0.2, 1.25), (0.5, 1.6)))
    assert constants.compute_K_g(KS, doubled, ONE) == pytest.approx(0.30, abs=1e-12)


def test_coupling_integral_with_density():
    # measure with density 1: K(s) = integral of k(t,s) dt = s(1-s)/2,
    # so the coupling with g = 1 is 1/12
    dens = StieltjesMeasure(density=quad.PiecewiseFn(ONE))
    got = constants.compute_K_g(KS, dens, ONE)
    assert got == pytest.approx(1 / 12, abs=1e-10)


def test_gamma_sup():
    assert constants.gamma_sup(KS) == pytest.approx(1.0, abs=1e-12)


def test_f_sup():
    f = lambda t, u: np.broadcast_to(np.asarray(u, dtype=float) ** 2,
                                     np.broadcast(t, u).shape)
    assert constants.f_sup(f, 0.5) == pytest.approx(0.5, rel=1e-9)
    zero = lambda t, u: np.zeros(np.broadcast(t, u).shape)
    assert constants.f_sup(zero, 1.0) == 0.0
    assert constants.f_inf(zero, 1.0, 0.25, 0.25, 0.75) == 0.0


def test_f_inf():
    f = lambda t, u: np.broadcast_to(np.asarray(u, dtype=float) ** 2,
                                     np.broadcast(t, u).shape)
    assert constants.f_inf(f, 13.0, 0.25, 0.25, 0.75) == pytest.approx(13.0, rel=1e-9)


def test_f_bounds_with_degenerate_broadcast():
    # integrands that ignore one variable return collapsed sample shapes;
    # the bound must still cover the full rectangle
    f_t = lambda t, u: np.sin(np.asarray(t, dtype=float)) ** 2
    assert constants.f_sup(f_t, 2.0) == pytest.approx(np.sin(1.0) ** 2 / 2, rel=1e-9)
    f_u = lambda t, u: np.asarray(u, dtype=float)
    assert constants.f_inf(f_u, 1.0, 0.5, 0.25, 0.75) == pytest.approx(1.0, rel=1e-12)


def test_f_inf_cap_warns():
    f = lambda t, u: np.broadcast_to(np.asarray(u, dtype=float),
                                     np.broadcast(t, u).shape)
    with pytest.warns(RuntimeWarning):
        constants.f_inf(f, 1.0, 1e-9, 0.25, 0.75)


def test_f_sup_dominates_samples():
    rng = np.random.default_rng(31)
    f = lambda t, u: np.sin(3 * np.asarray(t)) ** 2 * (1 + np.asarray(u)) \
        + 0 * np.asarray(u)
    rho = 2.0
    bound = constants.f_sup(f, rho)
    ts = rng.uniform(0, 1, 500)
    us = rng.uniform(0, rho, 500)
    assert np.all(f(ts, us) <= bound * rho * (1 + 1e-9) + 1e-12)


def test_f_inf_below_samples():
    rng = np.random.default_rng(32)
    f = lambda t, u: (2 + np.cos(5 * np.asarray(t))) * np.asarray(u) ** 0.5
    rho, c = 1.5, 0.25
    bound = constants.f_inf(f, rho, c, 0.25, 0.75)
    ts = rng.uniform(0.25, 0.75, 500)
    us = rng.uniform(rho, rho / c, 500)
    assert np.all(f(ts, us) / rho >= bound * (1 - 1e-9) - 1e-12)


def test_alpha0_default():
    from impulse_cone.measure import BoundaryFunctional

    boundary = BoundaryFunctional(0.0, StieltjesMeasure(atoms=((0.5, 0.8),)))
    # lower augmented measure: boundary atom in the window, impulse atom at
    # 0.2 outside it
    dA1 = StieltjesMeasure(atoms=((0.2, 0.625), (0.5, 0.8)))
    assert constants.alpha0_default(boundary, dA1, 0.25, 0.75, 1.0) == pytest.approx(0.8)
    empty = BoundaryFunctional(0.0)
    assert constants.alpha0_default(empty, StieltjesMeasure(), 0.25, 0.75, 1.0) == 0.0
    unit = BoundaryFunctional(1.0)
    assert constants.alpha0_default(unit, StieltjesMeasure(), 0.25, 0.75, 2.0) == 0.5


def test_constants_invariant():
    with pytest.raises(InvalidSpecError):
        constants.ProblemConstants(m=16, M=8, Gamma=0.5, int_K_g=0.1,
                                   c=0.25, A0=0.0, norm_gamma=1.0)


def test_i1_coefficient_example():
    pc = constants.ProblemConstants(m=8.0, M=16.0, Gamma=0.9, int_K_g=0.15,
                                    c=0.25, A0=0.0, norm_gamma=1.0)
    assert pc.i1_coefficient() == pytest.approx(13 / 8, abs=1e-12)
