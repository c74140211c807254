import numpy as np
import pytest

from impulse_cone import quad
from impulse_cone.errors import InvalidSpecError
from impulse_cone.hammerstein import (
    Impulse,
    ProblemSpec,
    apply_T,
    cone_mapping_check,
    random_cone_element,
    residual,
)
from impulse_cone.kernel import KernelSpec

from conftest import example_spec, make_spec


@pytest.fixture(scope="module")
def spec():
    return example_spec()


def analytic_T_of_one(spec, t, chi):
    # image of u = 1 under the example operator, by hand:
    # (1-t) * (4/5 + chi * (1/2)/(4/5)) + t(1-t)/2
    return (1 - t) * (0.8 + chi * 0.625) + t * (1 - t) / 2


def test_apply_T_on_constant_one(spec):
    u = spec.grid_function(1.0)
    Tu = apply_T(spec, u)
    assert Tu.eval(0.5) == pytest.approx(0.8375, abs=1e-12)
    for t, s, v in Tu.rows():
        chi = 1.0 if (t > 0.2 or (t == 0.2 and s == "R")) else 0.0
        assert v == pytest.approx(analytic_T_of_one(spec, t, chi), abs=1e-11)


def test_zero_data_gives_zero_image():
    spec0 = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=())
    u = spec0.grid_function(lambda t: np.cos(t) + 1.2)
    Tu = apply_T(spec0, u)
    assert Tu.sup_norm() == 0.0
    assert residual(spec0, spec0.grid_function(0.0)) == 0.0


def test_boundary_only_image_is_gamma():
    spec1 = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=(), A0=1.0)
    u = spec1.grid_function(5.0)
    Tu = apply_T(spec1, u)
    assert np.allclose(Tu.values, 1.0 - Tu.grid, atol=1e-14)


def test_negative_input_rejected(spec):
    u = spec.grid_function(-1.0)
    with pytest.raises(ValueError):
        apply_T(spec, u)


def test_mismatched_jump_structure_rejected(spec):
    from impulse_cone.pcfun import PCFunction

    u = PCFunction.from_callable(lambda t: 1.0 + 0 * t, jumps=(0.3,))
    with pytest.raises(ValueError):
        apply_T(spec, u)


def test_residual_of_non_solution(spec):
    assert residual(spec, spec.grid_function(1.0)) > 0.1


def test_jump_identity(spec):
    rng = np.random.default_rng(2)
    for _ in range(5):
        u = random_cone_element(spec, rng)
        Tu = apply_T(spec, u)
        # jump of the image is gamma(tau) * I(u(tau-)) / (1 - tau)
        expected = float(spec.kernel.gamma(0.2)) * spec.impulses[0].fn(
            u.eval(0.2, "left")) / (1 - 0.2)
        assert Tu.jump(0.2) == pytest.approx(expected, abs=1e-12)
        # builtin kernel: gamma(tau) = 1 - tau, so the jump is exactly I(u(tau))
        assert Tu.jump(0.2) == pytest.approx(
            spec.impulses[0].fn(u.eval(0.2, "left")), abs=1e-12)


def test_positivity_and_monotonicity(spec):
    big = make_spec(f="2*u^2")
    rng = np.random.default_rng(8)
    for _ in range(5):
        u = random_cone_element(spec, rng)
        Tu = apply_T(spec, u)
        assert float(np.min(Tu.values)) >= 0.0
        Tu_big = apply_T(big, u)
        assert np.all(Tu_big.values >= Tu.values - 1e-12)


def test_matches_adaptive_kernel_action(spec):
    u = spec.grid_function(lambda t: 1 + np.sin(2 * t))
    Tu = apply_T(spec, u)
    alpha_u = spec.boundary(u)
    h = lambda s: spec.f(s, u(s))
    for t in (0.1, 0.2, 0.5, 0.9):
        integral = quad.kernel_action(spec.kernel, spec.g, h, t, 1e-12)
        # evaluating the right side at t = 0.2, where the indicator is 1
        chi = 1.0 if t >= 0.2 else 0.0
        imp = spec.impulses[0]
        want = float(spec.kernel.gamma(t)) * (
            alpha_u + chi * imp.fn(u.eval(0.2, "left")) / (1 - 0.2)) + integral
        assert Tu.eval(t, "right" if t == 0.2 else "default") == pytest.approx(
            want, abs=1e-10)


def test_off_grid_kink_falls_back_to_adaptive(spec):
    # a spurious off-grid kink forces the per-node adaptive path; the true
    # kink at s = t stays declared so both routes are accurate
    ks = spec.kernel
    weird = KernelSpec(k=ks.k, gamma=ks.gamma, phi=ks.phi, c1=ks.c1, c2=ks.c2,
                       kinks=lambda t: (t, 0.371234) if 0 < t < 1 else (0.371234,),
                       name="declared-off-grid")
    spec2 = ProblemSpec(f=spec.f, g=spec.g, impulses=spec.impulses,
                        boundary=spec.boundary, kernel=weird, cone=spec.cone)
    u = spec2.grid_function(1.0, n_per_piece=33)
    fast = apply_T(spec, spec.grid_function(1.0, n_per_piece=33))
    slow = apply_T(spec2, u)
    assert float(np.max(np.abs(fast.values - slow.values))) < 1e-10


def test_cone_mapping_check_passes(spec):
    report = cone_mapping_check(spec, 25, seed=0, n_per_piece=65)
    assert report.passed, report.failures[:3]


def test_cone_mapping_check_detects_bad_ratio():
    bad = make_spec(c=0.9)
    report = cone_mapping_check(bad, 25, seed=0, n_per_piece=65)
    assert not report.passed


def test_cone_mapping_check_empty():
    report = cone_mapping_check(example_spec(), 0, seed=0)
    assert report.passed and report.n_checked == 0


def test_random_cone_elements_are_in_cone(spec):
    rng = np.random.default_rng(123)
    for _ in range(50):
        u = random_cone_element(spec, rng, n_per_piece=33)
        assert u.in_cone(spec.cone, tol=1e-10)


def test_spec_validation():
    with pytest.raises(InvalidSpecError):
        make_spec(impulses=())  # impulses required
    with pytest.raises(InvalidSpecError):
        make_spec(impulses=((0.3, "x/2", 0.5, 0.5), (0.3, "x/2", 0.5, 0.5)))
    with pytest.raises(InvalidSpecError):
        make_spec(impulses=((0.4, "x/2", 0.5, 0.5),))  # tau >= a
    with pytest.raises(InvalidSpecError):
        make_spec(atoms=((0.2, 0.8),))  # atom collides with the impulse
    with pytest.raises(InvalidSpecError):
        make_spec(f="0 - 1")  # negative nonlinearity
    with pytest.raises(InvalidSpecError):
        make_spec(impulses=((0.2, "x", 0.5, 0.5),))  # I(x)=x breaks the envelope
    with pytest.raises(InvalidSpecError):
        Impulse(0.2, lambda x: x / 2, 0.7, 0.5)  # inverted envelope


def test_envelope_audit_accepts_nonlinear_impulse():
    # I(x) = x * (1 + exp(-x)) / 2 has envelope x/2 <= I <= x
    make_spec(impulses=((0.2, "x*(1 + exp(-x))/2", 0.5, 1.0),))
