import numpy as np
import pytest

from impulse_cone.hammerstein import residual
from impulse_cone.shooting import crosscheck
from impulse_cone.solver import multi_start, solve_fixed_point

from conftest import example_spec, make_spec, two_impulse_spec


def test_constant_operator_converges_in_one_step():
    spec = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=(), A0=1.0)
    run = solve_fixed_point(spec, spec.grid_function(7.0), damping=1.0, tol=1e-13)
    assert run.success and run.iterations <= 2
    assert float(np.max(np.abs(run.u.values - (1 - run.u.grid)))) <= 1e-13
    assert run.method == "picard"


def test_pure_dirichlet_closed_form():
    spec = make_spec(f="1", impulses=((0.2, "0", 0.0, 0.0),), atoms=())
    run = solve_fixed_point(spec, spec.grid_function(0.0), damping=1.0, tol=1e-12)
    assert run.success
    g = run.u.grid
    assert float(np.max(np.abs(run.u.values - g * (1 - g) / 2))) <= 1e-12


def test_divergence_guard():
    spec = example_spec()  # superlinear f
    run = solve_fixed_point(spec, spec.grid_function(1e6), damping=0.5,
                            max_iter=50, tol=1e-9)
    assert not run.success
    assert "diverged" in run.message


def test_picard_collapses_to_trivial_fixed_point():
    # at a positive fixed point of a superlinear f the linearization
    # dominates the identity on the cone, so Picard drains to zero
    spec = example_spec()
    run = solve_fixed_point(spec, spec.grid_function(1.0), damping=0.5,
                            max_iter=500, tol=1e-9)
    assert run.success
    assert run.u.sup_norm() < 1e-4


def test_multi_start_finds_positive_solution():
    spec = example_spec()
    result = multi_start(spec, 0.5, 13.0, tol=1e-9)
    assert result.success
    run = result.solution
    u = run.u
    assert run.residual <= 1e-9
    assert residual(spec, u) <= 1e-9
    assert u.sup_norm() >= 0.5 * (1 - 1e-6)
    assert u.in_cone(spec.cone, tol=1e-8)
    imp = spec.impulses[0]
    assert abs(u.jump(imp.tau) - imp.fn(u.eval(imp.tau, "left"))) <= 1e-8
    assert abs(u.eval(1.0)) <= 1e-8
    assert abs(u.eval(0.0) - spec.boundary(u)) <= 1e-8


def test_multi_start_rejects_trivial_solution():
    spec = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=())
    result = multi_start(spec, 1.0, 2.0, max_iter=300)
    assert not result.success
    assert all(not run.success for _, run in result.attempts)


def test_two_impulse_picard_contracts():
    spec = two_impulse_spec()  # f = 1 + u/2 is a sup-norm contraction here
    run = solve_fixed_point(spec, spec.grid_function(1.0), damping=0.5,
                            tol=1e-10)
    assert run.success and run.method == "picard"
    u = run.u
    for imp in spec.impulses:
        assert abs(u.jump(imp.tau) - imp.fn(u.eval(imp.tau, "left"))) <= 1e-9
    assert u.sup_norm() > 0.1
    assert u.in_cone(spec.cone, tol=1e-8)


def test_grid_refinement_stability():
    # the doubling difference is bounded by 10x tol once tol sits at the
    # representation accuracy of the coarser grid
    spec = example_spec()
    tol = 2e-7
    u_coarse = multi_start(spec, 0.5, 13.0, tol=tol, n_per_piece=1025).solution.u
    u_fine = multi_start(spec, 0.5, 13.0, tol=tol, n_per_piece=2049).solution.u
    assert crosscheck(u_coarse, u_fine) <= 10 * tol


def test_bad_damping_rejected():
    spec = example_spec()
    with pytest.raises(ValueError):
        solve_fixed_point(spec, spec.grid_function(1.0), damping=0.0)
    with pytest.raises(ValueError):
        multi_start(spec, 2.0, 1.0)


def test_negative_init_is_clamped():
    spec = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=(), A0=1.0)
    init = spec.grid_function(lambda t: -1.0 + 0 * t)
    run = solve_fixed_point(spec, init, damping=1.0)
    assert run.success
