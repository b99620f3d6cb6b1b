import numpy as np
import pytest

from wolffsys import (BallLebesgue, ConditionFailure, InvalidArgument, Params, SolverConfig, dirac, gamma_exponents,
                      scale_measure, solve, unit_ball, zero_measure)
from wolffsys.solver import build_barriers, kappa_exponents, setup_system


def _tol(x):
    return 1e-12 + 1e-10 * np.abs(x)


def test_barriers_are_ordered(ball_asym):
    P, m, res = ball_asym
    b = res.barriers
    assert np.all(b.under_u.values <= b.over_u.values + _tol(b.over_u.values))
    assert np.all(b.under_v.values <= b.over_v.values + _tol(b.over_v.values))
    assert b.lambda1 > 0 and b.lambda2 >= b.lambda1


def test_barriers_are_sub_and_super_solutions():
    P = Params(3, 2.0, 1.0, 0.3, 0.8)
    bars, setup = build_barriers(P, unit_ball(3))
    Tu_under, Tv_under = setup.T_u(bars.under_v), setup.T_v(bars.under_u)
    Tu_over, Tv_over = setup.T_u(bars.over_v), setup.T_v(bars.over_u)
    assert np.all(bars.under_u.values <= Tu_under.values + _tol(Tu_under.values))
    assert np.all(bars.under_v.values <= Tv_under.values + _tol(Tv_under.values))
    assert np.all(Tu_over.values <= bars.over_u.values + _tol(bars.over_u.values))
    assert np.all(Tv_over.values <= bars.over_v.values + _tol(bars.over_v.values))


def test_iteration_is_monotone_and_trapped(ball_asym):
    P, m, res = ball_asym
    steps = res.trace.steps
    assert res.trace.monotone_ok and res.trace.barrier_ok and res.pair.converged
    for a, b in zip(steps, steps[1:]):
        assert np.all(b.u >= a.u - _tol(b.u))
        assert np.all(b.v >= a.v - _tol(b.v))
    assert np.all(steps[-1].u <= res.barriers.over_u.values + _tol(steps[-1].u))


def test_fixed_point_residual(ball_asym):
    P, m, res = ball_asym
    assert max(res.pair.residual_u, res.pair.residual_v) <= 1e-8 * 10


def test_symmetric_exponents_give_equal_components(ball_sym):
    P, m, res = ball_sym
    np.testing.assert_array_equal(res.pair.u.values, res.pair.v.values)


def test_sandwich_and_consistency(ball_sym):
    P, m, res = ball_sym
    sand = res.report["sandwich"]
    assert sand.passed and np.isfinite(sand.constant) and sand.constant >= 1
    weak = res.report["weaker_condition"]
    assert weak.passed and weak.details["consistent"]


def test_lower_bound_holds(ball_asym):
    P, m, res = ball_asym
    lb = res.report["lower_bound"]
    assert lb.passed and lb.details["min_ratio"] >= 1 - 1e-10
    assert res.report["kappa"].constant > 0


def test_pde_mode_is_a_rescaling(ball_sym):
    # u = K W(v^q) with u = c u0 forces c^{1 - q/(p-1)} = K
    P, m, res = ball_sym
    P2 = Params(3, 2.0, 1.0, 0.5, 0.5, "pde_equivalent", 2.0)
    res2 = solve(P2, m)
    c = 2.0 ** (1.0 / (1.0 - 0.5))
    np.testing.assert_allclose(res2.pair.u.values, c * res.pair.u.values, rtol=1e-8)


def test_pde_mode_refuses_p_at_least_n():
    with pytest.raises(Exception) as e:
        solve(Params(3, 3.0, 1.0, 0.5, 0.5, "pde_equivalent", 1.0), unit_ball(3))
    assert "n" in str(e.value)


def test_zero_measure_gives_zero_solution():
    P = Params(3, 2.0, 1.0, 0.5, 0.5)
    res = solve(P, zero_measure(3))
    assert res.pair.converged
    assert not np.any(res.pair.u.values) and not np.any(res.pair.v.values)


def test_dirac_is_refused():
    with pytest.raises(ConditionFailure) as e:
        solve(Params(3, 2.0, 1.0, 0.5, 0.5), dirac([0, 0, 0]))
    assert e.value.report.condition == "capacity_ball_scaling"


def test_nonradial_measure_is_refused():
    m = BallLebesgue(np.array([1.0, 0, 0]), 1.0, 1.0)
    with pytest.raises(InvalidArgument):
        solve(Params(3, 2.0, 1.0, 0.5, 0.5), m)


@pytest.mark.parametrize("lam", [0.25, 3.0])
def test_mass_scaling_covariance(lam):
    # sigma -> lam sigma multiplies W by lam^{1/(p-1)}; with u = c u0 this forces
    # c^{1 - q/(p-1)} = lam^{1/(p-1)}
    P = Params(3, 3.0, 0.5, 0.5, 0.5)
    cfg = SolverConfig(grid_points=48)
    a = solve(P, unit_ball(3), cfg)
    b = solve(P, scale_measure(unit_ball(3), lam), cfg)
    a_ = P.p - 1.0
    c = lam ** ((1 / a_) / (1 - P.q1 / a_))
    np.testing.assert_allclose(b.pair.u.values, c * a.pair.u.values, rtol=1e-7)


def test_kappa_exponents_are_positive():
    rs = kappa_exponents(2.0, 0.3, 0.8)
    ex = gamma_exponents(2.0, 0.3, 0.8)
    assert all(r > 0 for r in rs)
    assert 0.3 * ex.gamma2 in rs and 0.8 * ex.gamma1 in rs
    assert rs == sorted(rs)


def test_setup_zero_profile():
    s = setup_system(Params(3, 2.0, 1.0, 0.5, 0.5), unit_ball(3))
    z = s.zero()
    assert z.grid.size == s.grid.size and not np.any(z.values)
