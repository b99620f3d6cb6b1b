import numpy as np
import pytest
from hypothesis import given, strategies as st

from wolffsys import (Atomic, BallLebesgue, InvalidArgument, RadialDensity, RadialFunction, Scaled,
                      ball_mass, dirac, log_grid, scale_measure, total_mass, unit_ball,
                      weight_measure, zero_measure)
from wolffsys.geometry import lens_volume
from wolffsys.measures import atomic_form, is_zero, mass_growth_exponent, radial_view


def test_dirac_ball_mass_is_open_ball():
    m = dirac([0.0, 0.0, 0.0], 2.0)
    assert ball_mass(m, [0.5, 0, 0], 0.5) == 0.0
    assert ball_mass(m, [0.5, 0, 0], 0.5000001) == 2.0


def test_atomic_sums_atoms_inside():
    m = Atomic(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]]), np.array([1.0, 2.0, 4.0]))
    assert ball_mass(m, [0, 0], 1.5) == 3.0
    assert ball_mass(m, [0, 0], 10.0) == 7.0
    assert total_mass(m, 2) == 7.0


def test_ball_lebesgue_matches_lens():
    m = BallLebesgue(np.array([0.2, -0.1, 0.0]), 1.3, 0.7)
    x = np.array([1.0, 0.5, 0.2])
    d = np.linalg.norm(x - m.center)
    for t in (0.1, 0.8, 2.0, 5.0):
        assert ball_mass(m, x, t) == pytest.approx(0.7 * lens_volume(3, d, 1.3, t), rel=1e-14)


def test_radial_density_shell_quadrature_against_ball():
    # a tabulated constant density on the unit ball is the uniform ball
    g = log_grid(1e-3, 1.0, 30)
    m = RadialDensity(RadialFunction(g, np.ones_like(g), tail_exponent=0.0), support_radius=1.0)
    for r, t in ((0.0, 0.5), (0.4, 0.3), (0.4, 1.2), (2.0, 1.5)):
        assert ball_mass(m, [r, 0, 0], t) == pytest.approx(lens_volume(3, r, 1.0, t), rel=1e-9, abs=1e-15)


def test_gaussian_like_density_total_mass():
    g = log_grid(1e-3, 1e3, 400)
    f = RadialFunction(g, (1 + g * g) ** -2.0, tail_exponent=-4.0)
    m = RadialDensity(f)
    # int_R^3 (1 + |y|^2)^{-2} dy = 4 pi * pi / 4 = pi^2
    assert total_mass(m, 3) == pytest.approx(np.pi ** 2, rel=1e-6)
    assert mass_growth_exponent(m, 3) == 0.0


def test_infinite_mass_and_growth():
    g = log_grid(1e-2, 1e2, 20)
    m = RadialDensity(RadialFunction(g, np.ones_like(g), tail_exponent=0.0))
    assert total_mass(m, 3) == np.inf
    assert mass_growth_exponent(m, 3) == 3.0


@given(st.floats(1e-3, 1e3), st.floats(0.05, 3.0), st.floats(0.0, 2.0))
def test_scaling_is_exact(a, t, r):
    m = unit_ball(3)
    assert ball_mass(scale_measure(m, a), [r, 0, 0], t) == a * ball_mass(m, [r, 0, 0], t)


@given(st.floats(0.0, 2.0), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_ball_mass_monotone_in_radius(r, t1, t2):
    m = unit_ball(3)
    lo, hi = sorted((t1, t2))
    assert ball_mass(m, [r, 0, 0], lo) <= ball_mass(m, [r, 0, 0], hi)


def test_weighting_atomic_folds_eagerly():
    g = log_grid(0.1, 10, 10)
    w = RadialFunction(g, g ** -1.0, tail_exponent=-1.0, inner_exponent=-1.0)
    m = weight_measure(Atomic(np.array([[2.0, 0, 0]]), np.array([3.0])), w, 2.0)
    assert isinstance(m, Atomic)
    assert m.weights[0] == pytest.approx(3.0 / 4.0)
    undefined = RadialFunction(g, g, tail_exponent=None)
    with pytest.raises(InvalidArgument):
        weight_measure(Atomic(np.array([[50.0, 0, 0]]), np.array([1.0])), undefined, 1.0)


def test_weighted_radial_ball_mass():
    g = log_grid(0.01, 1.0, 40, extra=[1.0])
    w = RadialFunction(g, g ** 2, tail_exponent=2.0, inner_exponent=2.0)
    m = weight_measure(unit_ball(3), w, 1.0)
    # int_{|y|<t} |y|^2 dy = 4 pi t^5 / 5
    assert ball_mass(m, [0, 0, 0], 0.5) == pytest.approx(4 * np.pi * 0.5 ** 5 / 5, rel=1e-9)


def test_zero_and_views():
    z = zero_measure(3)
    assert is_zero(z) and ball_mass(z, [0, 0, 0], 1.0) == 0.0
    assert is_zero(scale_measure(unit_ball(3), 0.0))
    assert radial_view(BallLebesgue(np.array([1.0, 0, 0]), 1.0)) is None
    assert atomic_form(unit_ball(3)) is None
    v = radial_view(unit_ball(3, 2.0))
    assert v.support == 2.0 and v.kinks == (2.0,)


@pytest.mark.parametrize("make", [
    lambda: Atomic(np.zeros((2, 3)), np.array([1.0])),
    lambda: Atomic(np.zeros((1, 3)), np.array([-1.0])),
    lambda: BallLebesgue(np.zeros(3), 0.0),
    lambda: BallLebesgue(np.zeros(3), 1.0, -2.0),
    lambda: scale_measure(unit_ball(3), -1.0),
    lambda: RadialDensity(np.ones(3)),
    lambda: ball_mass(unit_ball(3), [0, 0], 1.0),
    lambda: ball_mass(unit_ball(3), [0, 0, 0], 0.0),
    lambda: dirac([np.nan, 0.0]),
])
def test_invalid_inputs(make):
    with pytest.raises(InvalidArgument):
        make()
