import numpy as np
import pytest

from wolffsys import AccuracyFailure
from wolffsys.geometry import ball_volume, lens_volume
from wolffsys.quadrature import (QuadratureConfig, ShellRule, adaptive_panels, check_accuracy,
                                 gauss01, gauss01_sin2)


def test_gauss_rules_integrate_polynomials():
    x, w = gauss01(6)
    assert np.sum(w * x ** 11) == pytest.approx(1 / 12, rel=1e-14)
    s, v = gauss01_sin2(12)
    assert np.sum(v) == pytest.approx(1.0, rel=1e-14)
    # half-integer endpoint power, the case the map is meant for
    assert np.sum(v * s ** 1.5) == pytest.approx(0.4, rel=1e-12)


def test_adaptive_panels_batch():
    def f(own, x):
        return np.where(own == 0, np.exp(x), 1 / (1 + x * x))
    tot, err, rule = adaptive_panels(f, [0, 1, 1], [0.0, -50.0, 0.0], [1.0, 0.0, 50.0], 2,
                                     rel_tol=1e-12, abs_tol=1e-15, max_levels=30)
    assert tot[0] == pytest.approx(np.e - 1, rel=1e-13)
    assert tot[1] == pytest.approx(2 * np.arctan(50.0), rel=1e-12)
    assert rule.integrate(f(rule.owner, rule.nodes)) == pytest.approx(tot, rel=1e-12)


def test_check_accuracy_raises_on_large_errors():
    check_accuracy(np.array([1.0]), np.array([1e-10]), 1e-9, 1e-12, "x")
    with pytest.raises(AccuracyFailure):
        check_accuracy(np.array([1.0]), np.array([1e-6]), 1e-9, 1e-12, "x")


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(t_min_factor=10.0, t_max_factor=1.0)


def test_shell_rule_uniform_ball_is_a_lens():
    n, S = 3, 1.0
    r = np.array([0.0, 0.3, 0.3, 0.99, 1.0, 1.7, 2.5])
    t = np.array([0.5, 0.1, 0.9, 0.05, 1.0, 1.0, 1.0])
    rule = ShellRule(n, r, t, S, scale=S)
    got = rule.mass(lambda s: np.ones_like(s))
    np.testing.assert_allclose(got, lens_volume(n, r, S, t), rtol=1e-11, atol=1e-15)


def test_shell_rule_gaussian_density_n4_against_quadrature():
    from scipy import integrate
    from wolffsys.geometry import cap_fraction, sphere_area
    n = 4
    g = lambda s: np.exp(-s * s)
    r, t = 0.8, 1.1
    rule = ShellRule(n, np.array([r]), np.array([t]), scale=1.0)
    full = integrate.quad(lambda s: g(s) * s ** 3, 0, t - r, epsrel=1e-13)[0]
    part = integrate.quad(lambda s: g(s) * s ** 3 * cap_fraction(n, s, r, t), t - r, t + r, epsrel=1e-13)[0]
    assert rule.mass(g)[0] == pytest.approx(sphere_area(n) * (full + part), rel=1e-10)


def test_shell_rule_knots_handle_piecewise_density():
    n, S = 3, 2.0
    knots = np.geomspace(0.05, 2.0, 30)
    # piecewise linear density with kinks at every knot
    vals = 1 + 0.3 * np.sin(7 * knots)
    g = lambda s: np.interp(s, knots, vals)
    r = np.array([0.4, 1.0, 1.5])
    t = np.array([0.7, 0.45, 1.2])
    rule = ShellRule(n, r, t, S, scale=S, knots=knots)
    from scipy import integrate
    from wolffsys.geometry import cap_fraction
    for i in range(r.size):
        a, b = abs(r[i] - t[i]), min(r[i] + t[i], S)
        pts = [k for k in knots if a < k < b]
        part = integrate.quad(lambda s: g(s) * s * s * cap_fraction(n, s, r[i], t[i]), a, b,
                              points=pts, limit=400, epsrel=1e-13)[0]
        full = integrate.quad(lambda s: g(s) * s * s, 0, max(t[i] - r[i], 0), points=[k for k in knots if k < t[i] - r[i]] or None,
                              limit=400, epsrel=1e-13)[0] if t[i] > r[i] else 0.0
        assert rule.mass(g)[i] == pytest.approx(4 * np.pi * (full + part), rel=1e-10)


def test_shell_rule_singular_density_with_empty_full_part():
    # t < r: no ball B(0, t - r) to fill, and g(0) = inf must not leak in
    from scipy import integrate
    from wolffsys.geometry import cap_fraction
    n, r, t = 3, 0.5, 0.3
    rule = ShellRule(n, np.array([r]), np.array([t]), 1.0, scale=1.0)
    with np.errstate(divide="ignore"):
        got = rule.mass(lambda s: s ** -2.5)[0]
    part = integrate.quad(lambda s: s ** -0.5 * cap_fraction(n, s, r, t), r - t, r + t, epsrel=1e-13)[0]
    assert got == pytest.approx(4 * np.pi * part, rel=1e-10)
