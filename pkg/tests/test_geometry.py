import numpy as np
import pytest
from hypothesis import given, strategies as st

from wolffsys.geometry import ball_volume, cap_fraction, lens_volume, sphere_area


def test_ball_volumes_and_areas():
    assert ball_volume(3) == pytest.approx(4 * np.pi / 3, rel=1e-15)
    assert ball_volume(2, 2.0) == pytest.approx(4 * np.pi, rel=1e-15)
    assert ball_volume(4) == pytest.approx(np.pi ** 2 / 2, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4 * np.pi, rel=1e-15)
    assert sphere_area(5, 2.0) == pytest.approx(8 * np.pi ** 2 / 3 * 16, rel=1e-14)


pos = st.floats(1e-3, 1e3)


@given(pos, pos, pos)
def test_cap_fraction_three_dimensions_archimedes(s, r, t):
    # in R^3 the cap area is linear in the height: fraction (t^2 - (r - s)^2) / (4 r s)
    exact = np.clip((t * t - (r - s) ** 2) / (4 * r * s), 0.0, 1.0)
    assert cap_fraction(3, s, r, t) == pytest.approx(exact, rel=1e-10, abs=1e-13)


def test_cap_fraction_circle():
    # n = 2: fraction of the circle |y| = s inside B(x, t) is theta* / pi
    s, r, t = 1.0, 1.2, 0.7
    theta = np.arccos((r * r + s * s - t * t) / (2 * r * s))
    assert cap_fraction(2, s, r, t) == pytest.approx(theta / np.pi, rel=1e-13)


@given(st.integers(2, 8), pos, pos, pos, pos)
def test_cap_fraction_monotone_in_t(n, s, r, t1, t2):
    lo, hi = sorted((t1, t2))
    a, b = cap_fraction(n, s, r, lo), cap_fraction(n, s, r, hi)
    assert 0.0 <= a <= b <= 1.0


def test_cap_fraction_small_t_no_cancellation():
    # t << r: fraction ~ c t^{n-1}; the factored form keeps full relative accuracy
    r = s = 1.0
    t = 1e-6
    exact = t * t / 4  # n = 3, r = s
    assert cap_fraction(3, s, r, t) == pytest.approx(exact, rel=1e-9)


def _lens3(d, R, t):
    """Sphere-sphere intersection volume in R^3 (textbook formula)."""
    if d >= R + t:
        return 0.0
    if d <= abs(R - t):
        return 4 * np.pi / 3 * min(R, t) ** 3
    return np.pi * (R + t - d) ** 2 * (d * d + 2 * d * t - 3 * t * t + 2 * d * R + 6 * t * R - 3 * R * R) / (12 * d)


@given(st.floats(1e-3, 5.0), st.floats(0.1, 3.0), st.floats(1e-3, 6.0))
def test_lens_volume_three_dimensions(d, R, t):
    assert lens_volume(3, d, R, t) == pytest.approx(_lens3(d, R, t), rel=1e-10, abs=1e-14)


def test_lens_volume_monte_carlo_n4():
    rng = np.random.default_rng(0)
    n, d, R, t = 4, 0.7, 1.0, 0.9
    pts = rng.uniform(-1, 1, size=(400_000, n))
    inside = (np.linalg.norm(pts, axis=1) < R) & (np.linalg.norm(pts - np.eye(n)[0] * d, axis=1) < t)
    est = inside.mean() * 2.0 ** n
    se = 2.0 ** n * np.sqrt(inside.mean() * (1 - inside.mean()) / pts.shape[0])
    assert abs(lens_volume(n, d, R, t) - est) < 5 * se


@pytest.mark.parametrize("d", [0.0, 1e-300, 1e-12])
def test_lens_volume_concentric_limit(d):
    assert lens_volume(3, d, 1.0, 1.0) == pytest.approx(4 * np.pi / 3, rel=1e-12)
    assert lens_volume(3, d, 1.0, 0.5) == pytest.approx(np.pi / 6, rel=1e-12)
