"""Closed-form ball and sphere geometry in R^n."""
from __future__ import annotations

import numpy as np
from scipy.special import betainc, gammaln


def ball_volume(n, radius=1.0):
    """Lebesgue measure of a ball of the given radius in R^n."""
    return np.exp(0.5 * n * np.log(np.pi) - gammaln(0.5 * n + 1)) * np.asarray(radius, float) ** n


def sphere_area(n, radius=1.0):
    """Surface measure of the sphere of the given radius in R^n."""
    return n * ball_volume(n, 1.0) * np.asarray(radius, float) ** (n - 1)


def cap_fraction(n, s, r, t):
    """Fraction of the sphere {|y| = s} lying inside the open ball B(x, t), |x| = r.

    A point y on the sphere is inside when its angle to x is below theta*,
    cos(theta*) = (r^2 + s^2 - t^2) / (2 r s). For a uniform point on
    S^{n-1}, (1 - cos(angle)) / 2 is Beta((n-1)/2, (n-1)/2) distributed,
    so the fraction is the regularized incomplete beta function at
    (1 - cos(theta*)) / 2.
    """
    s, r, t = np.broadcast_arrays(*(np.asarray(a, float) for a in (s, r, t)))
    # (1 - cos) / 2 in factored form: no cancellation when t << r
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (t - r + s) * (t + r - s) / (4.0 * r * s)
    x = np.clip(x, 0.0, 1.0)
    # degenerate radii: the sphere (or the centre) collapses to a point
    deg = (r == 0) | (s == 0)
    if np.any(deg):
        x = np.where(deg, np.where(np.maximum(r, s) < t, 1.0, 0.0), x)
    a = 0.5 * (n - 1)
    return betainc(a, a, x)


def lens_volume(n, d, R, t):
    """Volume of B(c, R) intersected with B(x, t) where |x - c| = d.

    Each lens is the union of two ball segments cut by the radical plane.
    For a uniform point of the unit n-ball the coordinate x_1 satisfies
    (1 + x_1) / 2 ~ Beta((n+1)/2, (n+1)/2), so the segment beyond signed
    distance h from the centre has volume fraction I_{(1-h)/2}((n+1)/2, (n+1)/2).
    Clamping that argument to [0, 1] covers the disjoint and nested cases.
    """
    d, R, t = np.broadcast_arrays(*(np.asarray(a, float) for a in (d, R, t)))
    out = np.zeros(d.shape)
    b = 0.5 * (n + 1)
    conc = d == 0
    if np.any(conc):
        out[conc] = ball_volume(n, np.minimum(R[conc], t[conc]))
    gen = ~conc & (t > 0) & (R > 0)
    if np.any(gen):
        dd, RR, tt = d[gen], R[gen], t[gen]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            hR = (dd * dd + RR * RR - tt * tt) / (2 * dd) / RR
            ht = (dd * dd + tt * tt - RR * RR) / (2 * dd) / tt
        fR = betainc(b, b, np.clip(0.5 * (1 - hR), 0.0, 1.0))
        ft = betainc(b, b, np.clip(0.5 * (1 - ht), 0.0, 1.0))
        # both segments are whole balls only when one ball contains the other;
        # then the smaller one is the whole intersection
        vol = ball_volume(n, RR) * fR + ball_volume(n, tt) * ft
        nested_t = dd + tt <= RR
        nested_R = dd + RR <= tt
        vol = np.where(nested_t, ball_volume(n, tt), vol)
        vol = np.where(nested_R, ball_volume(n, RR), vol)
        vol = np.where(dd >= RR + tt, 0.0, vol)
        out[gen] = vol
    return out
