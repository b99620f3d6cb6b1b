"""Wolff and Riesz potentials of measures.

Both potentials are layer-cake integrals of the ball mass,

    c0 * int_0^inf (sigma(B(x,t)) t^{-a})^b dt/t,

with (a, b, c0) = (n - alpha p, 1/(p-1), 1) for W_{alpha,p} and
(n - order, 1, n - order) for I_order. The integral is taken in log t.
Outside the range where the measure has structure the mass is a power of
t, so the two end pieces are added in closed form:

    small t, M ~ t^k:          h(t_lo) / (b (k - a))
    large t, M ~ t^k (k < a):  h(t_hi) / (b (a - k))

where h = c0 (M t^{-a})^b is the log-t integrand. For atoms the integral is
a finite sum, and for ball measures the inner and outer ranges are exact.

The Riesz potential also has a direct route that does not go through ball
masses: a sum over atoms, or, for radial densities, a shell integral of the
spherical mean of |x - y|^{order - n}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyFailure, InvalidArgument
from .geometry import ball_volume, lens_volume, sphere_area
from .measures import (Atomic, BallLebesgue, Scaled, atomic_form, dimension_of,
                       radial_view)
from .params import Params, validate_wolff
from .quadrature import QuadratureConfig, ShellRule, adaptive_panels, check_accuracy, quad
from .radial import RadialFunction

DEFAULT_QC = QuadratureConfig()


@dataclass(frozen=True)
class Kernel:
    """c0 (M t^{-a})^b dt/t."""

    a: float
    b: float
    c0: float = 1.0

    def h(self, M, t):
        with np.errstate(under="ignore"):
            return self.c0 * (M * t ** (-self.a)) ** self.b

    def tail_from_constant(self, T, t_hi):
        """int_{t_hi}^inf for constant mass T."""
        return self.c0 * T ** self.b * t_hi ** (-self.a * self.b) / (self.a * self.b)


def wolff_kernel(n, p, alpha):
    return Kernel(n - alpha * p, 1.0 / (p - 1.0), 1.0)


def riesz_kernel(n, order):
    return Kernel(n - order, 1.0, n - order)


def _as_point(x, n):
    x = np.asarray(x, float)
    if x.ndim == 0:
        out = np.zeros(n)
        out[0] = float(x)
        x = out
    if x.ndim != 1 or x.size != n or not np.all(np.isfinite(x)):
        raise InvalidArgument(f"evaluation point must be a finite vector in R^{n}")
    return x


def _lens_form(m):
    """(center, radius, density) for a (scaled) ball-Lebesgue measure."""
    if isinstance(m, BallLebesgue):
        return m.center, m.radius, m.density
    if isinstance(m, Scaled):
        inner = _lens_form(m.base)
        if inner is not None:
            c, R, rho = inner
            return c, R, rho * m.factor
    return None


# ---------------------------------------------------------------------------
# atoms


def _atomic_layer_cake(kern, d, w):
    """Exact layer-cake integral for atoms at distances d with weights w.

    On (d_k, d_{k+1}] the open ball holds the first k atoms, so the
    integral is sum_k m_k^b c0 (d_k^{-ab} - d_{k+1}^{-ab}) / (ab).
    """
    keep = w > 0
    d, w = d[keep], w[keep]
    if d.size == 0:
        return 0.0
    if np.any(d == 0):
        return np.inf
    order = np.argsort(d, kind="stable")
    d, w = d[order], w[order]
    cum = np.cumsum(w)
    e = kern.a * kern.b
    pw = d ** (-e)
    nxt = np.append(pw[1:], 0.0)
    return float(kern.c0 * np.sum(cum ** kern.b * (pw - nxt)) / e)


# ---------------------------------------------------------------------------
# ball-Lebesgue measures


def _lens_layer_cake(kern, n, d, R, rho, qc):
    """Layer-cake integrals for a ball B(c, R) with density rho at |x-c| = d."""
    d = np.atleast_1d(np.asarray(d, float))
    out = np.zeros(d.size)
    if rho == 0:
        return out, np.zeros(d.size)
    V = float(ball_volume(n, 1.0))
    T = rho * V * R ** n
    k = n - kern.a
    inside = d < R
    # (0, R - d]: ball of radius t inside the support
    lo = np.where(inside, R - d, 0.0)
    with np.errstate(divide="ignore"):
        out += np.where(inside, kern.c0 * (rho * V) ** kern.b * lo ** (k * kern.b) / (k * kern.b), 0.0)
    hi = d + R
    out += kern.tail_from_constant(T, hi)
    a = np.abs(d - R)
    # x on the sphere |x - c| = R: the lens starts at t = 0 with M ~ t^n / 2
    t_lo = qc.t_min_factor * R
    near = a < t_lo
    a = np.where(near, t_lo, a)
    if np.any(near):
        M_lo = rho * lens_volume(n, d[near], R, t_lo)
        out[near] += kern.h(M_lo, t_lo) / (kern.b * k)
    live = hi > a
    owner = np.flatnonzero(live)

    def f(own, s):
        t = np.exp(s)
        M = rho * lens_volume(n, d[owner[own]], R, t)
        return kern.h(M, t)

    tot, err, _ = adaptive_panels(f, np.arange(owner.size), np.log(a[owner]),
                                  np.log(hi[owner]), owner.size, qc.rel_tol, qc.abs_tol,
                                  qc.max_subdivisions, qc.panel_order)
    out[owner] += tot
    errs = np.zeros(d.size)
    errs[owner] = err
    return out, errs


# ---------------------------------------------------------------------------
# radial densities


def _mass_growth(view, n):
    """Exponent k_inf with sigma(B(0,t)) ~ t^k_inf at infinity (None if unknown)."""
    if np.isfinite(view.support):
        return 0.0
    e = view.tail_exponent
    if e is None:
        return None
    return max(n + e, 0.0)


def _check_view(view, n):
    e0 = view.inner_exponent
    if e0 is not None and n + e0 <= 0:
        raise InvalidArgument(f"density ~ r^{e0} is not locally integrable in R^{n}")
    if not np.isfinite(view.support) and view.tail_exponent is None:
        raise InvalidArgument("unbounded radial density needs a declared tail exponent")


class _RadialLayout:
    """t-intervals, end pieces and ball-mass geometry for radii r_i."""

    def __init__(self, view, n, kern, r, qc):
        self.view, self.n, self.kern, self.qc = view, n, kern, qc
        r = np.asarray(r, float)
        self.r = r
        S = view.support
        finite = np.isfinite(S)
        lo_scale, hi_scale = view.scales
        self.k_inf = _mass_growth(view, n)
        owner, a, b = [], [], []
        self.t_lo = np.full(r.size, np.nan)  # start of the small-t end piece (nan: none)
        self.k_lo = np.zeros(r.size)
        self.t_hi = np.zeros(r.size)
        for i, ri in enumerate(r):
            if finite and ri > S:
                lo = ri - S
            else:
                base = lo_scale if ri == 0 else min(lo_scale, ri)
                lo = qc.t_min_factor * base
                self.t_lo[i] = lo
                e0 = view.inner_exponent if ri == 0 else 0.0
                self.k_lo[i] = n + (e0 or 0.0)
            hi = ri + S if finite else qc.t_max_factor * max(hi_scale, ri)
            self.t_hi[i] = hi
            cuts = {lo, hi}
            for kk in view.kinks:
                cuts.update((abs(ri - kk), ri + kk))
            if ri > 0:
                cuts.add(ri)
            pts = np.array(sorted(c for c in cuts if lo <= c <= hi and c > 0))
            # log t panels no wider than ~2.3 (a decade) to seed the refinement
            logs = np.log(pts)
            for x0, x1 in zip(logs[:-1], logs[1:]):
                if x1 - x0 < 1e-13:
                    continue
                m = max(1, int(np.ceil((x1 - x0) / 2.3)))
                edges = np.linspace(x0, x1, m + 1)
                owner.extend([i] * m)
                a.extend(edges[:-1])
                b.extend(edges[1:])
        self.owner = np.array(owner, np.intp)
        self.a = np.array(a)
        self.b = np.array(b)

    def shell(self, r, t):
        v = self.view
        return ShellRule(self.n, r, t, v.support, scale=v.scales[0], cap_order=self.qc.cap_order,
                         knots=v.knots)

    def end_points(self):
        """(owner, t) pairs whose masses feed the closed-form end pieces."""
        has_lo = ~np.isnan(self.t_lo)
        own = np.concatenate([np.flatnonzero(has_lo), np.arange(self.r.size)])
        t = np.concatenate([self.t_lo[has_lo], self.t_hi])
        return own, t, has_lo

    def end_pieces(self, M_end, has_lo):
        kern = self.kern
        n_lo = int(has_lo.sum())
        out = np.zeros(self.r.size)
        t_lo = self.t_lo[has_lo]
        h_lo = kern.h(M_end[:n_lo], t_lo)
        expo = kern.b * (self.k_lo[has_lo] - kern.a)
        with np.errstate(divide="ignore", invalid="ignore"):
            small = np.where(h_lo > 0, h_lo / expo, 0.0)
        small = np.where((expo <= 0) & (h_lo > 0), np.inf, small)
        out[has_lo] += small
        M_hi = M_end[n_lo:]
        h_hi = kern.h(M_hi, self.t_hi)
        expo_hi = kern.b * (kern.a - self.k_inf)
        if expo_hi <= 0:
            out += np.where(h_hi > 0, np.inf, 0.0)
        else:
            out += h_hi / expo_hi
        return out


def _radial_layer_cake(view, n, kern, r, qc, want_rule=False):
    """Batched layer-cake integral for a radial density at radii r."""
    _check_view(view, n)
    lay = _RadialLayout(view, n, kern, r, qc)
    g = view.density

    def f(own, s):
        t = np.exp(s)
        return kern.h(lay.shell(lay.r[own], t).mass(g), t)

    tot, err, rule = adaptive_panels(f, lay.owner, lay.a, lay.b, lay.r.size, qc.rel_tol,
                                     qc.abs_tol, qc.max_subdivisions, qc.panel_order)
    eo, et, has_lo = lay.end_points()
    M_end = lay.shell(lay.r[eo], et).mass(g)
    vals = tot + lay.end_pieces(M_end, has_lo)
    if want_rule:
        return vals, err, lay, rule
    return vals, err


# ---------------------------------------------------------------------------
# public API


def _wolff_params(params):
    if not isinstance(params, Params):
        raise InvalidArgument("params must be a Params instance")
    validate_wolff(params.n, params.p, params.alpha)
    return params


def _layer_cake(kern, n, m, xs, qc, what):
    """Layer-cake integral of m at the points xs (array of shape (k, n))."""
    dim = dimension_of(m)
    at = atomic_form(m)
    if at is not None:
        if at.weights.size and at.dim != n:
            raise InvalidArgument(f"measure lives in R^{at.dim}, expected R^{n}")
        return np.array([_atomic_layer_cake(kern, np.linalg.norm(at.locations - x, axis=1), at.weights)
                         for x in xs])
    if dim is not None and dim != n:
        raise InvalidArgument(f"measure lives in R^{dim}, expected R^{n}")
    lens = _lens_form(m)
    if lens is not None:
        c, R, rho = lens
        d = np.linalg.norm(xs - c, axis=1)
        vals, errs = _lens_layer_cake(kern, n, d, R, rho, qc)
    else:
        view = radial_view(m)
        if view is None:
            raise InvalidArgument("potential not supported for this measure (not atomic, ball or radial)")
        if view.is_zero:
            return np.zeros(len(xs))
        vals, errs = _radial_layer_cake(view, n, kern, np.linalg.norm(xs, axis=1), qc)
    finite = np.isfinite(vals)
    check_accuracy(vals[finite], errs[finite], qc.rel_tol, qc.abs_tol, what)
    return vals


def wolff(params, m, x, qc=None):
    """W_{alpha,p} sigma(x); ``np.inf`` when the integral diverges."""
    params = _wolff_params(params)
    qc = qc or DEFAULT_QC
    x = _as_point(x, params.n)
    kern = wolff_kernel(params.n, params.p, params.alpha)
    return float(_layer_cake(kern, params.n, m, x[None, :], qc, "wolff")[0])


def wolff_many(params, m, xs, qc=None):
    """W_{alpha,p} sigma at each row of xs (or at radii along e_1)."""
    params = _wolff_params(params)
    qc = qc or DEFAULT_QC
    xs = np.asarray(xs, float)
    if xs.ndim == 1:
        xs = np.column_stack([xs, np.zeros((xs.size, params.n - 1))])
    kern = wolff_kernel(params.n, params.p, params.alpha)
    return _layer_cake(kern, params.n, m, xs, qc, "wolff")


def _check_order(order, n):
    if not (np.isfinite(order) and 0 < order < n):
        raise InvalidArgument(f"Riesz order must lie in (0, {n}), got {order!r}")


def riesz(m, order, n, x, qc=None, method="direct"):
    """I_order sigma(x) = int |x - y|^{order - n} d sigma(y).

    ``method="direct"`` sums over atoms or integrates spherical means over
    shells; ``method="layer_cake"`` uses (n - order) int sigma(B(x,t)) t^{order-n-1} dt.
    """
    _check_order(order, n)
    qc = qc or DEFAULT_QC
    x = _as_point(x, n)
    if method == "layer_cake":
        return float(_layer_cake(riesz_kernel(n, order), n, m, x[None, :], qc, "riesz")[0])
    if method != "direct":
        raise InvalidArgument(f"unknown method {method!r}")
    at = atomic_form(m)
    if at is not None:
        keep = at.weights > 0
        if not np.any(keep):
            return 0.0
        d = np.linalg.norm(at.locations[keep] - x, axis=1)
        if np.any(d == 0):
            return np.inf
        return float(np.sum(at.weights[keep] * d ** (order - n)))
    lens = _lens_form(m)
    if lens is not None:
        c, R, rho = lens
        if rho == 0:
            return 0.0
        view = radial_view(BallLebesgue(np.zeros(n), R, rho))
        return _riesz_spherical_mean(view, n, order, float(np.linalg.norm(x - c)), qc)
    view = radial_view(m)
    if view is None:
        raise InvalidArgument("potential not supported for this measure (not atomic, ball or radial)")
    if view.is_zero:
        return 0.0
    _check_view(view, n)
    return _riesz_spherical_mean(view, n, order, float(np.linalg.norm(x)), qc)


def spherical_mean_kernel(n, order, r, s):
    """Mean of |x - y|^{order-n} over |y| = s, |x| = r.

    With 2 lam = n - order and rho = min/max, the mean is
    max^{-2 lam} 2F1(lam, lam - n/2 + 1; n/2; rho^2).
    """
    lam = 0.5 * (n - order)
    big = np.maximum(r, s)
    rho = np.minimum(r, s) / big
    return big ** (-2 * lam) * special.hyp2f1(lam, lam - 0.5 * n + 1, 0.5 * n, rho * rho)


def _riesz_spherical_mean(view, n, order, r, qc):
    omega = float(sphere_area(n, 1.0))
    g = view.density
    S = view.support
    e0 = view.inner_exponent or 0.0
    if r == 0 and n + e0 - (n - order) <= 0:
        return np.inf
    if not np.isfinite(S) and view.tail_exponent + order >= 0:
        return np.inf

    def f(s):
        if s == r:
            return 0.0
        return float(g(s)) * s ** (n - 1) * float(spherical_mean_kernel(n, order, r, s))

    top = S if np.isfinite(S) else max(view.scales[1], r)
    pts = sorted({k for k in view.kinks if 0 < k < top} | ({r} if 0 < r < top else set()))
    edges = [0.0] + pts + [top]
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        total += v
        err += e
    if not np.isfinite(S):
        v, e = quad(f, top, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)
        total += v
        err += e
    total *= omega
    err *= omega
    if err > max(10 * qc.rel_tol * abs(total), qc.abs_tol):
        raise AccuracyFailure(f"riesz: shell quadrature error {err:.3e}", error_estimate=err)
    return total


def potential_tail_exponent(params, m):
    """Exponent of the power law followed by W sigma(r) as r -> inf."""
    kern = wolff_kernel(params.n, params.p, params.alpha)
    view = radial_view(m)
    k = 0.0
    if view is not None and not view.is_zero:
        k = _mass_growth(view, params.n)
        if k is None:
            return None
    return -(kern.a - k) * kern.b


def wolff_profile(params, m, grid, qc=None):
    """W_{alpha,p} sigma at the radii ``grid`` as a `RadialFunction`.

    The measure must be radial about the origin (or atoms at the origin).
    The tail exponent is the analytic far-field decay and the support
    radius, if it is a grid node, becomes a spline break.
    """
    params = _wolff_params(params)
    qc = qc or DEFAULT_QC
    grid = np.asarray(grid, float)
    n = params.n
    at = atomic_form(m)
    if at is not None and np.any(np.linalg.norm(at.locations[at.weights > 0], axis=1) > 0):
        raise InvalidArgument("profile needs a radially symmetric measure; atoms must sit at the origin")
    lens = _lens_form(m)
    if lens is not None and np.any(lens[0] != 0):
        raise InvalidArgument("profile needs a ball centred at the origin")
    view = radial_view(m) if at is None else None
    if at is None and view is None:
        raise InvalidArgument("profile needs a radially symmetric measure")
    vals = wolff_many(params, m, grid, qc)
    tail = potential_tail_exponent(params, m)
    breaks = ()
    inner = 0.0
    if view is not None:
        breaks = tuple(k for k in view.kinks if k in set(grid.tolist()))
        e0 = view.inner_exponent
        if e0 is not None:
            kern = wolff_kernel(n, params.p, params.alpha)
            inner = min(0.0, (n + e0 - kern.a) * kern.b)
    elif at.weights.sum() > 0:
        inner = -params.beta
    return RadialFunction(grid, vals, tail, inner, breaks)


class RadialPotentialOperator:
    """f -> W_{alpha,p}(f^q d sigma) on a fixed radial grid, for a radial sigma.

    The t-panels are chosen adaptively once (for a reference weight) and
    then frozen together with the ball-mass geometry, so every later call
    only evaluates the weight at fixed radii. The discrete operator is
    therefore deterministic and monotone in f, which is what the monotone
    iteration relies on.
    """

    def __init__(self, params, m, grid, qc=None):
        self.params = _wolff_params(params)
        self.qc = qc or DEFAULT_QC
        self.grid = np.asarray(grid, float)
        view = radial_view(m)
        if view is None:
            raise InvalidArgument("the system is solved for radial measures only")
        _check_view(view, params.n)
        self.view = view
        self.kern = wolff_kernel(params.n, params.p, params.alpha)
        self._plan = None

    @property
    def planned(self):
        return self._plan is not None

    def _density(self, w, q):
        g0 = self.view.density
        if q == 0:
            return g0

        def g(s):
            return g0(s) * w(s) ** q
        return g

    def _weighted_view(self, w, q):
        v = self.view
        inner = None
        if v.inner_exponent is not None and w.inner_exponent is not None:
            inner = v.inner_exponent + q * w.inner_exponent
        tail = None
        if v.tail_exponent is not None and w.tail_exponent is not None:
            tail = v.tail_exponent + q * w.tail_exponent
        kinks = tuple(sorted(set(v.kinks) | {b for b in w.breaks if b < v.support}))
        knots = set(v.knots)
        if w.grid.size > 1:
            knots |= {float(x) for x in w.grid if x < v.support}
        return type(v)(self._density(w, q), v.support, tail, inner, kinks, v.is_zero,
                       (min(v.scales[0], w.r_min), max(v.scales[1], min(w.r_max, v.support))),
                       tuple(sorted(knots)))

    def exponents(self, w, q):
        """(inner, tail) power laws of W(w^q d sigma) at 0 and infinity."""
        view = self._weighted_view(w, q)
        kern = self.kern
        k = _mass_growth(view, self.params.n)
        tail = None if k is None else -(kern.a - k) * kern.b
        inner = None
        if view.inner_exponent is not None:
            inner = min(0.0, (self.params.n + view.inner_exponent - kern.a) * kern.b)
        return inner, tail

    def profile(self, w, q, scale=1.0):
        """`apply` (times ``scale``) as a RadialFunction with its power laws."""
        inner, tail = self.exponents(w, q)
        breaks = tuple(k for k in self.view.kinks if k in set(self.grid.tolist()))
        return RadialFunction(self.grid, scale * self.apply(w, q), tail, inner, breaks)

    def build_plan(self, w, q):
        """Fix the panels using the reference integrand W(w^q d sigma)."""
        view = self._weighted_view(w, q)
        vals, err, lay, rule = _radial_layer_cake(view, self.params.n, self.kern, self.grid,
                                                  self.qc, want_rule=True)
        finite = np.isfinite(vals)
        check_accuracy(vals[finite], err[finite], self.qc.rel_tol, self.qc.abs_tol,
                       "potential operator plan")
        eo, et, has_lo = lay.end_points()
        t_all = np.concatenate([np.exp(rule.nodes), et])
        r_all = np.concatenate([self.grid[rule.owner], self.grid[eo]])
        shell = lay.shell(r_all, t_all)
        nodes = shell.nodes()
        self._plan = dict(rule=rule, lay=lay, has_lo=has_lo, shell=shell, nodes=nodes,
                          g0=np.asarray(self.view.density(nodes), float),
                          sample=w.sampler(nodes),
                          t=np.exp(rule.nodes), n_rule=rule.nodes.size,
                          k_lo=lay.k_lo.copy(), q=q, w_inner=w.inner_exponent,
                          w_tail=w.tail_exponent)
        return vals

    def apply(self, w, q):
        """Values of W(w^q d sigma) at the grid radii."""
        if self._plan is None:
            return self.build_plan(w, q)
        P = self._plan
        lay = P["lay"]
        # the end pieces depend on the weight's power laws
        e0 = (self.view.inner_exponent or 0.0) + q * (w.inner_exponent or 0.0)
        lay.k_lo = np.where(self.grid == 0, self.params.n + e0, P["k_lo"])
        if not np.isfinite(self.view.support):
            lay.k_inf = max(self.params.n + self.view.tail_exponent + q * w.tail_exponent, 0.0)
        gv = P["g0"] * (P["sample"](w) ** q if q != 0 else 1.0)
        M = P["shell"].mass_from_values(gv)
        nr = P["n_rule"]
        h = self.kern.h(M[:nr], P["t"])
        return P["rule"].integrate(h) + lay.end_pieces(M[nr:], P["has_lo"])
