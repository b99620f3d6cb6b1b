"""Checks of the hypotheses on sigma and of the named inequalities.

Each check returns a `ConditionReport`. Divergence at infinity or at the
origin is decided from declared power laws, never from numeric overflow.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .exponents import gamma_exponents
from .geometry import sphere_area
from .measures import atomic_form, ball_mass, is_zero, radial_view
from .params import Params, validate_wolff
from .potentials import (DEFAULT_QC, RadialPotentialOperator, _lens_form, _mass_growth,
                         wolff_kernel, wolff_profile)
from .quadrature import quad
from .radial import RadialFunction, log_grid


@dataclass
class ConditionReport:
    condition: str
    passed: bool
    constant: float = float("nan")
    probes: str = ""
    worst_node: float | None = None
    indeterminate: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self):
        def clean(v):
            if isinstance(v, (np.floating, float)):
                v = float(v)
                return v if np.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, (np.bool_,)):
                return bool(v)
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple, np.ndarray)):
                return [clean(x) for x in v]
            return v
        out = {"condition": self.condition, "pass": bool(self.passed),
               "constant": clean(self.constant), "probes": self.probes,
               "worst_node": clean(self.worst_node)}
        if self.indeterminate:
            out["indeterminate"] = True
        out.update({k: clean(v) for k, v in self.details.items()})
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _default_grid(m, points=64):
    view = radial_view(m)
    L = 1.0
    extra = ()
    if view is not None and np.isfinite(view.support):
        L = view.support
        extra = (view.support,)
    elif view is not None:
        L = view.scales[1]
    return log_grid(1e-2 * L, 1e2 * L, points, extra=extra)


def _support_breaks(m, grid):
    """Insert the measure's kink radii (e.g. its support radius) as nodes."""
    view = radial_view(m)
    if view is None:
        return grid
    missing = [k for k in view.kinks if grid[0] < k < grid[-1] and not np.any(grid == k)]
    if not missing:
        return grid
    out = np.union1d(grid, missing)
    keep = np.ones(out.size, bool)
    for k in missing:
        keep &= ~((np.abs(np.log(out / k)) < 1e-3) & (out != k))
    return out[keep]


def ratio_divergence(r, ratio, num=None, den=None, slope_tol=0.05, k=4, persist=0.85):
    """Which end (if any) the ratio num/den grows toward without bound.

    When ``num`` and ``den`` are `RadialFunction`s with declared power laws
    the answer is read off the exponents: the ratio behaves like
    r^{tail_num - tail_den} at infinity and r^{inner_num - inner_den} at 0.
    Otherwise the log-log slope is fitted over the last k nodes at each end
    and over the k nodes before them; a ratio settling to a limit through
    power-law corrections has a slope that shrinks toward the end, while a
    divergent one keeps at least ``persist`` of its outward slope.
    """
    if not np.all(np.isfinite(ratio)):
        i = int(np.argmax(~np.isfinite(ratio)))
        return "origin" if i < r.size // 2 else "infinity"
    if num is not None and den is not None:
        ends = []
        if None not in (num.inner_exponent, den.inner_exponent):
            ends.append(("origin", num.inner_exponent - den.inner_exponent < -1e-12))
        if None not in (num.tail_exponent, den.tail_exponent):
            ends.append(("infinity", num.tail_exponent - den.tail_exponent > 1e-12))
        if len(ends) == 2:
            for end, bad in ends:
                if bad:
                    return end
            return None
    if r.size < 2 * k or not np.all(ratio > 0):
        return None
    lr, lq = np.log(r), np.log(ratio)

    def slope(sl):
        return np.polyfit(lr[sl], lq[sl], 1)[0]

    outer, inner = -slope(slice(0, k)), -slope(slice(k - 1, 2 * k - 1))
    if outer > slope_tol and outer >= persist * inner:
        return "origin"
    outer, inner = slope(slice(-k, None)), slope(slice(-2 * k + 1, -k + 1))
    if outer > slope_tol and outer >= persist * inner:
        return "infinity"
    return None


# ---------------------------------------------------------------------------


def finiteness_condition(m, params, T=1e6, qc=None):
    """int_1^inf (sigma(B(0,t)) / t^{n - alpha p})^{1/(p-1)} dt/t < inf ?

    With mass growth sigma(B(0,t)) ~ t^k the integrand behaves like
    t^{(k - n + alpha p)/(p-1) - 1}; the class is read off k. The integral
    over [1, T] is also evaluated numerically and reported.
    """
    validate_wolff(params.n, params.p, params.alpha)
    n = params.n
    kern = wolff_kernel(n, params.p, params.alpha)
    name = "finiteness"
    if is_zero(m):
        return ConditionReport(name, True, 0.0, "zero measure", details={"integrand_tail_exponent": None})
    at = atomic_form(m)
    view = None if at is not None else radial_view(m)
    if at is not None or _lens_form(m) is not None or (view is not None and np.isfinite(view.support)):
        k = 0.0
    elif view is None:
        return ConditionReport(name, False, float("nan"), "measure not radial", indeterminate=True)
    else:
        k = _mass_growth(view, n)
        if k is None:
            return ConditionReport(name, False, float("nan"), "tail exponent undeclared",
                                   indeterminate=True)
    expo = (k - kern.a) * kern.b - 1.0
    finite = k < kern.a
    ts = np.geomspace(1.0, T, 121)
    M = np.array([ball_mass(m, np.zeros(n), t) for t in ts])
    h = kern.h(M, ts)
    numeric = float(integrate.simpson(h, x=np.log(ts)))
    return ConditionReport(name, bool(finite), numeric, f"t in [1, {T:g}], sigma(B(0,t))",
                           details={"integrand_tail_exponent": expo, "mass_growth_exponent": k})


def _profile_and_op(m, params, grid, qc):
    grid = _support_breaks(m, np.asarray(grid, float))
    ws = wolff_profile(params, m, grid, qc)
    op = RadialPotentialOperator(params, m, grid, qc)
    return grid, ws, op


def weaker_condition_lambda(m, params, grid=None, qc=None, *, wsigma=None, op=None, scale=1.0):
    """Smallest lambda with, at every node,

        W((W sigma)^{gamma2 q1} d sigma) <= lambda (W sigma + (W sigma)^{gamma1})
        W((W sigma)^{gamma1 q2} d sigma) <= lambda (W sigma + (W sigma)^{gamma2}).

    ``scale`` multiplies the operator (the constant K of the pde-equivalent
    system, applied to the rescaled measure whose potential is ``wsigma``).
    """
    qc = qc or DEFAULT_QC
    ex = gamma_exponents(params.p, params.q1, params.q2)
    name = "weaker_condition"
    if is_zero(m):
        return ConditionReport(name, True, 0.0, "zero measure")
    if wsigma is None or op is None:
        grid, wsigma, op = _profile_and_op(m, params, grid if grid is not None else _default_grid(m), qc)
    r = wsigma.grid
    W = wsigma.values
    lhs_u = op.profile(wsigma.pow(ex.gamma2), params.q1, scale)
    lhs_v = op.profile(wsigma.pow(ex.gamma1), params.q2, scale)
    den_u, den_v = wsigma + wsigma.pow(ex.gamma1), wsigma + wsigma.pow(ex.gamma2)
    ru = lhs_u.values / den_u.values
    rv = lhs_v.values / den_v.values
    ratio = np.maximum(ru, rv)
    lam = float(np.max(ratio))
    end = ratio_divergence(r, ru, lhs_u, den_u) or ratio_divergence(r, rv, lhs_v, den_v)
    i = int(np.argmax(ratio))
    return ConditionReport(name, end is None and np.isfinite(lam), lam,
                           f"{r.size} radial nodes in [{r[0]:.3g}, {r[-1]:.3g}]", float(r[i]),
                           details={"lambda_u": float(np.max(ru)), "lambda_v": float(np.max(rv)),
                                    "divergent_end": end})


def kappa_estimate(m, params, r_exponent, grid=None, qc=None, *, wsigma=None, op=None):
    """kappa_emp = (min over nodes of W((W sigma)^r d sigma) / (W sigma)^{r/(p-1)+1})^{(p-1)/r}."""
    qc = qc or DEFAULT_QC
    r_exponents = np.atleast_1d(np.asarray(r_exponent, float))
    if np.any(r_exponents <= 0):
        raise ValueError("r_exponent must be positive")
    name = "kappa"
    if wsigma is None or op is None:
        grid, wsigma, op = _profile_and_op(m, params, grid if grid is not None else _default_grid(m), qc)
    a = params.p - 1.0
    W = wsigma.values
    per_r = []
    for rr in r_exponents:
        lhs = op.apply(wsigma, rr)
        rho = lhs / W ** (rr / a + 1.0)
        i = int(np.argmin(rho))
        per_r.append((float(rho[i]) ** (a / rr), float(wsigma.grid[i]), float(rr)))
    kap, node, rr = min(per_r)
    return ConditionReport(name, bool(np.isfinite(kap) and kap > 1e-12), kap,
                           f"{wsigma.grid.size} radial nodes, r in {[float(x) for x in r_exponents]}",
                           node, details={"r_exponent": rr, "per_r": [p[0] for p in per_r]})


def local_integrability(m, params, s, ball_radius, qc=None, points=96):
    """Is int_{B(0,R)} (W sigma)^s d sigma finite?"""
    qc = qc or DEFAULT_QC
    n = params.n
    name = "local_integrability"
    R = float(ball_radius)
    if is_zero(m):
        return ConditionReport(name, True, 0.0, f"B(0,{R:g})")
    at = atomic_form(m)
    if at is not None:
        d = np.linalg.norm(at.locations, axis=1)
        inside = (d < R) & (at.weights > 0)
        # W sigma is +inf at each atom, and the atom carries positive mass
        if np.any(inside):
            return ConditionReport(name, False, np.inf, f"B(0,{R:g})", float(d[inside][0]),
                                   details={"reason": "atom inside the ball"})
        return ConditionReport(name, True, 0.0, f"B(0,{R:g})")
    view = radial_view(m)
    if view is None:
        return ConditionReport(name, False, float("nan"), "measure not radial", indeterminate=True)
    S = min(view.support, R)
    grid = log_grid(1e-4 * S, S, points, extra=[k for k in view.kinks if k < S])
    ws = wolff_profile(params, m, grid, qc)
    if not np.all(np.isfinite(ws.values)):
        return ConditionReport(name, False, np.inf, f"B(0,{R:g})",
                               float(grid[np.argmax(~np.isfinite(ws.values))]))
    e0 = view.inner_exponent or 0.0
    if n + e0 + s * ws.inner_exponent <= 0:
        return ConditionReport(name, False, np.inf, f"B(0,{R:g})", 0.0,
                               details={"reason": "integrand not integrable at the origin"})
    omega = float(sphere_area(n, 1.0))

    def f(x):
        return float(ws(x)) ** s * float(view.density(x)) * x ** (n - 1)

    pts = sorted(k for k in view.kinks if 0 < k < S)
    val, err = quad(f, 0.0, S, points=pts or None, limit=400, epsrel=1e-10)
    val *= omega
    ok = np.isfinite(val) and err * omega <= 1e-6 * max(abs(val), 1e-300)
    return ConditionReport(name, bool(ok), val, f"B(0,{R:g}), s={s:g}",
                           details={"error_estimate": err * omega})


def capacity_ball_scaling(params, m, radii):
    """sup_r sigma(B(x,r)) / r^{n - alpha p} over the radii, x = 0 and every atom.

    The proxy is declared unbounded from the power laws of the measure: an
    atom gives a ratio ~ r^{-(n - alpha p)} as r -> 0.
    """
    validate_wolff(params.n, params.p, params.alpha)
    n = params.n
    a = n - params.alpha * params.p
    radii = np.asarray(radii, float)
    name = "capacity_ball_scaling"
    probes = f"{radii.size} radii in [{radii.min():.3g}, {radii.max():.3g}]"
    if is_zero(m):
        return ConditionReport(name, True, 0.0, probes)
    centres = [np.zeros(n)]
    at = atomic_form(m)
    diverges = None
    if at is not None:
        pos = at.weights > 0
        centres += list(at.locations[pos])
        if np.any(pos):
            diverges = "origin"
    else:
        view = radial_view(m)
        if view is not None:
            e0 = view.inner_exponent
            if e0 is not None and e0 + params.alpha * params.p < 0:
                diverges = "origin"
            k = _mass_growth(view, n)
            if k is not None and k > a:
                diverges = "infinity"
    best, node = 0.0, None
    for c in centres:
        for r in radii:
            val = ball_mass(m, c, r) / r ** a
            if val > best:
                best, node = val, float(r)
    const = np.inf if diverges else best
    return ConditionReport(name, diverges is None, const, probes, node,
                           details={"divergent_end": diverges, "sup_on_list": best})
