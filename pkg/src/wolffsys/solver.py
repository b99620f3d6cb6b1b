"""Monotone successive approximations for the sublinear Wolff system

    u = K W_{alpha,p}(v^{q1} d sigma),   v = K W_{alpha,p}(u^{q2} d sigma)

(K = 1 in integral mode) on a radial grid, started at a verified
subsolution and confined by a verified supersolution.

In pde-equivalent mode K W(f d sigma) = W(f d(K^{p-1} sigma)), so every
quantity built from "W sigma" (barriers, sandwich constants, lower bound)
refers to the potential of the rescaled measure, K W sigma.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conditions import (ConditionReport, _support_breaks, capacity_ball_scaling,
                         finiteness_condition, kappa_estimate, ratio_divergence,
                         weaker_condition_lambda)
from .errors import (ConditionFailure, DegenerateMeasure, InvalidArgument, NumericFailure,
                     SandwichFailure, SupersolutionFailure)
from .exponents import gamma_exponents, limit_constant, lower_bound_sequence, subsolution_scale
from .measures import atomic_form, is_zero, radial_view
from .params import validate
from .potentials import DEFAULT_QC, RadialPotentialOperator, wolff_profile
from .quadrature import QuadratureConfig
from .radial import RadialFunction, log_grid


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_steps: int = 500
    kappa_hint: float = 1.0
    lambda2_cap: float = 2.0 ** 60
    grid_tol_abs: float = 1e-12
    grid_tol_rel: float = 1e-10
    grid_points: int = 64
    grid_min: float | None = None   # default 1e-2 * support radius
    grid_max: float | None = None   # default 1e2 * support radius
    qc: QuadratureConfig = field(default_factory=QuadratureConfig)
    lower_bound: bool = True


@dataclass
class Barriers:
    under_u: RadialFunction
    under_v: RadialFunction
    over_u: RadialFunction
    over_v: RadialFunction
    lambda1: float
    lambda2: float


@dataclass
class SolutionPair:
    u: RadialFunction
    v: RadialFunction
    params: object
    measure_tag: str
    converged: bool
    residual_u: float
    residual_v: float


@dataclass
class TraceStep:
    step: int
    u: np.ndarray
    v: np.ndarray
    sup_increment_u: float
    sup_increment_v: float
    residual_u: float = float("nan")
    residual_v: float = float("nan")


@dataclass
class IterationTrace:
    steps: list
    monotone_ok: bool
    barrier_ok: bool


@dataclass
class SystemSetup:
    """Everything that stays fixed while iterating: grid, W sigma, operators."""

    params: object
    grid: np.ndarray
    wsigma: RadialFunction        # potential of the (rescaled) measure
    op_u: RadialPotentialOperator
    op_v: RadialPotentialOperator
    K: float
    tail: float | None

    def T_u(self, v):
        """K W(v^{q1} d sigma) as a RadialFunction."""
        return self.op_u.profile(v, self.params.q1, self.K)

    def T_v(self, u):
        return self.op_v.profile(u, self.params.q2, self.K)

    def zero(self):
        return RadialFunction(self.grid, np.zeros(self.grid.size), self.tail, 0.0, self.wsigma.breaks)


def _grid_for(m, config):
    view = radial_view(m)
    L = view.support if np.isfinite(view.support) else view.scales[1]
    lo = config.grid_min if config.grid_min is not None else 1e-2 * L
    hi = config.grid_max if config.grid_max is not None else 1e2 * L
    if config.grid_points < 16:
        raise InvalidArgument("grid needs at least 16 points")
    return _support_breaks(m, log_grid(lo, hi, config.grid_points))


def setup_system(params, m, grid=None, config=None):
    config = config or SolverConfig()
    if radial_view(m) is None:
        raise InvalidArgument("the system is solved for radial measures only")
    grid = _grid_for(m, config) if grid is None else _support_breaks(m, np.asarray(grid, float))
    ws = wolff_profile(params, m, grid, config.qc)
    K = params.scale
    if K != 1.0:
        ws = RadialFunction(ws.grid, K * ws.values, ws.tail_exponent, ws.inner_exponent, ws.breaks)
    op_u = RadialPotentialOperator(params, m, grid, config.qc)
    op_v = RadialPotentialOperator(params, m, grid, config.qc)
    return SystemSetup(params, ws.grid, ws, op_u, op_v, K, ws.tail_exponent)


def build_barriers(params, m, kappa_hint=1.0, grid=None, config=None, setup=None):
    """Find lambda1 <= lambda2 such that

        lambda1 (W sigma)^{gamma_i}                are subsolutions and
        lambda2 (W sigma + (W sigma)^{gamma_i})    are supersolutions

    at every grid node. By homogeneity, W((lam f)^q d sigma) =
    lam^{q/(p-1)} W(f^q d sigma), so four potentials computed once decide
    every candidate lambda.
    """
    config = config or SolverConfig()
    setup = setup or setup_system(params, m, grid, config)
    ex = gamma_exponents(params.p, params.q1, params.q2)
    ws = setup.wsigma
    W = ws.values
    a = params.p - 1.0
    q1, q2 = params.q1, params.q2
    if not np.any(W > 0):
        z = setup.zero()
        return Barriers(z, z, z, z, 1.0, 1.0), setup
    lo_u, lo_v = ws.pow(ex.gamma1), ws.pow(ex.gamma2)
    hi_u, hi_v = ws + lo_u, ws + lo_v
    A_u, A_v = setup.T_u(lo_v).values, setup.T_v(lo_u).values
    B_u, B_v = setup.T_u(hi_v).values, setup.T_v(hi_u).values

    lam1 = subsolution_scale(params.p, q1, q2, kappa_hint)
    ru = np.min(A_u / lo_u.values)
    rv = np.min(A_v / lo_v.values)
    if not (ru > 0 and rv > 0):
        raise DegenerateMeasure("subsolution search: W(...) vanishes where W sigma does not")
    while not (lam1 ** (1 - q1 / a) <= ru and lam1 ** (1 - q2 / a) <= rv):
        lam1 *= 0.5
        if lam1 < 1e-300:
            raise DegenerateMeasure("lambda1 underflow in subsolution search")

    lam2 = 1.0
    Hu, Hv = hi_u.values, hi_v.values
    while True:
        sup_ok = np.all(lam2 * Hu >= lam2 ** (q1 / a) * B_u) and np.all(lam2 * Hv >= lam2 ** (q2 / a) * B_v)
        order_ok = np.all(lam2 * Hu >= lam1 * lo_u.values) and np.all(lam2 * Hv >= lam1 * lo_v.values)
        if sup_ok and order_ok:
            break
        lam2 *= 2.0
        if lam2 > config.lambda2_cap:
            raise SupersolutionFailure(
                f"lambda2 exceeded {config.lambda2_cap:g}; the measure likely violates the capacity condition")
    bar = Barriers(lo_u.scaled(lam1), lo_v.scaled(lam1), hi_u.scaled(lam2), hi_v.scaled(lam2), lam1, lam2)
    return bar, setup


def _rel_sup(d, ref):
    s = np.max(np.abs(ref))
    return float(np.max(np.abs(d)) / s) if s > 0 else float(np.max(np.abs(d)))


def iterate(params, m, barriers, grid=None, tol=1e-8, max_steps=500, config=None, setup=None):
    """u_j = K W(v_{j-1}^{q1} d sigma), v_j = K W(u_{j-1}^{q2} d sigma) from the subsolution.

    Stops once the relative sup-increment of both components drops below
    tol. The residual of the returned pair is the increment one further
    step would make, computed by one extra application.
    """
    config = config or SolverConfig()
    setup = setup or setup_system(params, m, grid, config)
    ta, tr = config.grid_tol_abs, config.grid_tol_rel
    uf, vf = barriers.under_u, barriers.under_v
    u, v = uf.values, vf.values
    over_u, over_v = barriers.over_u.values, barriers.over_v.values
    steps = [TraceStep(0, u, v, float("nan"), float("nan"))]
    barrier_ok = True
    converged = False

    def advance(uf, vf):
        return setup.T_u(vf), setup.T_v(uf)

    for j in range(1, max_steps + 1):
        ufn, vfn = advance(uf, vf)
        un, vn = ufn.values, vfn.values
        for name, new, old in (("u", un, u), ("v", vn, v)):
            bad = new < old - (ta + tr * np.abs(old))
            if np.any(bad):
                i = int(np.argmax(bad))
                raise NumericFailure(
                    f"monotonicity violated for {name} at step {j}, r={setup.grid[i]:.6g} "
                    f"({new[i]:.17g} < {old[i]:.17g})", step=j, node=float(setup.grid[i]))
        if np.any(un > over_u * (1 + tr) + ta) or np.any(vn > over_v * (1 + tr) + ta):
            barrier_ok = False
        iu, iv = _rel_sup(un - u, un), _rel_sup(vn - v, vn)
        steps[-1].residual_u, steps[-1].residual_v = iu, iv
        steps.append(TraceStep(j, un, vn, iu, iv))
        uf, vf, u, v = ufn, vfn, un, vn
        if max(iu, iv) < tol:
            converged = True
            break
    # residual of the final pair = increment of one more step
    ufn, vfn = advance(uf, vf)
    ru, rv = _rel_sup(ufn.values - u, ufn.values), _rel_sup(vfn.values - v, vfn.values)
    steps[-1].residual_u, steps[-1].residual_v = ru, rv
    pair = SolutionPair(uf, vf, params, type(m).__name__, converged, ru, rv)
    monotone_ok = True  # a violation raises above
    return pair, IterationTrace(steps, monotone_ok, barrier_ok)


def verify_sandwich(pair, m, params, constants_search=True, wsigma=None, config=None):
    """Smallest c >= 1 with

        c^{-1} (W sigma)^{gamma1} <= u <= c (W sigma + (W sigma)^{gamma1})

    and the gamma2 analogue for v, at every node. The four one-sided
    constants are reported separately.
    """
    config = config or SolverConfig()
    ex = gamma_exponents(params.p, params.q1, params.q2)
    name = "sandwich"
    if wsigma is None:
        ws = wolff_profile(params, m, pair.u.grid, config.qc)
        wsigma = RadialFunction(ws.grid, params.scale * ws.values, ws.tail_exponent,
                                ws.inner_exponent, ws.breaks)
    r = wsigma.grid
    W = wsigma.values
    u, v = pair.u(r), pair.v(r)
    if not np.any(W > 0):
        ok = not np.any(u > 0) and not np.any(v > 0)
        return ConditionReport(name, ok, 1.0, "zero potential",
                               details={"c_lower_u": 1.0, "c_upper_u": 1.0,
                                        "c_lower_v": 1.0, "c_upper_v": 1.0})
    uf, vf = pair.u, pair.v
    if not np.array_equal(uf.grid, r):
        uf =RadialFunction(r, u, pair.u.tail_exponent, pair.u.inner_exponent, wsigma.breaks)
        vf = RadialFunction(r, v, pair.v.tail_exponent, pair.v.inner_exponent, wsigma.breaks)
    lo_u, lo_v = wsigma.pow(ex.gamma1), wsigma.pow(ex.gamma2)
    hi_u, hi_v = wsigma + lo_u, wsigma + lo_v
    pairs = {"c_lower_u": (lo_u, uf), "c_upper_u": (uf, hi_u),
             "c_lower_v": (lo_v, vf), "c_upper_v": (vf, hi_v)}
    ratios = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for key, (num, den) in pairs.items():
            ratios[key] = num.values / den.values
    consts = {}
    for key, ratio in ratios.items():
        end = ratio_divergence(r, ratio, *pairs[key])
        if end is not None:
            raise SandwichFailure(f"{key} diverges toward {end}", end=end)
        consts[key] = float(np.max(ratio))
    c = max(1.0, *consts.values())
    worst_key = max(consts, key=consts.get)
    worst = float(r[int(np.argmax(ratios[worst_key]))])
    return ConditionReport(name, bool(np.isfinite(c)), c, f"{r.size} radial nodes", worst,
                           details=dict(consts, worst_constant=worst_key))


def kappa_exponents(p, q1, q2, J=6):
    """Exponents r at which the kappa inequality enters the lower-bound argument."""
    ex = gamma_exponents(p, q1, q2)
    a = p - 1.0
    seq = lower_bound_sequence(p, q1, q2, J=J).deltas
    seq_t = lower_bound_sequence(p, q2, q1, J=J).deltas
    rs = {q1 * ex.gamma2, q2 * ex.gamma1}
    for d in seq:
        rs.update((q2 * d, q1 * (q2 * d / a + 1.0)))
    for d in seq_t:
        rs.update((q1 * d, q2 * (q1 * d / a + 1.0)))
    return sorted(rs)


@dataclass
class SolveResult:
    pair: SolutionPair
    trace: IterationTrace
    report: dict
    barriers: Barriers | None = None
    wsigma: RadialFunction | None = None
    lower_u: RadialFunction | None = None
    lower_v: RadialFunction | None = None

    def __iter__(self):
        return iter((self.pair, self.trace, self.report))


def _refuse(report, why):
    raise ConditionFailure(f"{report.condition} failed: {why}", report=report)


def solve(params, m, config=None, grid=None):
    """Barriers, iteration, sandwich check and lower bound in one go.

    Returns a `SolveResult`, which unpacks as (pair, trace, report) where
    report maps condition names to `ConditionReport` objects.
    """
    config = config or SolverConfig()
    validate(params)
    fin = finiteness_condition(m, params)
    if not fin.passed:
        _refuse(fin, "the Wolff potential of sigma is infinite")
    reports = {"finiteness": fin}
    at = atomic_form(m)
    if at is not None and not is_zero(m):
        cap = capacity_ball_scaling(params, m, np.geomspace(1e-4, 1e2, 25))
        _refuse(cap, "point masses violate the capacity condition")
    if is_zero(m):
        n_pts = config.grid_points
        grid = log_grid(config.grid_min or 1e-2, config.grid_max or 1e2, n_pts) if grid is None else grid
        z = RadialFunction(grid, np.zeros(len(grid)), 0.0, 0.0)
        pair = SolutionPair(z, z, params, type(m).__name__, True, 0.0, 0.0)
        trace = IterationTrace([TraceStep(0, z.values, z.values, float("nan"), float("nan"), 0.0, 0.0),
                                TraceStep(1, z.values, z.values, 0.0, 0.0, 0.0, 0.0)], True, True)
        reports["sandwich"] = ConditionReport("sandwich", True, 1.0, "zero measure")
        reports["weaker_condition"] = ConditionReport("weaker_condition", True, 0.0, "zero measure")
        reports["lower_bound"] = ConditionReport("lower_bound", True, 0.0, "zero measure")
        bars = Barriers(z, z, z, z, 1.0, 1.0)
        return SolveResult(pair, trace, reports, bars, z, z, z)
    if radial_view(m) is None:
        raise InvalidArgument("the system is solved for radial measures only")

    setup = setup_system(params, m, grid, config)
    bars, setup = build_barriers(params, m, config.kappa_hint, config=config, setup=setup)
    pair, trace = iterate(params, m, bars, tol=config.tol, max_steps=config.max_steps,
                          config=config, setup=setup)
    ws = setup.wsigma
    sand = verify_sandwich(pair, m, params, wsigma=ws, config=config)
    reports["sandwich"] = sand
    weak = weaker_condition_lambda(m, params, wsigma=ws, op=setup.op_u, scale=setup.K)
    a = params.p - 1.0
    d = sand.details
    lam_pair = max(d["c_lower_v"] ** (params.q1 / a) * d["c_upper_u"],
                   d["c_lower_u"] ** (params.q2 / a) * d["c_upper_v"])
    c = sand.constant
    lam_conv = max(c ** ((a + params.q1) / a), c ** ((a + params.q2) / a))
    weak.details.update(lambda_pair=lam_pair, lambda_converse=lam_conv,
                        consistent=bool(weak.constant <= 1.1 * lam_pair and lam_pair <= lam_conv * (1 + 1e-9)))
    reports["weaker_condition"] = weak

    lower_u = lower_v = None
    if config.lower_bound:
        # kappa is scale invariant, so the unscaled potential serves
        base_ws = ws if setup.K == 1.0 else ws.scaled(1.0 / setup.K)
        kap = kappa_estimate(m, params, kappa_exponents(params.p, params.q1, params.q2),
                             wsigma=base_ws, op=setup.op_u)
        reports["kappa"] = kap
        ex = gamma_exponents(params.p, params.q1, params.q2)
        C = limit_constant(params.p, params.q1, params.q2, kap.constant)
        Ct = limit_constant(params.p, params.q2, params.q1, kap.constant)
        lower_u = ws.pow(ex.gamma1).scaled(C)
        lower_v = ws.pow(ex.gamma2).scaled(Ct)
        tol = config.grid_tol_abs + config.grid_tol_rel * pair.u.values
        gap_u = pair.u.values - lower_u.values
        gap_v = pair.v.values - lower_v.values
        ok = bool(np.all(gap_u >= -tol) and np.all(gap_v >= -(config.grid_tol_abs + config.grid_tol_rel * pair.v.values)))
        with np.errstate(divide="ignore", invalid="ignore"):
            margin = min(np.min(pair.u.values / lower_u.values), np.min(pair.v.values / lower_v.values))
        reports["lower_bound"] = ConditionReport(
            "lower_bound", ok, C, f"{ws.grid.size} radial nodes", float(ws.grid[int(np.argmin(gap_u))]),
            details={"C": C, "C_tilde": Ct, "kappa": kap.constant, "min_ratio": float(margin)})
    return SolveResult(pair, trace, reports, bars, ws, lower_u, lower_v)
