"""Quadrature building blocks shared by the potential engine.

Two pieces live here:

* a batched, vectorised adaptive Gauss-Legendre integrator over many
  independent intervals at once (one owner per evaluation radius), whose
  accepted panels can be frozen into a fixed rule and re-used;
* `ShellRule`, the fixed node/weight geometry that turns a radial density g
  into the ball masses  int_{B(x,t)} g(|y|) dy  for a batch of (|x|, t) pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import warnings

import numpy as np
from scipy import integrate

from .errors import AccuracyFailure
from .geometry import cap_fraction, sphere_area


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and ranges for the t-integrals.

    ``t_min_factor`` and ``t_max_factor`` are relative to the measure scale
    (support radius, or the largest evaluation radius for unbounded support).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    t_min_factor: float = 1e-7
    t_max_factor: float = 1e7
    max_subdivisions: int = 40
    panel_order: int = 10
    cap_order: int = 24

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.t_min_factor < self.t_max_factor):
            raise ValueError("need 0 < t_min_factor < t_max_factor")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@lru_cache(maxsize=None)
def gauss01(m):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(m)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def gauss01_sin2(m):
    """Gauss rule on [0, 1] composed with s = sin^2(pi u / 2).

    The substitution makes (s)^k and (1 - s)^k with half-integer k analytic
    in u, which is the endpoint behaviour of spherical cap fractions.
    """
    u, w = gauss01(m)
    s = np.sin(0.5 * np.pi * u) ** 2
    w = w * 0.5 * np.pi * np.sin(np.pi * u)
    s.flags.writeable = False
    w.flags.writeable = False
    return s, w


@dataclass
class FixedRule:
    """Nodes and weights per owner, as produced by `adaptive_panels`."""

    owner: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    n_owners: int

    def integrate(self, values):
        return np.bincount(self.owner, weights=self.weights * values, minlength=self.n_owners)


def adaptive_panels(f, owner, a, b, n_owners, rel_tol, abs_tol, max_levels, m=10,
                    max_active=100_000):
    """Integrate f over a batch of intervals, refining panels independently.

    f(owner_idx, x) evaluates the integrand of each owner at points x
    (both 1-d arrays of equal length). Intervals [a_i, b_i] belong to owner
    ``owner[i]``; several intervals may share an owner and are summed.

    Each panel is compared against its two halves; a panel is accepted once
    the discrepancy is below its share (proportional to width) of
    max(abs_tol, rel_tol * |owner total|). Returns (totals, errors, rule)
    where ``rule`` holds the accepted half-panel Gauss nodes. Panels still
    unresolved at ``max_levels`` (or when more than ``max_active`` are live)
    are accepted as they are; their discrepancy shows up in the errors.
    """
    owner = np.asarray(owner, dtype=np.intp)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    x01, w01 = gauss01(m)
    width_total = np.bincount(owner, weights=b - a, minlength=n_owners)
    width_total[width_total == 0] = 1.0

    def gauss(own, lo, hi):
        h = hi - lo
        pts = lo[:, None] + h[:, None] * x01[None, :]
        vals = f(np.repeat(own, m), pts.ravel()).reshape(pts.shape)
        return (vals * w01[None, :]).sum(axis=1) * h

    whole = gauss(owner, a, b)
    acc_total = np.zeros(n_owners)
    acc_err = np.zeros(n_owners)
    acc_owner, acc_lo, acc_hi = [], [], []
    level = 0
    while owner.size:
        mid = 0.5 * (a + b)
        left = gauss(owner, a, mid)
        right = gauss(owner, mid, b)
        halves = left + right
        err = np.abs(whole - halves)
        running = acc_total + np.bincount(owner, weights=halves, minlength=n_owners)
        budget = np.maximum(abs_tol, rel_tol * np.abs(running))
        share = budget[owner] * (b - a) / width_total[owner]
        # stop refining at the level cap, or when refinement runs away
        ok = (err <= share) | (level >= max_levels) | (owner.size > max_active)
        if np.any(ok):
            acc_total += np.bincount(owner[ok], weights=halves[ok], minlength=n_owners)
            acc_err += np.bincount(owner[ok], weights=err[ok], minlength=n_owners)
            acc_owner.append(np.repeat(owner[ok], 2))
            acc_lo.append(np.column_stack([a[ok], mid[ok]]).ravel())
            acc_hi.append(np.column_stack([mid[ok], b[ok]]).ravel())
        bad = ~ok
        owner = np.repeat(owner[bad], 2)
        a, b = (np.column_stack([a[bad], mid[bad]]).ravel(),
                np.column_stack([mid[bad], b[bad]]).ravel())
        whole = np.column_stack([left[bad], right[bad]]).ravel()
        level += 1

    if acc_owner:
        po = np.concatenate(acc_owner)
        lo = np.concatenate(acc_lo)
        hi = np.concatenate(acc_hi)
    else:
        po = np.zeros(0, np.intp)
        lo = hi = np.zeros(0)
    h = hi - lo
    nodes = (lo[:, None] + h[:, None] * x01[None, :]).ravel()
    weights = (h[:, None] * w01[None, :]).ravel()
    rule = FixedRule(np.repeat(po, m), nodes, weights, n_owners)
    return acc_total, acc_err, rule


def check_accuracy(totals, errors, rel_tol, abs_tol, what):
    budget = np.maximum(abs_tol, rel_tol * np.abs(totals))
    # the width-share criterion is local, so allow a modest global slack
    bad = errors > 10.0 * budget
    if np.any(bad):
        i = int(np.argmax(errors / budget))
        raise AccuracyFailure(
            f"{what}: quadrature did not converge (error estimate {errors[i]:.3e} "
            f"vs tolerance {budget[i]:.3e})", error_estimate=float(errors[i]), index=i)


class ShellRule:
    """Fixed rule for  M_k = int_{B(x_k, t_k)} g(|y|) dy,  |x_k| = r_k.

    The density g lives on [0, support). The ball mass splits as

        full part:    spheres |y| = s < t - r lie entirely inside the ball,
                      handled through a cumulative table of int_0^s g s^{n-1}
        partial part: |r - t| < s < r + t, weighted by the cap fraction.

    ``knots`` are radii where g is only piecewise smooth (spline knots, the
    support edge). Table panels and cap intervals are split there, so each
    Gauss rule only ever sees a smooth piece: a cap piece touching a true
    end of the cap interval uses a sin^2-mapped rule (the cap fraction has
    power-law behaviour there), a piece between two knots a plain one.

    Node positions and geometric weights depend only on (n, r_k, t_k,
    support, knots), so the same rule serves every density on that support.
    """

    def __init__(self, n, r, t, support=np.inf, *, scale=None, cap_order=24,
                 table_ratio=1.25, table_order=8, s_far=None, knots=(), piece_order=6):
        self.n = int(n)
        r = np.asarray(r, float).ravel()
        t = np.asarray(t, float).ravel()
        self.r, self.t = r, t
        self.support = float(support)
        finite = np.isfinite(self.support)
        omega = float(sphere_area(self.n, 1.0))
        self.omega = omega
        nm1 = self.n - 1
        size = r.size
        self.size = size

        # cumulative table
        full_hi = np.clip(t - r, 0.0, self.support)
        if finite:
            top = self.support
        else:
            top = max(float(full_hi.max(initial=0.0)), float(np.max(r + t, initial=0.0)))
            if s_far is not None:
                top = max(top, s_far)
            top = max(top, 1e-300)
        self.s_top = top
        if scale is None:
            scale = top
        knots = np.unique(np.asarray([k for k in knots if 0 < k < top], float))
        s_lo = 1e-9 * min(scale, top)
        npan = max(1, int(np.ceil(np.log(top / s_lo) / np.log(table_ratio))))
        edges = np.union1d(np.concatenate([[0.0], np.geomspace(s_lo, top, npan + 1)]), knots)
        self.edges = edges
        xg, wg = gauss01(table_order)
        h = np.diff(edges)
        tab_nodes = (edges[:-1, None] + h[:, None] * xg[None, :])
        tab_w = h[:, None] * wg[None, :] * tab_nodes ** nm1 * omega
        self._tab_nodes = tab_nodes.ravel()
        self._tab_w = tab_w
        self._npan = h.size
        self._table_order = table_order

        # partial table panel for the full part
        k = np.clip(np.searchsorted(edges, full_hi, side="right") - 1, 0, h.size - 1)
        self._full_k = k
        lo = edges[k]
        hp = np.maximum(full_hi - lo, 0.0)
        fp_nodes = lo[:, None] + hp[:, None] * xg[None, :]
        self._fp_nodes = fp_nodes.ravel()
        self._fp_w = (hp[:, None] * wg[None, :] * fp_nodes ** nm1 * omega)

        # partial (cap) part, split at interior knots
        a = np.abs(r - t)
        bnd = np.minimum(r + t, self.support)
        live = bnd > a
        j0 = np.searchsorted(knots, a, side="right")
        j1 = np.searchsorted(knots, bnd, side="left")
        cnt = np.where(live, np.maximum(j1 - j0, 0), 0)
        npieces = np.where(live, cnt + 1, 0)
        piece_owner = np.repeat(np.arange(size), npieces)
        first = np.concatenate([[0], np.cumsum(npieces)[:-1]])
        rank = np.arange(piece_owner.size) - first[piece_owner]
        # piece p of owner i spans [e_p, e_{p+1}] with e_0 = a_i, e_last = bnd_i
        kidx = j0[piece_owner] + rank
        left = np.where(rank == 0, a[piece_owner], knots[np.clip(kidx - 1, 0, max(knots.size - 1, 0))]
                        if knots.size else a[piece_owner])
        last = rank == npieces[piece_owner] - 1
        right = np.where(last, bnd[piece_owner], knots[np.clip(kidx, 0, max(knots.size - 1, 0))]
                         if knots.size else bnd[piece_owner])
        single = npieces[piece_owner] == 1
        # a knot may sit arbitrarily close to a cap end, so the two pieces at
        # either end get the sin^2-mapped high-order rule
        end_piece = (rank <= 1) | (rank >= npieces[piece_owner] - 2)
        order = np.where(single | end_piece, cap_order, piece_order)
        nodes_l, w_l, own_l = [], [], []
        for m in np.unique(order):
            sel = order == m
            if m == piece_order:
                inner = sel & ~end_piece
                edge_sel = sel & end_piece
            else:
                inner = np.zeros_like(sel)
                edge_sel = sel
            for mask, rule in ((edge_sel, gauss01_sin2(int(m))), (inner, gauss01(int(m)))):
                if not np.any(mask):
                    continue
                xs, ws = rule
                L, R = left[mask], right[mask]
                span = R - L
                nd = L[:, None] + span[:, None] * xs[None, :]
                ow = piece_owner[mask]
                frac = cap_fraction(self.n, nd, r[ow][:, None], t[ow][:, None])
                nodes_l.append(nd.ravel())
                w_l.append((span[:, None] * ws[None, :] * nd ** nm1 * frac * omega).ravel())
                own_l.append(np.repeat(ow, xs.size))
        if nodes_l:
            self._cap_nodes = np.concatenate(nodes_l)
            self._cap_w = np.concatenate(w_l)
            self._cap_owner = np.concatenate(own_l)
        else:
            self._cap_nodes = np.zeros(0)
            self._cap_w = np.zeros(0)
            self._cap_owner = np.zeros(0, np.intp)

    def nodes(self):
        """All radii at which the density must be evaluated."""
        return np.concatenate([self._tab_nodes, self._fp_nodes, self._cap_nodes])

    def mass_from_values(self, gvals):
        """Ball masses from density values at `nodes()` (same order)."""
        nt = self._tab_nodes.size
        nf = self._fp_nodes.size
        gt = gvals[:nt].reshape(self._npan, self._table_order)
        gf = gvals[nt:nt + nf].reshape(self.size, -1)
        gc = gvals[nt + nf:]
        panel = (gt * self._tab_w).sum(axis=1)
        cum = np.concatenate([[0.0], np.cumsum(panel)])
        # empty full parts put their (zero-weight) nodes at the origin, where a
        # singular density is infinite
        with np.errstate(invalid="ignore"):
            gfw = np.where(self._fp_w == 0.0, 0.0, gf * self._fp_w)
        full = cum[self._full_k] + gfw.sum(axis=1)
        part = np.bincount(self._cap_owner, weights=gc * self._cap_w, minlength=self.size)
        return full + part

    def cumulative_from_values(self, gvals):
        """Table of int_{B(0, edge)} g, for the total and far-field mass."""
        nt = self._tab_nodes.size
        gt = gvals[:nt].reshape(self._npan, self._table_order)
        panel = (gt * self._tab_w).sum(axis=1)
        return self.edges, np.concatenate([[0.0], np.cumsum(panel)])

    def mass(self, g):
        return self.mass_from_values(np.asarray(g(self.nodes()), float))


def quad(f, a, b, **kwargs):
    """scipy's adaptive quad without its warnings; callers check the error."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **kwargs)[:2]
