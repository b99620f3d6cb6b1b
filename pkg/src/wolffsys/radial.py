"""Nonnegative functions of |x| sampled on a radial grid."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InvalidArgument


def log_grid(r_min, r_max, points, extra=()):
    """Log-spaced radii from `r_min` to `r_max`, with `extra` radii merged in.

    Extra radii inside the range are inserted as nodes (duplicates dropped);
    this is how a support radius becomes a grid node.
    """
    if not (r_min > 0 and r_max > r_min):
        raise InvalidArgument(f"bad grid range [{r_min}, {r_max}]")
    if points < 2:
        raise InvalidArgument("grid needs at least 2 points")
    grid = np.geomspace(r_min, r_max, int(points))
    extra = [float(e) for e in extra if r_min < e < r_max and np.isfinite(e)]
    if extra:
        grid = np.union1d(grid, extra)
        # drop nodes that nearly coincide with an inserted radius
        keep = np.ones(grid.size, bool)
        for e in extra:
            close = np.abs(np.log(grid / e)) < 1e-3
            close &= ~np.isin(grid, extra)
            keep &= ~close
        grid = grid[keep]
    return grid


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """A nonnegative function of the radius.

    Between nodes the function is a cubic spline in (log r, log f); when some
    values are zero the interpolation falls back to linear-in-log-r on the raw
    values. Outside the grid it follows power laws: ``f(r0) (r/r0)**inner``
    below the first node and ``f(rM) (r/rM)**tail`` above the last one. A
    ``None`` exponent means the function is undefined there.

    ``breaks`` are radii (grid nodes) across which only continuity is
    assumed; the spline is fitted separately on each side.
    """

    grid: np.ndarray
    values: np.ndarray
    tail_exponent: float | None = None
    inner_exponent: float | None = 0.0
    breaks: tuple = field(default=())

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if grid.size != values.size or grid.size < 1:
            raise InvalidArgument("grid and values must be nonempty and of equal length")
        if not np.all(np.isfinite(grid)) or grid[0] <= 0:
            raise InvalidArgument("grid must be finite with r_0 > 0")
        if np.any(np.diff(grid) <= 0):
            raise InvalidArgument("grid must be strictly increasing")
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise InvalidArgument("values must be finite and nonnegative")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        breaks = tuple(sorted(float(b) for b in self.breaks if grid[0] < b < grid[-1]))
        object.__setattr__(self, "breaks", breaks)

    @classmethod
    def constant(cls, value=1.0):
        return cls(np.array([1.0]), np.array([float(value)]), 0.0, 0.0)

    @classmethod
    def power(cls, exponent, coefficient=1.0):
        """The function ``coefficient * r**exponent``."""
        return cls(np.array([1.0]), np.array([float(coefficient)]), float(exponent), float(exponent))

    @classmethod
    def from_callable(cls, f, grid, **kwargs):
        grid = np.asarray(grid, float)
        return cls(grid, np.asarray(f(grid), float), **kwargs)

    @property
    def r_min(self):
        return self.grid[0]

    @property
    def r_max(self):
        return self.grid[-1]

    @cached_property
    def is_zero(self):
        return not np.any(self.values > 0)

    @cached_property
    def _pieces(self):
        """(lo, hi, interpolant) triples covering [r_0, r_M]."""
        lx = np.log(self.grid)
        positive = bool(np.all(self.values > 0))
        ly = np.log(self.values) if positive else self.values
        cuts = [0]
        for b in self.breaks:
            k = int(np.argmin(np.abs(self.grid - b)))
            if 0 < k < self.grid.size - 1 and k not in cuts:
                cuts.append(k)
        cuts.append(self.grid.size - 1)
        pieces = []
        for i0, i1 in zip(cuts[:-1], cuts[1:]):
            xs, ys = lx[i0:i1 + 1], ly[i0:i1 + 1]
            if positive and xs.size >= 4:
                pieces.append((xs[0], xs[-1], CubicSpline(xs, ys), True))
            else:
                pieces.append((xs[0], xs[-1], (xs, ys), positive))
        return pieces

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        flat = r.ravel()
        res = out.ravel()
        if self.grid.size == 1:
            lo = flat <= self.grid[0]
            hi = ~lo
        else:
            lo = flat < self.grid[0]
            hi = flat > self.grid[-1]
        mid = ~(lo | hi)
        if np.any(lo):
            if self.inner_exponent is None:
                raise InvalidArgument(
                    f"radial function undefined below r={self.grid[0]:g} (no inner exponent)")
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                res[lo] = self.values[0] * (flat[lo] / self.grid[0]) ** self.inner_exponent
            if self.values[0] == 0:
                res[lo] = 0.0
        if np.any(hi):
            if self.tail_exponent is None:
                raise InvalidArgument(
                    f"radial function undefined above r={self.grid[-1]:g} (no tail exponent)")
            with np.errstate(over="ignore", under="ignore"):
                res[hi] = self.values[-1] * (flat[hi] / self.grid[-1]) ** self.tail_exponent
        if np.any(mid):
            res[mid] = self._interior(flat[mid])
        return out if r.ndim else float(out)

    def _interior(self, r):
        x = np.log(r)
        out = np.empty(x.shape)
        done = np.zeros(x.shape, bool)
        for x0, x1, interp, logspace in self._pieces:
            sel = (~done) & (x <= x1)
            if not np.any(sel):
                continue
            if isinstance(interp, tuple):
                y = np.interp(x[sel], *interp)
            else:
                y = interp(x[sel])
            out[sel] = np.exp(y) if logspace else y
            done |= sel
        if not np.all(done):
            out[~done] = self.values[-1]
        return out

    def _coefficients(self):
        """Per-interval polynomial coefficients in (log r) of the log-log spline."""
        M = self.grid.size
        c = np.zeros((4, M - 1))
        for x0, x1, interp, _ in self._pieces:
            i0 = int(np.searchsorted(self.grid, np.exp(x0) * (1 - 1e-14)))
            if isinstance(interp, tuple):
                xs, ys = interp
                c[2, i0:i0 + xs.size - 1] = np.diff(ys) / np.diff(xs)
                c[3, i0:i0 + xs.size - 1] = ys[:-1]
            else:
                c[:, i0:i0 + interp.c.shape[1]] = interp.c
        return c

    def sampler(self, r):
        """Evaluator of functions sharing this grid and breaks at fixed radii."""
        return Sampler(self, r)

    def scaled(self, a):
        return RadialFunction(self.grid, a * self.values, self.tail_exponent,
                              self.inner_exponent, self.breaks)

    def pow(self, q):
        """Pointwise power; exponents of the extrapolating laws scale with q."""
        tail = None if self.tail_exponent is None else q * self.tail_exponent
        inner = None if self.inner_exponent is None else q * self.inner_exponent
        return RadialFunction(self.grid, self.values ** q, tail, inner, self.breaks)

    def __add__(self, other):
        if not isinstance(other, RadialFunction) or not np.array_equal(self.grid, other.grid):
            return NotImplemented
        tails = [e for e in (self.tail_exponent, other.tail_exponent)]
        inners = [e for e in (self.inner_exponent, other.inner_exponent)]
        # the slower-decaying / more singular term dominates the extrapolation
        tail = None if None in tails else max(tails)
        inner = None if None in inners else min(inners)
        return RadialFunction(self.grid, self.values + other.values, tail, inner,
                              tuple(sorted(set(self.breaks) | set(other.breaks))))

    def with_values(self, values, tail_exponent=None, inner_exponent=None):
        tail = self.tail_exponent if tail_exponent is None else tail_exponent
        inner = self.inner_exponent if inner_exponent is None else inner_exponent
        return RadialFunction(self.grid, values, tail, inner, self.breaks)

    def __repr__(self):
        return (f"RadialFunction({self.grid.size} nodes on [{self.grid[0]:.3g}, {self.grid[-1]:.3g}], "
                f"tail={self.tail_exponent}, inner={self.inner_exponent})")


class Sampler:
    """Evaluates RadialFunctions on one grid at a fixed set of radii.

    Locating the radii in the grid is done once, so repeated evaluation
    (as in a fixed-point iteration) costs one polynomial per radius.
    """

    def __init__(self, template, r):
        self.grid = template.grid
        self.breaks = template.breaks
        r = np.asarray(r, float)
        self.shape = r.shape
        flat = r.ravel()
        g = self.grid
        if g.size == 1:
            self.lo, self.hi = flat <= g[0], flat > g[0]
        else:
            self.lo, self.hi = flat < g[0], flat > g[-1]
        self.mid = ~(self.lo | self.hi)
        self.rel_lo = flat[self.lo] / g[0]
        self.rel_hi = flat[self.hi] / g[-1]
        lx = np.log(g)
        x = np.log(flat[self.mid])
        if g.size > 1:
            self.idx = np.clip(np.searchsorted(lx, x, side="right") - 1, 0, g.size - 2)
            self.dx = x - lx[self.idx]
        self.r = r

    def __call__(self, f):
        if (f.grid is not self.grid and not np.array_equal(f.grid, self.grid)) \
                or f.breaks != self.breaks or not np.all(f.values > 0) or f.grid.size < 2:
            return f(self.r)
        out = np.empty(self.lo.size)
        if self.lo.any():
            if f.inner_exponent is None:
                raise InvalidArgument(
                    f"radial function undefined below r={f.grid[0]:g} (no inner exponent)")
            with np.errstate(divide="ignore", over="ignore", under="ignore"):
                out[self.lo] = f.values[0] * self.rel_lo ** f.inner_exponent
        if self.hi.any():
            if f.tail_exponent is None:
                raise InvalidArgument(
                    f"radial function undefined above r={f.grid[-1]:g} (no tail exponent)")
            with np.errstate(over="ignore", under="ignore"):
                out[self.hi] = f.values[-1] * self.rel_hi ** f.tail_exponent
        c = f._coefficients()[:, self.idx]
        dx = self.dx
        out[self.mid] = np.exp(((c[0] * dx + c[1]) * dx + c[2]) * dx + c[3])
        return out.reshape(self.shape)
