"""Nonnegative Radon measures on R^n with ball-mass queries.

Five concrete variants are provided:

``Atomic``        finitely many point masses
``RadialDensity`` an absolutely continuous measure g(|y|) dy, g a
                  `RadialFunction`, truncated at ``support_radius``
``BallLebesgue``  a constant multiple of Lebesgue measure on a ball
``Weighted``      w(|y|)**q dm(y) for a base measure m
``Scaled``        a * m

All are immutable. `ball_mass` uses the open ball B(x, t).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import AccuracyFailure, InvalidArgument
from .geometry import ball_volume, cap_fraction, lens_volume, sphere_area
from .quadrature import quad
from .radial import RadialFunction


def _point(x, n=None):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise InvalidArgument(f"not a finite point: {x!r}")
    if n is not None and x.size != n:
        raise InvalidArgument(f"point has dimension {x.size}, expected {n}")
    return x


@dataclass(frozen=True, eq=False)
class Atomic:
    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, float)
        w = np.asarray(self.weights, float).ravel()
        if loc.ndim == 1:
            loc = loc.reshape(w.size, -1) if w.size else loc.reshape(0, max(loc.size, 1))
        if loc.shape[0] != w.size:
            raise InvalidArgument("need one weight per atom")
        if not np.all(np.isfinite(loc)) or not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidArgument("atom locations must be finite and weights nonnegative")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.locations.shape[1]


@dataclass(frozen=True, eq=False)
class RadialDensity:
    """g(|y|) dy on |y| < support_radius.

    With ``support_radius = inf`` the density beyond its grid follows the
    power law ``density.tail_exponent`` (the decay exponent).
    """

    density: RadialFunction
    support_radius: float = np.inf

    def __post_init__(self):
        if not isinstance(self.density, RadialFunction):
            raise InvalidArgument("density must be a RadialFunction")
        if not self.support_radius > 0:
            raise InvalidArgument("support_radius must be positive")


@dataclass(frozen=True, eq=False)
class BallLebesgue:
    center: np.ndarray
    radius: float
    density: float = 1.0

    def __post_init__(self):
        c = _point(self.center)
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidArgument("radius must be positive and finite")
        if not (np.isfinite(self.density) and self.density >= 0):
            raise InvalidArgument("density must be nonnegative")
        object.__setattr__(self, "center", c)

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class Weighted:
    base: "Measure"
    weight: RadialFunction
    exponent: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.exponent) and self.exponent >= 0):
            raise InvalidArgument("exponent must be nonnegative")


@dataclass(frozen=True, eq=False)
class Scaled:
    base: "Measure"
    factor: float

    def __post_init__(self):
        if not (np.isfinite(self.factor) and self.factor >= 0):
            raise InvalidArgument("scaling factor must be nonnegative")


Measure = Union[Atomic, RadialDensity, BallLebesgue, Weighted, Scaled]


def dirac(location, weight=1.0):
    location = _point(location)
    return Atomic(location.reshape(1, -1), np.array([float(weight)]))


def zero_measure(n):
    return Atomic(np.zeros((0, n)), np.zeros(0))


def unit_ball(n, radius=1.0, density=1.0):
    return BallLebesgue(np.zeros(n), radius, density)


def scale_measure(m, a):
    """a * m (a >= 0)."""
    if not np.isfinite(a) or a < 0:
        raise InvalidArgument(f"scaling factor must be a nonnegative real, got {a!r}")
    return Scaled(m, float(a))


def weight_measure(m, w, q):
    """The measure w(|y|)**q dm(y)."""
    if not isinstance(w, RadialFunction):
        raise InvalidArgument("weight must be a RadialFunction")
    if not np.isfinite(q) or q < 0:
        raise InvalidArgument(f"weight exponent must be nonnegative, got {q!r}")
    if isinstance(m, Atomic):
        # fold eagerly so an undefined weight is reported now
        return _fold_atomic(Weighted(m, w, float(q)))
    if radial_view(m) is None:
        raise InvalidArgument("weighting needs a measure that is atomic or radial about the origin")
    return Weighted(m, w, float(q))


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True, eq=False)
class RadialView:
    """A radially symmetric measure written as g(|y|) dy.

    ``tail_exponent`` is the power-law exponent of g at infinity (only
    meaningful for unbounded support; ``None`` when undeclared) and
    ``inner_exponent`` its exponent at 0. ``kinks`` lists radii where g
    may be nonsmooth and ``knots`` every radius where g is only piecewise
    smooth (interpolation nodes included). ``scales`` = (lo, hi) brackets
    the radii over which g has structure; outside it g is a power law.
    """

    density: Callable
    support: float
    tail_exponent: float | None
    inner_exponent: float | None
    kinks: tuple = field(default=())
    is_zero: bool = False
    scales: tuple = (1.0, 1.0)
    knots: tuple = ()


def _knots(f, support):
    """Interpolation nodes of a RadialFunction inside the support."""
    if f.grid.size < 2:
        return set()
    return {float(x) for x in f.grid if x < support}


def _fold_atomic(m):
    """Reduce Atomic/Scaled/Weighted-over-atomic chains to a plain Atomic."""
    if isinstance(m, Atomic):
        return m
    if isinstance(m, Scaled):
        base = _fold_atomic(m.base)
        return None if base is None else Atomic(base.locations, base.weights * m.factor)
    if isinstance(m, Weighted):
        base = _fold_atomic(m.base)
        if base is None:
            return None
        if m.exponent == 0 or base.weights.size == 0:
            return base
        radii = np.linalg.norm(base.locations, axis=1)
        w = m.weight(radii) ** m.exponent
        return Atomic(base.locations, base.weights * w)
    return None


def atomic_form(m):
    """The measure as an `Atomic`, or None if it has a continuous part."""
    return _fold_atomic(m)


def radial_view(m):
    """The measure as a `RadialView`, or None if not radial about the origin."""
    if isinstance(m, RadialDensity):
        dens = m.density
        S = m.support_radius
        finite = np.isfinite(S)
        lo = min(dens.r_min, S)
        hi = S if finite else dens.r_max
        kinks = tuple(k for k in dens.breaks if k < S) + ((S,) if finite else ())
        return RadialView(dens, S, dens.tail_exponent, dens.inner_exponent, kinks,
                          dens.is_zero, (lo, hi), tuple(sorted(_knots(dens, S) | set(kinks))))
    if isinstance(m, BallLebesgue):
        if np.any(m.center != 0):
            return None
        rho = m.density

        def g(s, rho=rho):
            return np.full(np.shape(s), rho)
        return RadialView(g, m.radius, 0.0, 0.0, (m.radius,), rho == 0, (m.radius, m.radius),
                          (m.radius,))
    if isinstance(m, Scaled):
        base = radial_view(m.base)
        if base is None:
            return None
        a = m.factor

        def g(s, f=base.density, a=a):
            return a * f(s)
        return RadialView(g, base.support, base.tail_exponent, base.inner_exponent,
                          base.kinks, base.is_zero or a == 0, base.scales, base.knots)
    if isinstance(m, Weighted):
        base = radial_view(m.base)
        if base is None:
            return None
        w, q = m.weight, m.exponent
        if q == 0:
            return base

        def g(s, f=base.density, w=w, q=q):
            return f(s) * w(s) ** q
        tail = None
        if base.tail_exponent is not None and w.tail_exponent is not None:
            tail = base.tail_exponent + q * w.tail_exponent
        inner = None
        if base.inner_exponent is not None and w.inner_exponent is not None:
            inner = base.inner_exponent + q * w.inner_exponent
        S = base.support
        kinks = tuple(sorted(set(base.kinks) | {b for b in w.breaks if b < S}))
        lo = min(base.scales[0], w.r_min)
        hi = max(base.scales[1], min(w.r_max, S))
        return RadialView(g, S, tail, inner, kinks, base.is_zero or w.is_zero, (lo, hi),
                          tuple(sorted(set(base.knots) | _knots(w, S))))
    return None


def is_zero(m):
    at = atomic_form(m)
    if at is not None:
        return not np.any(at.weights > 0)
    if isinstance(m, BallLebesgue):
        return m.density == 0
    view = radial_view(m)
    if view is not None:
        return view.is_zero
    if isinstance(m, Scaled):
        return m.factor == 0 or is_zero(m.base)
    return False


def dimension_of(m):
    """Ambient dimension if the measure fixes it, else None."""
    if isinstance(m, (Atomic, BallLebesgue)):
        return m.dim
    if isinstance(m, (Scaled, Weighted)):
        return dimension_of(m.base)
    return None


def _radial_shell_mass(view, n, r, t, rel_tol=1e-10, abs_tol=1e-14):
    """int_{B(x,t)} g(|y|) dy with |x| = r, by adaptive quadrature over shells."""
    omega = float(sphere_area(n, 1.0))
    S = view.support
    total = 0.0
    err = 0.0
    f = view.density

    def full(s):
        return float(f(s)) * s ** (n - 1)

    def part(s):
        return float(f(s)) * s ** (n - 1) * float(cap_fraction(n, s, r, t))

    hi_full = min(max(t - r, 0.0), S)
    pieces = []
    if hi_full > 0:
        pieces.append((full, 0.0, hi_full))
    a, b = abs(r - t), min(r + t, S)
    if b > a:
        pieces.append((part, a, b))
    s_lo, s_hi = view.scales
    for fun, lo, hi in pieces:
        # cut wide ranges into decades so quad sees each scale
        cuts = set(k for k in view.kinks if lo < k < hi)
        top = hi if np.isfinite(hi) else max(10 * s_hi, 10 * lo, 1.0)
        bot = max(lo, 1e-3 * s_lo, 1e-12 * top)
        if top / bot > 10:
            cuts.update(c for c in np.geomspace(bot, top, int(np.ceil(np.log10(top / bot))) + 1)
                        if lo < c < hi)
        if not np.isfinite(hi):
            cuts.add(top)
        edges = [lo, *sorted(cuts), hi]
        for x0, x1 in zip(edges[:-1], edges[1:]):
            val, e = quad(fun, x0, x1, epsrel=rel_tol, epsabs=abs_tol, limit=200)
            total += val
            err += e
    total *= omega
    err *= omega
    if err > max(100 * rel_tol * abs(total), 100 * abs_tol):
        raise AccuracyFailure(f"ball mass quadrature error {err:.3e} too large", error_estimate=err)
    return total


def ball_mass(m, x, t, *, rel_tol=1e-10):
    """sigma(B(x, t)) for the open ball of radius t > 0 about x."""
    x = _point(x)
    if not np.isfinite(t) or not t > 0:
        raise InvalidArgument(f"ball radius must be positive and finite, got {t!r}")
    n = x.size
    dim = dimension_of(m)
    if dim is not None and dim != n and not (isinstance(m, Atomic) and m.weights.size == 0):
        raise InvalidArgument(f"measure lives in R^{dim}, query point in R^{n}")
    if isinstance(m, Scaled):
        return m.factor * ball_mass(m.base, x, t, rel_tol=rel_tol)
    at = atomic_form(m)
    if at is not None:
        if at.weights.size == 0:
            return 0.0
        d = np.linalg.norm(at.locations - x, axis=1)
        return float(at.weights[d < t].sum())
    if isinstance(m, BallLebesgue):
        if m.density == 0:
            return 0.0
        d = float(np.linalg.norm(x - m.center))
        return float(m.density * lens_volume(n, d, m.radius, t))
    view = radial_view(m)
    if view is None:
        raise InvalidArgument(f"ball mass not supported for {type(m).__name__} of this form")
    if view.is_zero:
        return 0.0
    return _radial_shell_mass(view, n, float(np.linalg.norm(x)), float(t), rel_tol=rel_tol)


def total_mass(m, n):
    """sigma(R^n); +inf when the declared tail makes it infinite."""
    if isinstance(m, Scaled):
        return m.factor * total_mass(m.base, n) if m.factor else 0.0
    at = atomic_form(m)
    if at is not None:
        return float(at.weights.sum())
    if isinstance(m, BallLebesgue):
        return float(m.density * ball_volume(n, m.radius))
    view = radial_view(m)
    if view is None:
        raise InvalidArgument("total mass not supported for this measure")
    if view.is_zero:
        return 0.0
    if np.isfinite(view.support):
        return _radial_shell_mass(view, n, 0.0, view.support * (1 + 1e-15))
    e = view.tail_exponent
    if e is None or n + e >= 0:
        return np.inf
    omega = float(sphere_area(n, 1.0))
    val, _ = quad(lambda s: float(view.density(s)) * s ** (n - 1), 0, np.inf,
                  epsrel=1e-10, limit=400)
    return omega * val


def mass_growth_exponent(m, n):
    """Exponent k with sigma(B(0, t)) ~ t**k as t -> inf.

    0 for finite total mass, None when it cannot be decided from the
    declared tails, and 0 with a log factor (reported as 0.0) when n + e = 0.
    """
    if isinstance(m, Scaled):
        return mass_growth_exponent(m.base, n)
    if atomic_form(m) is not None or isinstance(m, BallLebesgue):
        return 0.0
    view = radial_view(m)
    if view is None:
        return None
    if view.is_zero or np.isfinite(view.support):
        return 0.0
    e = view.tail_exponent
    if e is None:
        return None
    return max(n + e, 0.0)


def describe(m):
    """Short human-readable label."""
    if isinstance(m, Atomic):
        return f"Atomic[{m.weights.size} atoms]"
    if isinstance(m, BallLebesgue):
        return f"BallLebesgue(center={m.center.tolist()}, R={m.radius:g}, density={m.density:g})"
    if isinstance(m, RadialDensity):
        return f"RadialDensity(support={m.support_radius:g})"
    if isinstance(m, Weighted):
        return f"Weighted({describe(m.base)}, q={m.exponent:g})"
    if isinstance(m, Scaled):
        return f"Scaled({describe(m.base)}, a={m.factor:g})"
    return type(m).__name__
