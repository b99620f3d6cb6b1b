"""Problem parameters (n, p, alpha, q1, q2) and their validity constraints."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

INTEGRAL = "integral"
PDE_EQUIVALENT = "pde_equivalent"
MODES = (INTEGRAL, PDE_EQUIVALENT)


@dataclass(frozen=True)
class Params:
    """Dimension, Wolff indices and the two sublinear exponents.

    In ``pde_equivalent`` mode the operator is multiplied by ``K``, the
    dimensional constant of the two-sided Wolff estimate for p-superharmonic
    functions. Its true value is not known, so it is a plain input.
    """

    n: int
    p: float
    alpha: float
    q1: float = 0.5
    q2: float = 0.5
    mode: str = INTEGRAL
    K: float = 1.0

    @property
    def beta(self):
        """Decay exponent (n - alpha p) / (p - 1) of the Wolff potential of a point mass."""
        return (self.n - self.alpha * self.p) / (self.p - 1.0)

    @property
    def scale(self):
        """Factor in front of the Wolff operator: K in pde mode, else 1."""
        return self.K if self.mode == PDE_EQUIVALENT else 1.0

    def with_(self, **kw):
        return replace(self, **kw)

    def to_dict(self):
        return {"n": self.n, "p": self.p, "alpha": self.alpha, "q1": self.q1,
                "q2": self.q2, "mode": self.mode, "K": self.K}


def validate_wolff(n, p, alpha):
    """Checks needed for the potential alone (no exponents q_i)."""
    if not (isinstance(n, (int, np.integer)) and not isinstance(n, bool) and n >= 2):
        raise ParameterError(f"dimension must be an integer >= 2, got {n!r}", "n-range")
    if not (np.isfinite(p) and p > 1):
        raise ParameterError(f"p must exceed 1, got {p!r}", "p-range")
    if not (np.isfinite(alpha) and 0 < alpha):
        raise ParameterError(f"alpha must be positive, got {alpha!r}", "alpha-range")
    if not alpha * p < n:
        raise ParameterError(f"alpha >= n/p ({alpha} >= {n}/{p})", "alpha-range")


def validate(params):
    """Return ``params`` unchanged if every hypothesis holds.

    Each violated constraint raises `ParameterError` with its own reason.
    The nonexistence gate for p >= n in pde mode is checked first so that
    such runs are refused before anything else is looked at.
    """
    if params.mode not in MODES:
        raise ParameterError(f"unknown mode {params.mode!r}", "mode")
    if params.mode == PDE_EQUIVALENT:
        if params.p >= params.n:
            raise ParameterError(
                f"p >= n ({params.p} >= {params.n}): no nontrivial solutions exist",
                "p>=n nonexistence")
        if params.alpha != 1:
            raise ParameterError("pde_equivalent mode requires alpha = 1", "mode")
        if not (np.isfinite(params.K) and params.K > 0):
            raise ParameterError(f"K must be positive, got {params.K!r}", "mode")
    validate_wolff(params.n, params.p, params.alpha)
    for name, q in (("q1", params.q1), ("q2", params.q2)):
        if not (np.isfinite(q) and 0 < q < params.p - 1):
            raise ParameterError(f"{name} must lie in (0, p-1) = (0, {params.p - 1:g}), got {q!r}",
                                 "q-range")
    return params
