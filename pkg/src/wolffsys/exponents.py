"""Closed-form exponents and constants of the sublinear system.

All functions are pure. ``kappa`` is the constant in the composed-potential
lower bound W((W sigma)^r d sigma) >= kappa^{r/(p-1)} (W sigma)^{r/(p-1)+1};
it has no closed form and is always supplied by the caller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, ParameterError


def _check(p, q1, q2):
    if not (np.isfinite(p) and p > 1):
        raise ParameterError(f"p must exceed 1, got {p!r}", "p-range")
    for name, q in (("q1", q1), ("q2", q2)):
        if not (np.isfinite(q) and 0 < q < p - 1):
            raise ParameterError(f"{name} must lie in (0, p-1), got {q!r}", "q-range")


def _positive(name, x):
    if not (np.isfinite(x) and x > 0):
        raise InvalidArgument(f"{name} must be positive and finite, got {x!r}")


@dataclass(frozen=True)
class Exponents:
    gamma1: float
    gamma2: float
    denom: float


def gamma_exponents(p, q1, q2):
    """gamma_i = (p-1)(p-1+q_i) / ((p-1)^2 - q1 q2)."""
    _check(p, q1, q2)
    a = p - 1.0
    denom = a * a - q1 * q2
    return Exponents(a * (a + q1) / denom, a * (a + q2) / denom, denom)


def limit_constant(p, q1, q2, kappa):
    """lim c_j: kappa ** (q1 (p-1) [(p-1)^2 + 2 (p-1) q2 + q1 q2] / ((p-1)^2 - q1 q2)^2).

    Swapping q1 and q2 gives the constant of the v-sequence.
    """
    _check(p, q1, q2)
    _positive("kappa", kappa)
    a = p - 1.0
    d = a * a - q1 * q2
    e = q1 * a * (a * a + 2 * a * q2 + q1 * q2) / (d * d)
    return float(np.exp(e * np.log(kappa)))


@dataclass(frozen=True)
class LowerBoundSequence:
    """delta_j and c_j, j = 1..len(deltas), and their limits.

    The recursion stops early once both sequences have settled to 1e-14;
    `delta` and `const` return the settled value beyond that index.
    """

    deltas: np.ndarray
    consts: np.ndarray
    kappa: float
    c1: float
    gamma1: float
    limit: float
    ratio: float

    def delta(self, j):
        return float(self.deltas[min(j, self.deltas.size) - 1])

    def const(self, j):
        return float(self.consts[min(j, self.consts.size) - 1])


def lower_bound_sequence(p, q1, q2, kappa=1.0, c1=1.0, J=200, early_exit=1e-14):
    """Iterate delta_j and c_j from delta_1 = 1 and the seed c_1.

        delta_j = (q1/(p-1)) ((q2/(p-1)) delta_{j-1} + 1) + 1
        c_j     = c_{j-1}^{q1 q2/(p-1)^2} kappa^{q1 (p-1 + 2 q2 delta_{j-1}) / (p-1)^2}

    c_j is carried in logarithms so small kappa cannot underflow midway.
    """
    _check(p, q1, q2)
    _positive("kappa", kappa)
    _positive("c1", c1)
    if int(J) < 1:
        raise InvalidArgument("J must be at least 1")
    a = p - 1.0
    r = q1 * q2 / (a * a)
    lk = np.log(kappa)
    deltas = [1.0]
    logc = [np.log(c1)]
    for _ in range(int(J) - 1):
        d_prev, lc_prev = deltas[-1], logc[-1]
        d = (q1 / a) * ((q2 / a) * d_prev + 1.0) + 1.0
        lc = r * lc_prev + lk * q1 * (a + 2 * q2 * d_prev) / (a * a)
        deltas.append(d)
        logc.append(lc)
        if early_exit and abs(d - d_prev) < early_exit and abs(lc - lc_prev) < early_exit:
            break
    ex = gamma_exponents(p, q1, q2)
    return LowerBoundSequence(np.array(deltas), np.exp(np.array(logc)), float(kappa), float(c1),
                              ex.gamma1, limit_constant(p, q1, q2, kappa), r)


def subsolution_scale(p, q1, q2, kappa):
    """lambda_1 = min{kappa^{q1 gamma2/(p-1-q1)}, kappa^{q2 gamma2/(p-1-q2)}}."""
    _check(p, q1, q2)
    _positive("kappa", kappa)
    g2 = gamma_exponents(p, q1, q2).gamma2
    a = p - 1.0
    return float(min(kappa ** (q1 * g2 / (a - q1)), kappa ** (q2 * g2 / (a - q2))))
