# # Exponents and conditions on the measure
#
# The solver only runs when the measure passes a few checks. This script walks
# through the exponent algebra and the condition reports behind them.

# %%
import numpy as np

from wolffsys import (Params, capacity_ball_scaling, dirac, finiteness_condition, gamma_exponents,
                      kappa_estimate, local_integrability, lower_bound_sequence, unit_ball,
                      weaker_condition_lambda)

# %% [markdown]
# The exponents gamma1, gamma2 solve the linear system
# gamma1 = 1 + q1 gamma2 / (p-1), gamma2 = 1 + q2 gamma1 / (p-1).

# %%
for p, q1, q2 in ((2.0, 0.5, 0.5), (2.0, 0.3, 0.8), (3.0, 1.0, 0.5)):
    ex = gamma_exponents(p, q1, q2)
    print(f"p={p} q=({q1}, {q2})  gamma1={ex.gamma1:.6f}  gamma2={ex.gamma2:.6f}")

# %% [markdown]
# The lower bound is built from a sequence delta_j that climbs to gamma1 at a
# geometric rate, with constants c_j converging to C.

# %%
seq = lower_bound_sequence(2.0, 0.3, 0.8, kappa=0.8, J=12)
print(f"contraction ratio {seq.ratio:.4f}, limit C = {seq.limit:.8f}")
for j in (1, 2, 4, 8, 12):
    print(f"  j={j:2d}  delta={seq.deltas[j - 1]:.10f}  c={seq.consts[j - 1]:.10f}")

# %% [markdown]
# Conditions on the measure. The unit ball is harmless. A point mass has a
# finite potential away from the atom, but fails the capacity scaling and local
# integrability tests, and the solver refuses it.

# %%
P = Params(3, 2.0, 1.0, 0.5, 0.5)
radii = np.geomspace(1e-3, 10.0, 25)
for label, m in (("unit ball", unit_ball(3)), ("dirac", dirac([0, 0, 0]))):
    reports = [finiteness_condition(m, P), local_integrability(m, P, 1.0, 1.0),
               capacity_ball_scaling(P, m, radii)]
    print(label)
    for rep in reports:
        print(f"  {rep.condition:24s} pass={rep.passed!s:5s} constant={rep.constant:.6g}")

# %% [markdown]
# The weaker condition asks for a lambda with W((W sigma)^{q} d sigma) <= lambda (W sigma)^{gamma}
# and kappa measures how much of W(w^r d sigma) the potential itself controls.

# %%
weak = weaker_condition_lambda(unit_ball(3), P)
print(f"lambda = {weak.constant:.6f} (probes: {weak.probes})")
for r in (0.5, 1.0, 2.0):
    k = kappa_estimate(unit_ball(3), P, r)
    print(f"kappa(r={r}) = {k.constant:.6f}")
