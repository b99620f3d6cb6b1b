# # Wolff and Riesz potentials: a tour
#
# Run with `python3 notebooks/01_potentials_tour.py`. Each cell prints what it
# computes; nothing is plotted so the only requirements are numpy and scipy.

# %%
import numpy as np

from wolffsys import Params, dirac, log_grid, riesz, scale_measure, unit_ball, wolff, wolff_profile
from wolffsys.measures import Atomic

# %% [markdown]
# A point mass first. For sigma = delta_0 the ball mass is 1 for every t > |x|,
# so W_{alpha,p} delta_0(x) = (p-1)/(n - alpha p) |x|^{-(n - alpha p)/(p-1)}.

# %%
P = Params(3, 2.0, 1.0)
for r in (0.5, 1.0, 2.0):
    exact = 1.0 / r
    print(f"r={r:4.1f}  W delta = {wolff(P, dirac([0, 0, 0]), r):.15f}   closed form {exact:.15f}")

# %% [markdown]
# For p = 2 the Wolff potential of order alpha is a Riesz potential of order
# 2 alpha, up to the factor n - 2 alpha. Two different quadrature routes agree.

# %%
ball = unit_ball(3)
for r in (0.0, 0.5, 1.0, 3.0):
    w = wolff(P, ball, r)
    i2 = riesz(ball, 2.0, 3, r)
    print(f"r={r:3.1f}  W = {w:.12f}   I_2 / (n - 2) = {i2 / (3 - 2):.12f}")
print("origin value 2 pi =", 2 * np.pi)

# %% [markdown]
# A genuinely nonlinear case, p = 3 with alpha = 1/2 in R^3. Scaling the measure
# by c multiplies the potential by c^{1/(p-1)}.

# %%
P3 = Params(3, 3.0, 0.5)
base = wolff(P3, ball, 0.7)
for c in (0.25, 4.0, 100.0):
    got = wolff(P3, scale_measure(ball, c), 0.7)
    print(f"c={c:6.2f}  W(c sigma) / W(sigma) = {got / base:.12f}   c^(1/2) = {np.sqrt(c):.12f}")

# %% [markdown]
# Atoms off the origin are summed exactly. Two unit atoms at distance 2:

# %%
two = Atomic(np.array([[1.0, 0, 0], [-1.0, 0, 0]]), np.array([1.0, 1.0]))
print("W at the midpoint:", wolff(P, two, 0.0), "(each atom contributes 1/|x - a| = 1)")

# %% [markdown]
# Radial profiles come back as `RadialFunction` objects: tabulated on a
# logarithmic grid, interpolated in log-log coordinates, with the decay rate
# of the potential declared for extrapolation. The potential of a ball is only
# C^1 across the sphere |x| = 1, so that radius goes into the grid as a break.

# %%
prof = wolff_profile(P, ball, log_grid(1e-2, 1e2, 48, extra=[1.0]))
print("breaks:", prof.breaks)
print("tail exponent:", prof.tail_exponent, " inner exponent:", prof.inner_exponent)
for r in (0.02, 0.9, 1.1, 50.0, 500.0):
    print(f"  profile({r:6.2f}) = {float(prof(r)):.10f}   direct {wolff(P, ball, r):.10f}")
