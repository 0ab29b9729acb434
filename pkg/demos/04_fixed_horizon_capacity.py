#!/usr/bin/env python3
"""Fixed-horizon capacity: more stages versus less recovery per stage.

If the whole load must be absorbed within a horizon T, squeezing in more
equally spaced releases shortens every recovery gap.  The safe capacity
B_n(h), h = rho T, still increases with n, but only up to the supremum
1 + h, which no finite schedule attains.  That splits the (r, h) plane into
three regimes: safe with one release, safe with enough releases, and
infeasible.

Run: python demos/04_fixed_horizon_capacity.py
"""
import numpy as np

from leakystage import (
    ModelParams,
    capacity_report,
    derive,
    horizon_capacity,
    horizon_feasibility,
    unequal_spacing_capacity,
)

params = ModelParams(beta=0.6, mu=1.0, delta=1.8, rho=0.5)
d = derive(params)
h = 2.0  # rho * T with T = 4

print(f"Horizon budget h = rho T = {h}")
print()

print("Capacity of n equally spaced releases (supremum 1 + h = 3):")
for n in (1, 2, 3, 4, 6, 10, 100, 10**6):
    print(f"  n = {n:>7}: B_n({h}) = {horizon_capacity(n, h):.6f}")
print()

print("Equal spacing beats any unequal spacing with the same total time:")
rng = np.random.default_rng(1)
T, rho, n = 4.0, 0.5, 4
equal = horizon_capacity(n, rho * T)
worst = min(
    unequal_spacing_capacity(rng.dirichlet(np.ones(n - 1)) * T, rho) for _ in range(5)
)
print(f"  equal spacing {equal:.5f}; five random spacings all <= {worst:.5f} ... {equal:.5f}")
print()

print("Feasibility verdicts for loads r (threshold units) at h = 2:")
for r in (0.9, 1.5, 2.1, 2.9, 3.0, 3.5):
    print(f"  r = {r:4.2f}: {horizon_feasibility(r, h).label}")
print()

report = capacity_report(params, Q=2.1 * d.delta_c, n=3, lam=np.exp(-1.0), h=h)
print("Capacity report for (Q = 2.1 delta_c, n = 3, lam = 1/e, h = 2):")
print(f"  c_n = {report.c_n:.4f}, B_n = {report.B_n:.4f}")
print(f"  Q_max_safe = {report.Q_max_safe:.4f}, Q_sup_safe = {report.Q_sup_safe:.4f}")
print(f"  N_safe (fixed lam) = {report.N_safe_lambda}, N_safe (horizon) = {report.N_safe_horizon}")
