"""
A cubic large sieve experiment
==============================

Random +-1 coefficients on [M, 2M) against the cubic characters of norm in
[Q, 2Q], normalized by M + Q^(5/3).
"""
import numpy as np

from cubic_twists import sieve_lab as sl

exp = sl.SieveExperiment(M=128, Q=64, trials=50, seed=1)
direct = sl.large_sieve_ratio(exp)
dual = sl.dual_large_sieve_ratio(exp)
print(direct.moduli, "moduli")
print("direct max / mean", direct.max_ratio, direct.mean_ratio)
print("dual   max / mean", dual.max_ratio, dual.mean_ratio)

# random vectors see the average singular value; the operator norm is shared
print("||A||^2 / rhs", direct.norm_ratio, dual.norm_ratio)

# the grid: the direct ratio tracks (#moduli)/rhs, the dual one M/rhs
for d, u in sl.grid_scan([16, 64, 256], [16, 64, 256], trials=20):
    e = d.experiment
    print(f"M={e.M:4d} Q={e.Q:4d}  direct {d.max_ratio:.4f}  dual {u.max_ratio:.4f}")

# second moment of central Hecke values
tab = sl.second_moment_scan([32, 64, 128])
for r in tab.rows:
    print(r.M, r.total, r.count)
print("slope", tab.slope)
