# Fractional Poisson counts and the Mittag-Leffler waiting times behind them.

import numpy as np

from poissoncomp import laws, samplers, specfun
from poissoncomp.rng import RngStream

nu, lam, t = 0.6, 1.0, 2.0

# Mittag-Leffler values along the negative axis; nu = 1 would be exp(-x).
for x in (0.5, 2.0, 10.0):
    print(f"E_{nu}(-{x}) = {specfun.mittag_leffler(nu, 1.0, -x):.10f}")

table = laws.frac_poisson_table(t, nu, lam, tail_tol=1e-10)
counts = samplers.sample_frac_poisson_count(t, nu, lam, RngStream(11), 100_000)
emp = np.bincount(counts, minlength=table.probs.size)[:8] / counts.size
print(" k   exact      simulated")
for k in range(8):
    print(f"{k:2d}   {table.probs[k]:.6f}   {emp[k]:.6f}")

# Survival of the waiting time is E_nu(-lam x^nu).
w = samplers.sample_ml_waiting_time(nu, lam, RngStream(12), 100_000)
for x in (0.1, 1.0, 10.0):
    print(f"P(W > {x}) exact {specfun.ml_survival(nu, lam * x ** nu):.4f}  simulated {np.mean(w > x):.4f}")

# Heavy tail: the discrete Mittag-Leffler law has no mean for nu < 1.
p = laws.CompositionParams(1.0, 1.0, 0.7)
print("discrete ML pmf:", [round(laws.dml_pmf(r, 0.7, p.linnik_scale), 6) for r in range(6)])
