# Iterated Poisson counts: an inner Poisson process run at the (random) level
# reached by an outer one.  We tabulate the exact law, then check it against
# simulated terminal values.

import math

import numpy as np

from poissoncomp import laws, samplers
from poissoncomp.rng import RngStream
from poissoncomp.verify.metrics import Histogram, tv_distance, tv_tolerance

params = laws.CompositionParams(1.0, 1.0, 1.0, 1.0)

# The probability of seeing nothing at t = 1 has a closed form.
p0 = laws.iterated_poisson_pmf(0, params)
print(f"P(N=0) = {p0:.15f}   closed form {math.exp(-(1 - math.exp(-1))):.15f}")

table = laws.iterated_poisson_table(params, tail_tol=1e-12)
print("first probabilities:", np.round(table.probs[:6], 6))
print(f"mass covered {table.probs.sum():.12f}, tail {table.tail_bound:.2e}")

# Simulate 200k terminal values and measure the total variation gap.
n = 200_000
x = samplers.sample_composition_terminal(1.0, 1.0, 1.0, RngStream(2024), n)
tv = tv_distance(Histogram.for_table(x, table), table)
print(f"TV distance {tv:.5f} (tolerance {tv_tolerance(table, n):.5f})")

# A single path, for the curious.
path = samplers.sample_iterated_path(2.0, 1.5, 3.0, RngStream(7))
print("jump times:", np.round(path.times, 3))
print("levels:    ", path.levels)
