# A planar Poisson field whose counts are thinned through a second Poisson
# clock, and the distance from the origin to the nearest surviving point.

import math

import numpy as np

from poissoncomp import field
from poissoncomp.field import Region
from poissoncomp.rng import RngStream

disc = Region.disc(0.0, 0.0, 1.0)
lam, la = 2.0, 0.5

pts = field.sample_field(disc, lam, RngStream(1))
print(f"{len(pts)} points in the unit disc (mean {lam * disc.measure:.3f})")

counts = field.sample_subordinated_counts(disc, lam, la, RngStream(2), 100_000)
print(" k   exact      simulated")
for k in range(6):
    print(f"{k:2d}   {field.subordinated_field_pmf(k, disc, lam, la):.6f}   {np.mean(counts == k):.6f}")

# The squared contact distance is exponential; check a few quantiles.
d = field.sample_first_contact(lam, la, RngStream(3), 100_000)
rate = math.pi * lam * (1 - math.exp(-la))
for q in (0.25, 0.5, 0.9):
    print(f"q={q}: exact {math.sqrt(-math.log(1 - q) / rate):.4f}  simulated {np.quantile(d, q):.4f}")
