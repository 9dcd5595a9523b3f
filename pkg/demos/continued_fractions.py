# Continued fractions of standard Cauchy variables stay Cauchy, with scales
# given by ratios of Fibonacci numbers that converge to the golden ratio.

from poissoncomp import samplers, specfun
from poissoncomp.rng import RngStream
from poissoncomp.verify.metrics import cauchy_scale_mle

n = 400_000
golden = (1 + 5 ** 0.5) / 2
print("depth  exact     MLE       sum form")
for depth in range(1, 9):
    exact = specfun.fibonacci_ratio(depth)
    mle = cauchy_scale_mle(samplers.sample_cfrac(depth, RngStream(3).spawn(depth), n))
    alt = cauchy_scale_mle(samplers.sample_cauchy_sum(depth, RngStream(4).spawn(depth), n))
    print(f"{depth:5d}  {exact:.5f}  {mle:.5f}   {alt:.5f}")
print(f"golden ratio {golden:.5f}")
