"""Where the circles go and which curvatures are prime."""
import numpy as np

from packlab.descartes import generate, root_quadruple_bounded
from packlab.stats import Region, equidistribution_ratio, sieve

run = generate(root_quadruple_bounded(), 2 ** 15, workers=4)

# %% ratio of counts in two regions settles down as t grows
r1 = Region.disk(0.35 + 0.2j, 0.3)
r2 = Region.rect(-0.6, 0.1, -0.7, 0.2)
for t in 2 ** np.arange(9, 16):
    print(f"t={t:6d} ratio {equidistribution_ratio(run, r1, r2, t):.4f}")

# the packing is symmetric under z -> -conj(z)
print("mirror ratio", equidistribution_ratio(run, r1, r1.mirror_x(), 2 ** 15))

# %% prime curvatures
values, counts = np.unique(run.k, return_counts=True)
census = dict(zip(values.tolist(), counts.tolist()))
for T in (10 ** 2, 10 ** 3, 10 ** 4):
    rep = sieve(census, T, 2)
    print(T, "primes", rep.prime_count, "almost primes", rep.almost_prime_counts,
          "normalized", round(rep.normalized, 4))
