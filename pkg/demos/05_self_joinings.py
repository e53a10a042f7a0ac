"""Pairs of representations of a free group: boundary maps, joint growth, tori."""
import numpy as np

from packlab.descartes import generate, root_quadruple_bounded
from packlab.fixtures import pair_conjugate, pair_same, pair_twisted, schottky_f1
from packlab.joinings import (
    boundary_pairs,
    circle_count,
    conformality_stat,
    joint_exponent,
    torus_count,
)
from packlab.moebius import MoebiusMap
from packlab.orbits import critical_exponent, enumerate_orbit

# %% does the boundary map preserve circles?  only when it is Moebius
for build in (pair_same, pair_conjugate, pair_twisted):
    rep = conformality_stat(boundary_pairs(build(), 6), 1000, 1e-6, seed=1)
    print(f"{build.__name__:15s} violating {rep.violating_fraction:.3f}  {rep.verdict}")

# %% joint exponent with summed displacements
single = critical_exponent(enumerate_orbit(schottky_f1(), T=34)).value
print("single exponent", round(single, 4))
for build in (pair_same, pair_conjugate, pair_twisted):
    print(build.__name__, round(joint_exponent(build(), T=40).value, 4))

# %% torus packings built from the Apollonian packing
run = generate(root_quadruple_bounded(), 4000)
ts = 2.0 ** np.arange(0, 22, 3)
print("identity tori  ", torus_count(run, "identity", ts).n)
print("circles at sqrt", circle_count(run, np.sqrt(ts)).n)
print("C paired with 2C", torus_count(run, MoebiusMap(2 ** 0.5, 0, 0, 2 ** -0.5), ts).n)
