"""Moebius maps acting on the sphere and on upper half-space."""
import numpy as np

from packlab.moebius import BASEPOINT, GeneralizedCircle, MoebiusMap, apply_circle, h3_apply, h3_distance

# %% a loxodromic map and its action on a circle
g = MoebiusMap(2 + 1j, 1, 0.5, 0.75 + 0.5j)
print("normalized det", g.det, "trace", g.trace)
c = GeneralizedCircle.from_center_radius(0.3 + 0.1j, 0.2)
img = apply_circle(g, c)
print("image circle center", img.center, "radius", img.radius)

# %% points on the circle land on the image circle
theta = np.linspace(0, 2 * np.pi, 7)[:-1]
pts = c.center + c.radius * np.exp(1j * theta)
moved = np.array([g(z) for z in pts])
print("max distance defect", np.max(np.abs(np.abs(moved - img.center) - img.radius)))

# %% Poincare extension: how far g moves the basepoint (0, 0, 1)
# the displacement is at least the translation length 2 log|lambda|
print("d(o, g o) =", h3_distance(BASEPOINT, h3_apply(g, BASEPOINT)))
lam = np.linalg.eigvals(g.matrix)
print("translation length", 2 * np.log(np.max(np.abs(lam))))
