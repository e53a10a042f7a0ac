"""Schottky groups: orbit counting versus box counting of the limit set."""
import sys
import time
from pathlib import Path

from packlab.fixtures import cyclic, schottky_f1, schottky_f2
from packlab.io_render import emit_svg, points_scene
from packlab.orbits import (
    box_dimension,
    critical_exponent,
    enumerate_orbit,
    limit_sample,
    limit_set_dimension,
    ps_empirical,
)

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")

for name, build in [("F1", schottky_f1), ("F2", schottky_f2)]:
    t0 = time.perf_counter()
    pres = build()
    orbit = enumerate_orbit(pres, T=34, workers=4)
    ce = critical_exponent(orbit)
    sample = limit_sample(pres, 11)
    dim = box_dimension(sample)
    print(f"{name}: {len(orbit)} orbit points, exponent {ce.value:.4f}, "
          f"box dimension {dim.value:.4f} from {len(sample)} points "
          f"({time.perf_counter() - t0:.1f}s)")

# %% an elementary group: two fixed points, dimension 0
print("cyclic exponent", critical_exponent(enumerate_orbit(cyclic(), T=60, L_max=100)).value)
print("cyclic box dimension", limit_set_dimension(cyclic(), 6).value)

# %% empirical Patterson-Sullivan measure gets more conformal with depth
s = critical_exponent(enumerate_orbit(schottky_f1(), T=30)).value
for T in (14, 22, 30):
    print("T", T, "discrepancy", round(ps_empirical(enumerate_orbit(schottky_f1(), T=T), s).discrepancy, 4))

# %% picture of the F2 limit set
(out / "limit_set_f2.svg").write_text(emit_svg(points_scene(limit_sample(schottky_f2(), 7).points)))
print("wrote", out / "limit_set_f2.svg")
