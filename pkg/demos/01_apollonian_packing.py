"""Integral Apollonian packing from the root (-1, 2, 2, 3).

Generates every circle with curvature up to a threshold, checks the
Descartes relations on the root, fits the circle-count exponent and writes
an SVG picture of the packing.
"""
import sys
from pathlib import Path

import numpy as np

from packlab.descartes import curvature_census, generate, reflect, root_quadruple_bounded
from packlab.io_render import emit_svg, packing_scene
from packlab.io_render import CircleTable
from packlab.stats import circle_count_series, dyadic_grid, fit_power_law

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")

# %% the root quadruple and one reflection
root = root_quadruple_bounded()
print("root curvatures", root.k, "defect", root.descartes_defect())
print("reflect slot 0 ->", reflect(root, 0).k)

# %% all circles with curvature <= 2^14
run = generate(root, 2 ** 14, workers=4)
print(len(run), "circles")
census = curvature_census(run)
print("smallest curvatures", sorted(census.items())[:6])

# %% growth exponent of N(t) = #{k <= t}
grid = dyadic_grid(2 ** 6, 2 ** 14, 4)
exponent, stderr = fit_power_law(circle_count_series(run, grid), (2 ** 6, 2 ** 14))
print(f"fitted exponent {exponent:.4f} +- {stderr:.4f}")

# %% picture of the circles with curvature <= 200
small = run.truncate(200)
svg = emit_svg(packing_scene(CircleTable.from_run(small)))
(out / "packing.svg").write_text(svg)
print("wrote", out / "packing.svg", "with", len(small), "circles;",
      "largest radius", float(np.max(small.radii[1:])))
