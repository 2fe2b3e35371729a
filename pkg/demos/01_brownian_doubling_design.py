"""Learning a Brownian path from four noisy observations.

Draws a standard Brownian path started at zero, observes it at x = 1, 2, 4, 8
with unit-variance noise (and again without noise), and writes the posterior
mean with a 90% band to SVG files next to this script.
"""

from pathlib import Path

import numpy as np

from gaussmarkov import Dataset, brownian, confidence_band, evaluate_grid, node_posterior
from gaussmarkov.plot import render_svg
from gaussmarkov.simulate import DOUBLING_DESIGN, simulate_path

HERE = Path(__file__).parent

model = brownian(mu0=0.0, mu=0.0, sigma0=0.0, sigma=1.0)
grid = np.linspace(0.0, 10.0, 201)
design = np.array(DOUBLING_DESIGN)

for label, noise_sd in (("noisy", 1.0), ("exact", 0.0)):
    cov = noise_sd**2 * np.eye(design.size)
    sim = simulate_path(model, grid, design, cov, seed=3)
    data = Dataset(sim.xs, sim.ys, cov)

    npost = node_posterior(model, data)
    points = evaluate_grid(model, npost, data, grid)
    band = np.array([confidence_band(p, 0.9) for p in points])
    mean = np.array([p.mean for p in points])

    print(f"--- {label} observations ---")
    print("node estimates:", np.round(npost.mean, 3))
    print("node variances:", np.round(npost.variance, 3))
    # the band is narrowest at the samples and widest midway between them
    for x in (1.0, 1.5, 3.0, 6.0, 10.0):
        p = points[int(np.argmin(np.abs(grid - x)))]
        print(f"  x={x:5.2f}  mean={p.mean:+.3f}  var={p.variance:.3f}  case={p.case}")

    svg = render_svg(grid, mean, band[:, 0], band[:, 1], grid, sim.path, sim.xs, sim.ys,
                     title=f"Brownian motion, {label} observations")
    (HERE / f"doubling_{label}.svg").write_text(svg)
