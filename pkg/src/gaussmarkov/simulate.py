"""Exact simulation of sample paths and noisy observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import psd_factor
from .processes import ProcessModel

#: Doubling sample design, ``x_i = 2^(i-1)``.
DOUBLING_DESIGN = (1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class SimulatedPath:
    grid: np.ndarray
    path: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    truth: np.ndarray


def simulate_path(model: ProcessModel, grid, design, error_cov, seed: int) -> SimulatedPath:
    """Draw one path on ``grid`` jointly with noisy observations at ``design``.

    The path values at the union of grid and design points are sampled
    exactly from the finite-dimensional prior; noise is drawn from an
    independent stream of the same seed.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    design = np.asarray(design, dtype=float).ravel()
    error_cov = np.atleast_2d(np.asarray(error_cov, dtype=float))
    pts, inverse = np.unique(np.concatenate([grid, design]), return_inverse=True)
    path_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    z = np.random.default_rng(path_ss).standard_normal(pts.size)
    values = model.mean_vector(pts) + psd_factor(model.gram(pts)) @ z
    truth = values[inverse[grid.size:]]
    noise = psd_factor(error_cov) @ np.random.default_rng(noise_ss).standard_normal(design.size)
    return SimulatedPath(grid, values[inverse[:grid.size]], design, truth + noise, truth)
