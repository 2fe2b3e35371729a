"""Ground truth that does not rely on the Markov shortcuts.

* :func:`dense_oracle` conditions the query values on all observations at once.
* :func:`mc_mse` estimates the mean squared error of the posterior-mean
  estimator by simulation, which should match the posterior variance.
* :func:`noise_free_mse` is the closed form for Brownian motion started at a
  known value and observed without noise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SingularConditioning
from .gaussian import GaussianVector, PartitionedGaussian, condition, psd_factor
from .posterior import Dataset, evaluate_posterior, node_posterior
from .processes import ProcessModel

MC_CHUNK = 8192


def dense_oracle(model: ProcessModel, data: Dataset, queries) -> tuple[np.ndarray, np.ndarray]:
    """Posterior means and variances at ``queries`` by one joint conditioning.

    Stacks ``(f(q_1), ..., f(q_m), y_1, ..., y_n)`` into a single Gaussian
    vector and conditions the first block on the second.
    """
    q = np.asarray(queries, dtype=float).ravel()
    if q.size == 0:
        return np.empty(0), np.empty(0)
    xs = data.xs
    mean = np.concatenate([model.mean_vector(q), model.mean_vector(xs)])
    k_qq = model.gram(q)
    k_qx = model.gram(q, xs)
    k_yy = model.gram(xs) + data.error_cov
    cov = np.block([[k_qq, k_qx], [k_qx.T, k_yy]])
    post = condition(PartitionedGaussian.split(mean, cov, q.size), data.ys)
    return post.mean.copy(), post.variance


@dataclass(frozen=True)
class MonteCarloResult:
    mse: float
    stderr: float
    trials: int


def _linear_estimator(model, xs, error_cov, x):
    """Intercept and gain of ``y -> E[f(x) | y]`` read off the engine.

    The posterior mean is affine in ``y``, so evaluating it at ``y = 0`` and
    at each unit vector recovers it exactly.  Returns ``None`` when those
    probe vectors are inconsistent with the model (noise-free duplicates or
    deterministic observations); callers then evaluate trial by trial.
    """
    n = xs.size

    def fhat(ys):
        data = Dataset(xs, ys, error_cov)
        return evaluate_posterior(model, node_posterior(model, data), data, x).mean

    try:
        c0 = fhat(np.zeros(n))
        gain = np.array([fhat(np.eye(n)[j]) - c0 for j in range(n)])
    except SingularConditioning:
        return None
    return c0, gain


def _chunk_errors(model, xs, error_cov, x, joint_mean, joint_factor, noise_factor, estimator, seed, chunk, size):
    rng = np.random.default_rng([seed, chunk])
    n = xs.size
    f = joint_mean + rng.standard_normal((size, n + 1)) @ joint_factor.T
    y = f[:, :n] + rng.standard_normal((size, n)) @ noise_factor.T
    if estimator is not None:
        c0, gain = estimator
        fhat = c0 + y @ gain
    else:
        fhat = np.empty(size)
        for t in range(size):
            data = Dataset(xs, y[t], error_cov)
            fhat[t] = evaluate_posterior(model, node_posterior(model, data), data, x).mean
    return (f[:, n] - fhat) ** 2


def mc_mse(model: ProcessModel, xs, error_cov, x: float, trials: int = 100_000, seed: int = 0,
           workers: int | None = None) -> MonteCarloResult:
    """Monte Carlo estimate of ``E[(f(x) - E[f(x) | y])^2]``.

    Each trial draws the path at the design points and at ``x`` from the
    prior, adds noise, and scores the engine's estimate against the true
    value.  Because the posterior variance does not depend on ``y``, the
    unconditional mean squared error equals it.

    Trials are generated in fixed-size chunks whose random streams are keyed
    by ``(seed, chunk index)``, so the result does not depend on ``workers``.
    """
    if trials < 1000:
        raise InvalidParameter("use at least 1000 trials")
    xs = np.asarray(xs, dtype=float).ravel()
    error_cov = np.atleast_2d(np.asarray(error_cov, dtype=float))
    x = float(x)
    pts = np.append(xs, x)
    joint_mean = model.mean_vector(pts)
    joint_factor = psd_factor(model.gram(pts))
    noise_factor = psd_factor(error_cov)
    estimator = _linear_estimator(model, xs, error_cov, x)

    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    args = [(model, xs, error_cov, x, joint_mean, joint_factor, noise_factor, estimator, seed, c, s)
            for c, s in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _chunk_errors(*a), args))
    else:
        parts = [_chunk_errors(*a) for a in args]
    sq = np.concatenate(parts)
    # np.sum / np.std use pairwise summation
    return MonteCarloResult(float(np.mean(sq)), float(np.std(sq, ddof=1) / np.sqrt(trials)), trials)


def noise_free_mse(sigma: float, xs, x: float) -> float:
    """Posterior variance of Brownian motion with ``f(0)`` known and exact observations.

    ``sigma^2 * x (x_1 - x) / x_1`` before the first sample,
    ``sigma^2 * (x_{k+1} - x)(x - x_k) / (x_{k+1} - x_k)`` between samples, and
    ``sigma^2 * (x - x_n)`` after the last one.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if sigma < 0:
        raise InvalidParameter("sigma must be nonnegative")
    if xs.size == 0 or xs[0] <= 0 or np.any(np.diff(xs) <= 0):
        raise InvalidParameter("xs must be positive, distinct and increasing")
    if x < 0:
        raise InvalidParameter(f"x must be >= 0, got {x}")
    s2 = sigma * sigma
    if x < xs[0]:
        return s2 * x * (xs[0] - x) / xs[0]
    if x >= xs[-1]:
        return s2 * (x - xs[-1])
    k = int(np.searchsorted(xs, x, side="right")) - 1
    return s2 * (xs[k + 1] - x) * (x - xs[k]) / (xs[k + 1] - xs[k])
