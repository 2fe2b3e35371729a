"""Self-check suite: engine versus independent oracles on random instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import posterior
from .oracle import dense_oracle, mc_mse, noise_free_mse
from .posterior import Dataset, bridge_moments, evaluate_brownian_fast, node_posterior
from .processes import BrownianMotionModel, brownian
from .simulate import DOUBLING_DESIGN

NOISE_KINDS = ("iid", "diagonal", "dense")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_brownian(rng: np.random.Generator) -> BrownianMotionModel:
    return brownian(rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(0, 1), rng.uniform(0.1, 2))


def random_design(rng: np.random.Generator, n: int) -> np.ndarray:
    """Distinct increasing locations with gaps in ``[0.05, 2)``."""
    return rng.uniform(0.0, 1.0) + np.cumsum(np.concatenate([[0.0], rng.uniform(0.05, 2.0, n - 1)]))


def random_noise(rng: np.random.Generator, n: int, kind: str) -> np.ndarray:
    if kind == "iid":
        return rng.uniform(0.05, 2.0) * np.eye(n)
    if kind == "diagonal":
        return np.diag(rng.uniform(0.05, 2.0, n))
    if kind == "dense":
        a = rng.normal(size=(n, n))
        return a @ a.T / n + 0.05 * np.eye(n)
    if kind == "none":
        return np.zeros((n, n))
    raise ValueError(f"unknown noise kind {kind!r}")


def random_instance(rng: np.random.Generator, kind: str | None = None, n: int | None = None):
    """Random Brownian model and dataset with observations drawn from the model."""
    model = random_brownian(rng)
    n = int(rng.integers(1, 9)) if n is None else n
    kind = NOISE_KINDS[int(rng.integers(len(NOISE_KINDS)))] if kind is None else kind
    xs = random_design(rng, n)
    cov = random_noise(rng, n, kind)
    k = model.gram(xs) + cov
    ys = model.mean_vector(xs) + np.linalg.cholesky(k + 1e-12 * np.eye(n)) @ rng.standard_normal(n)
    return model, Dataset(xs, ys, cov)


def random_queries(rng: np.random.Generator, xs: np.ndarray, count: int = 100) -> np.ndarray:
    """Uniform queries over ``[0, x_n + 3]`` mixed with nodes and piece midpoints."""
    special = np.concatenate([xs, 0.5 * (xs[:-1] + xs[1:]), [0.0]])
    rest = rng.uniform(0.0, xs[-1] + 3.0, max(count - special.size, 0))
    return np.concatenate([special, rest])[:count]


def oracle_errors(model, data, queries, fast: bool = False) -> tuple[float, float]:
    """Max absolute mean and variance gaps between the engine and the dense oracle."""
    npost = node_posterior(model, data)
    evaluate = evaluate_brownian_fast if fast else posterior.evaluate_posterior
    pts = [evaluate(model, npost, data, q) for q in queries]
    om, ov = dense_oracle(model, data, queries)
    em = np.array([p.mean for p in pts])
    ev = np.array([p.variance for p in pts])
    return float(np.max(np.abs(em - om))), float(np.max(np.abs(ev - ov)))


def check_oracle_equivalence(instances: int, seed: int, tol: float = 1e-9, fast: bool = False) -> Check:
    rng = np.random.default_rng(seed)
    worst_m = worst_v = 0.0
    for _ in range(instances):
        model, data = random_instance(rng)
        em, ev = oracle_errors(model, data, random_queries(rng, data.xs), fast=fast)
        worst_m, worst_v = max(worst_m, em), max(worst_v, ev)
    name = "brownian closed form vs dense oracle" if fast else "markov evaluation vs dense oracle"
    return Check(name, worst_m <= tol and worst_v <= tol,
                 f"{instances} instances, max |dmean|={worst_m:.2e}, max |dvar|={worst_v:.2e} (tol {tol:g})")


def check_single_observation() -> Check:
    data = Dataset.iid([1.0], [2.0], 1.0)
    npost = node_posterior(brownian(0, 0, 0, 1), data)
    m, v = float(npost.mean[0]), float(npost.covariance[0, 0])
    ok = abs(m - 1.0) <= 1e-12 and abs(v - 0.5) <= 1e-12
    return Check("single noisy observation closed form", ok, f"mean={m!r}, variance={v!r} (expect 1, 0.5)")


def check_noise_free_mse(designs: int, seed: int, tol: float = 1e-10) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(designs):
        sigma = rng.uniform(0.1, 2.0)
        model = brownian(rng.uniform(-2, 2), rng.uniform(-1, 1), 0.0, sigma)
        xs = random_design(rng, int(rng.integers(1, 9))) + 0.05
        data = Dataset.iid(xs, model.mean_vector(xs) + rng.normal(size=xs.size), 0.0)
        npost = node_posterior(model, data)
        for x in rng.uniform(0.0, xs[-1] + 3.0, 100):
            got = posterior.evaluate_posterior(model, npost, data, x).variance
            worst = max(worst, abs(got - noise_free_mse(sigma, xs, x)))
    return Check("noise-free known-origin variance formula", worst <= tol,
                 f"{designs} designs, max |dvar|={worst:.2e} (tol {tol:g})")


def check_bridge(configs: int, seed: int, tol: float = 1e-9) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(configs):
        model, data = random_instance(rng, n=2)
        npost = node_posterior(model, data)
        s1, s2 = np.sqrt(np.diag(npost.covariance))
        rho = npost.covariance[0, 1] / (s1 * s2)
        x1, x2 = data.xs
        x = rng.uniform(x1, x2)
        mean, var = bridge_moments(npost.mean[0], npost.mean[1], s1, s2, float(np.clip(rho, -1, 1)),
                                   x1, x2, model.sigma, x)
        om, ov = dense_oracle(model, data, [x])
        worst = max(worst, abs(mean - om[0]), abs(var - ov[0]))
    return Check("uncertain-endpoint bridge vs dense oracle", worst <= tol,
                 f"{configs} configurations, max gap={worst:.2e} (tol {tol:g})")


def check_monte_carlo(trials: int, seed: int, points=(0.5, 3.0, 10.0), k_se: float = 3.0) -> list[Check]:
    model = brownian(0.0, 0.0, 0.0, 1.0)
    xs = np.asarray(DOUBLING_DESIGN)
    cov = np.eye(xs.size)
    data = Dataset(xs, np.zeros(xs.size), cov)
    out = []
    for i, x in enumerate(points):
        res = mc_mse(model, xs, cov, x, trials=trials, seed=seed + i)
        _, ov = dense_oracle(model, data, [x])
        z = (res.mse - ov[0]) / res.stderr
        out.append(Check(f"Monte Carlo MSE at x={x:g}", abs(z) <= k_se,
                         f"empirical {res.mse:.5f} +/- {res.stderr:.5f} vs analytic {ov[0]:.5f} "
                         f"({z:+.2f} SE, {trials} trials)"))
    return out


def run_checks(trials: int = 20_000, seed: int = 0, instances: int = 50) -> list[Check]:
    checks = [
        check_oracle_equivalence(instances, seed),
        check_oracle_equivalence(instances, seed + 1, fast=True),
        check_single_observation(),
        check_noise_free_mse(max(instances // 5, 1), seed + 2),
        check_bridge(instances, seed + 3),
    ]
    checks += check_monte_carlo(trials, seed + 4)
    return checks
