"""Pointwise posterior of a Gauss-Markov process given noisy observations.

The work splits in two stages.  :func:`node_posterior` conditions the
process values at the sampled locations on the data with one dense Gaussian
solve.  :func:`evaluate_posterior` then reaches any other location using only
the one or two nearest nodes: the Markov property makes every other node
irrelevant once those are accounted for, so the estimate at ``x`` is a
weighted combination of neighbouring node estimates plus the conditional
variance of ``f(x)`` given those neighbours.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DegenerateBracket, DimensionMismatch, DomainError, InvalidParameter, NotPSD, SingularConditioning
from .gaussian import PSD_TOL, _condition_blocks, is_psd
from .processes import BrownianMotionModel, ProcessModel

DEGENERATE_RTOL = 1e-12
_MERGE_TOL = 1e-12


def _clamp_var(v: float, tol: float = PSD_TOL) -> float:
    if v < -tol:
        raise NotPSD(f"negative conditional variance {v:.3e}")
    return max(float(v), 0.0)


@dataclass(frozen=True)
class Dataset:
    """Observations ``y_i = f(x_i) + e_i`` with ``e ~ N(0, error_cov)``.

    ``xs`` must be non-decreasing.  A zero ``error_cov`` means noise-free data.
    Use :meth:`iid` or :meth:`diagonal` for the common noise structures.
    """

    xs: np.ndarray
    ys: np.ndarray
    error_cov: np.ndarray

    def __post_init__(self):
        xs = np.atleast_1d(np.array(self.xs, dtype=float))
        ys = np.atleast_1d(np.array(self.ys, dtype=float))
        cov = np.atleast_2d(np.array(self.error_cov, dtype=float))
        if xs.ndim != 1 or xs.size < 1:
            raise DimensionMismatch("xs must be a non-empty vector")
        if ys.shape != xs.shape:
            raise DimensionMismatch(f"{xs.size} locations but {ys.size} observations")
        if cov.shape != (xs.size, xs.size):
            raise DimensionMismatch(f"error covariance has shape {cov.shape}, expected {(xs.size, xs.size)}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys)) and np.all(np.isfinite(cov))):
            raise InvalidParameter("dataset contains non-finite values")
        if np.any(xs < 0):
            raise DomainError("sample locations must be >= 0")
        if np.any(np.diff(xs) < 0):
            raise InvalidParameter("sample locations must be sorted non-decreasing")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12) or not is_psd(cov):
            raise NotPSD("error covariance must be symmetric positive semidefinite")
        for name, arr in (("xs", xs), ("ys", ys), ("error_cov", cov)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def iid(cls, xs, ys, noise_var: float = 0.0) -> Dataset:
        n = np.atleast_1d(xs).size
        return cls(xs, ys, noise_var * np.eye(n))

    @classmethod
    def diagonal(cls, xs, ys, noise_vars) -> Dataset:
        return cls(xs, ys, np.diag(np.asarray(noise_vars, dtype=float)))

    @property
    def n(self) -> int:
        return self.xs.size

    def with_ys(self, ys) -> Dataset:
        return Dataset(self.xs, ys, self.error_cov)

    def prefix(self, m: int) -> Dataset:
        """The first ``m`` observations (a nested sub-dataset)."""
        return Dataset(self.xs[:m], self.ys[:m], self.error_cov[:m, :m])


@dataclass(frozen=True)
class NodePosterior:
    """Joint posterior of ``(f(x_1), ..., f(x_n))`` given the data."""

    xs: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray
    jitter_used: float = 0.0

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.covariance).copy()


@dataclass(frozen=True)
class PosteriorPoint:
    """Posterior mean and variance of ``f(x)``.

    ``case`` is one of ``"below-first"``, ``"interior"``, ``"above-last"`` or
    ``"at-node"``; ``index`` is the node used for the one-sided cases, the
    left bracket node for ``"interior"``, and the matching node for
    ``"at-node"`` (all zero-based).
    """

    x: float
    mean: float
    variance: float
    case: str
    index: int


@dataclass(frozen=True)
class TwoPointWeight:
    w: np.ndarray
    denom: float


def _reduce_observations(model: ProcessModel, data: Dataset, prior_mean, gram):
    """Indices of observations that carry information, after merging.

    Two kinds of observation cannot enter the Cholesky solve:

    * an observation with zero variance (``V(x_i) = 0`` and no noise) is a
      known constant, so it is dropped if it equals its mean;
    * a later observation at the same location whose difference from an
      earlier one has zero variance is a copy, so it is dropped if equal.

    Any disagreement in either case is impossible under the model.
    """
    xs, ys, e = data.xs, data.ys, data.error_cov
    scale = max(1.0, float(np.max(np.abs(np.diag(gram)))), float(np.max(np.abs(np.diag(e)))))
    keep: list[int] = []
    for i in range(data.n):
        if gram[i, i] + e[i, i] <= _MERGE_TOL * scale:
            if not np.isclose(ys[i], prior_mean[i], rtol=_MERGE_TOL, atol=_MERGE_TOL):
                raise SingularConditioning(f"observation {i} at x={xs[i]} has zero variance but y differs from the mean")
            continue
        duplicate = False
        for j in reversed(keep):
            if xs[j] != xs[i]:
                break
            if e[i, i] + e[j, j] - 2.0 * e[i, j] <= _MERGE_TOL * scale:
                if not np.isclose(ys[i], ys[j], rtol=_MERGE_TOL, atol=_MERGE_TOL):
                    raise SingularConditioning(f"noise-free duplicates at x={xs[i]} disagree: {ys[j]} vs {ys[i]}")
                duplicate = True
                break
        if not duplicate:
            keep.append(i)
    return np.asarray(keep, dtype=int)


def node_posterior(model: ProcessModel, data: Dataset) -> NodePosterior:
    """Condition the process values at ``data.xs`` on ``data.ys``.

    The observations have covariance ``Gram + error_cov`` and covariance
    ``Gram`` with the node values, so a single partitioned conditioning gives
    the full joint posterior.  Nodes observed without noise are then pinned
    to their observed value with zero variance, which is exact rather than
    merely accurate to round-off.
    """
    xs, ys, e = data.xs, data.ys, data.error_cov
    m = model.mean_vector(xs)
    k = model.gram(xs)
    keep = _reduce_observations(model, data, m, k)
    if keep.size == 0:
        return NodePosterior(xs, m, k, 0.0)

    mean, cov, jitter = _condition_blocks(
        m, m[keep], k, k[:, keep], k[np.ix_(keep, keep)] + e[np.ix_(keep, keep)], ys[keep]
    )

    exact = [i for i in keep if not np.any(e[i])]
    for i in exact:
        same = np.flatnonzero(xs == xs[i])
        mean[same] = ys[i]
        cov[same, :] = 0.0
        cov[:, same] = 0.0
    mean.flags.writeable = False
    cov.flags.writeable = False
    return NodePosterior(xs, mean, cov, jitter)


def weight_two_point(model: ProcessModel, x: float, xp: float, xpp: float) -> TwoPointWeight:
    """Coefficients mapping deviations at ``xp`` and ``xpp`` to the mean deviation at ``x``.

    ``w = [C(x,x')V(x'') - C(x,x'')C(x',x''),  C(x,x'')V(x') - C(x,x')C(x',x'')] / denom``
    with ``denom = V(x')V(x'') - C(x',x'')^2``.
    """
    if xp > xpp:
        raise InvalidParameter(f"bracket must satisfy xp < xpp, got {xp} > {xpp}")
    vp, vpp = float(model.variance(xp)), float(model.variance(xpp))
    c_x_p, c_x_pp = float(model.covariance(x, xp)), float(model.covariance(x, xpp))
    c_p_pp = float(model.covariance(xp, xpp))
    denom = vp * vpp - c_p_pp**2
    if xp == xpp or denom <= DEGENERATE_RTOL * vp * vpp:
        raise DegenerateBracket(f"f({xp}) and f({xpp}) are perfectly correlated (denominator {denom:.3e})")
    w = np.array([c_x_p * vpp - c_x_pp * c_p_pp, c_x_pp * vp - c_x_p * c_p_pp]) / denom
    return TwoPointWeight(w, denom)


def cond_var_one(model: ProcessModel, x: float, xp: float) -> float:
    """``Var(f(x) | f(xp)) = V(x) - C(x, xp)^2 / V(xp)``."""
    vp = float(model.variance(xp))
    if vp <= 0.0:
        raise DegenerateBracket(f"V({xp}) = {vp} leaves nothing to condition on")
    return _clamp_var(float(model.variance(x)) - float(model.covariance(x, xp)) ** 2 / vp)


def cond_var_two(model: ProcessModel, x: float, xp: float, xpp: float) -> float:
    """``Var(f(x) | f(xp), f(xpp))``."""
    w = weight_two_point(model, x, xp, xpp).w
    c = np.array([float(model.covariance(x, xp)), float(model.covariance(x, xpp))])
    return _clamp_var(float(model.variance(x)) - float(w @ c))


def _locate(xs: np.ndarray, x: float) -> tuple[str, int]:
    n = xs.size
    i = int(np.searchsorted(xs, x, side="left"))
    if i < n and xs[i] == x:
        return "at-node", i
    if x < xs[0]:
        return "below-first", 0
    if x > xs[-1]:
        return "above-last", n - 1
    return "interior", int(np.searchsorted(xs, x, side="right")) - 1


def _check_query(node_post: NodePosterior, data: Dataset, x) -> float:
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"query location must be >= 0, got {x}")
    if node_post.mean.shape != data.xs.shape or not np.array_equal(node_post.xs, data.xs):
        raise DimensionMismatch("node posterior was fitted on different sample locations")
    return x


def _one_sided(model, node_post, x, i):
    xi = float(node_post.xs[i])
    vi = float(model.variance(xi))
    mx = float(model.mean(x))
    if vi == 0.0:
        # f(x_i) is a known constant and carries no information about f(x).
        return mx, _clamp_var(float(model.variance(x)))
    coef = float(model.covariance(xi, x)) / vi
    mean = mx + coef * (node_post.mean[i] - float(model.mean(xi)))
    var = coef**2 * node_post.covariance[i, i] + cond_var_one(model, x, xi)
    return mean, _clamp_var(var)


def evaluate_posterior(model: ProcessModel, node_post: NodePosterior, data: Dataset, x: float) -> PosteriorPoint:
    """Posterior mean and variance of ``f(x)`` from the neighbouring nodes.

    Below the first node (above the last) the estimate extrapolates from that
    single node; between two nodes it combines both with the two-point
    weights; at a node it returns the node posterior itself.
    """
    x = _check_query(node_post, data, x)
    case, i = _locate(data.xs, x)
    if case == "at-node":
        return PosteriorPoint(x, float(node_post.mean[i]), _clamp_var(node_post.covariance[i, i]), case, i)
    if case != "interior":
        mean, var = _one_sided(model, node_post, x, i)
        return PosteriorPoint(x, float(mean), var, case, i)

    k, k1 = i, i + 1
    xk, xk1 = float(data.xs[k]), float(data.xs[k1])
    vk, vk1 = float(model.variance(xk)), float(model.variance(xk1))
    if vk == 0.0 or vk1 == 0.0:
        if vk == 0.0 and vk1 == 0.0:
            mean, var = float(model.mean(x)), _clamp_var(float(model.variance(x)))
        else:
            mean, var = _one_sided(model, node_post, x, k1 if vk == 0.0 else k)
        return PosteriorPoint(x, float(mean), var, case, k)

    w = weight_two_point(model, x, xk, xk1).w
    dev = node_post.mean[[k, k1]] - np.array([float(model.mean(xk)), float(model.mean(xk1))])
    block = node_post.covariance[np.ix_([k, k1], [k, k1])]
    mean = float(model.mean(x)) + float(w @ dev)
    var = float(w @ block @ w) + cond_var_two(model, x, xk, xk1)
    return PosteriorPoint(x, mean, _clamp_var(var), case, k)


def evaluate_brownian_fast(bm: BrownianMotionModel, node_post: NodePosterior, data: Dataset, x: float) -> PosteriorPoint:
    """Closed-form evaluation specialised to Brownian motion.

    Between nodes the mean is the straight line joining the node estimates
    and the variance adds a bridge term ``sigma^2 (x_{k+1}-x)(x-x_k)/(x_{k+1}-x_k)``;
    beyond the last node the estimate follows the drift and the variance
    grows like ``sigma^2 (x - x_n)``.
    """
    x = _check_query(node_post, data, x)
    case, i = _locate(data.xs, x)
    mean_n, cov_n = node_post.mean, node_post.covariance
    s2, s02 = bm.sigma**2, bm.sigma0**2

    if case == "at-node":
        return PosteriorPoint(x, float(mean_n[i]), _clamp_var(cov_n[i, i]), case, i)
    if case == "above-last":
        xn = float(data.xs[i])
        mean = mean_n[i] + bm.mu * (x - xn)
        var = cov_n[i, i] + s2 * (x - xn)
        return PosteriorPoint(x, float(mean), _clamp_var(var), case, i)
    if case == "below-first":
        x1 = float(data.xs[0])
        v1 = s02 + s2 * x1
        if v1 == 0.0:
            raise DegenerateBracket("first node has zero prior variance")
        r = (s02 + s2 * x) / v1
        mean = bm.mu0 + bm.mu * x + r * (mean_n[0] - bm.mu0 - bm.mu * x1)
        var = r * r * cov_n[0, 0] + r * s2 * (x1 - x)
        return PosteriorPoint(x, float(mean), _clamp_var(var), case, 0)

    k = i
    xk, xk1 = float(data.xs[k]), float(data.xs[k + 1])
    span = xk1 - xk
    a, b = (xk1 - x) / span, (x - xk) / span
    mean = a * mean_n[k] + b * mean_n[k + 1]
    var = a * a * cov_n[k, k] + 2.0 * a * b * cov_n[k, k + 1] + b * b * cov_n[k + 1, k + 1]
    var += s2 * (xk1 - x) * (x - xk) / span
    return PosteriorPoint(x, float(mean), _clamp_var(var), case, k)


def evaluate_grid(model: ProcessModel, node_post: NodePosterior, data: Dataset, grid: Iterable[float],
                  workers: int | None = None) -> list[PosteriorPoint]:
    """Evaluate the posterior at every grid point, in input order.

    Points are independent, so they are fanned out over a thread pool when
    ``workers`` is greater than one.
    """
    grid = [float(x) for x in grid]
    if workers is None or workers <= 1 or len(grid) < 2:
        return [evaluate_posterior(model, node_post, data, x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda x: evaluate_posterior(model, node_post, data, x), grid))


def bridge_moments(mu1: float, mu2: float, s1: float, s2: float, rho: float,
                   x1: float, x2: float, sigma: float, x: float) -> tuple[float, float]:
    """Mean and variance of a Brownian bridge whose endpoints are themselves uncertain.

    The endpoints ``(f(x1), f(x2))`` are jointly normal with means ``mu1, mu2``,
    standard deviations ``s1, s2`` and correlation ``rho``.  With
    ``a = (x2 - x)/(x2 - x1)`` and ``b = (x - x1)/(x2 - x1)``::

        mean = a*mu1 + b*mu2
        var  = a^2 s1^2 + 2ab rho s1 s2 + b^2 s2^2 + sigma^2 (x2 - x)(x - x1)/(x2 - x1)

    ``s1 = s2 = 0`` recovers the classical bridge pinned at both ends.
    """
    if not x1 < x2:
        raise InvalidParameter(f"need x1 < x2, got {x1}, {x2}")
    if not x1 <= x <= x2:
        raise InvalidParameter(f"x={x} lies outside [{x1}, {x2}]")
    if s1 < 0 or s2 < 0 or sigma < 0:
        raise InvalidParameter("standard deviations must be nonnegative")
    if not -1.0 <= rho <= 1.0:
        raise InvalidParameter(f"correlation must lie in [-1, 1], got {rho}")
    span = x2 - x1
    a, b = (x2 - x) / span, (x - x1) / span
    mean = mu1 + b * (mu2 - mu1)
    var = a * a * s1 * s1 + 2.0 * a * b * rho * s1 * s2 + b * b * s2 * s2
    var += sigma * sigma * (x2 - x) * (x - x1) / span
    return mean, var
