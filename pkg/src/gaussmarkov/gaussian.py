"""Finite-dimensional Gaussian vectors: factorization, conditioning and sampling.

All matrix algebra goes through triangular solves against a Cholesky factor;
no explicit inverse is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NotPSD, SingularConditioning

#: Relative jitter ladder tried by :func:`cholesky_psd`, in units of max(diag).
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


class CholeskyFactor(NamedTuple):
    lower: np.ndarray
    jitter: float


def _as_matrix(matrix) -> np.ndarray:
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def cholesky_psd(matrix) -> CholeskyFactor:
    """Cholesky factor of a symmetric PSD matrix with escalating diagonal jitter.

    Tries ``matrix + eps * I`` for ``eps`` in ``JITTER_LADDER * max(diag)``
    and returns the first factor that succeeds together with the ``eps`` used.
    An all-zero matrix factors to an all-zero ``L`` with ``eps = 0``.

    Raises
    ------
    NotPSD
        If every rung of the ladder fails.
    """
    a = _as_matrix(matrix)
    if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise NotPSD("matrix is not symmetric")
    if a.size == 0 or not np.any(a):
        return CholeskyFactor(np.zeros_like(a), 0.0)
    scale = float(np.max(np.diag(a)))
    if scale <= 0.0:
        raise NotPSD("matrix has no positive diagonal entry")
    eye = np.eye(a.shape[0])
    for rung in JITTER_LADDER:
        eps = rung * scale
        try:
            return CholeskyFactor(np.linalg.cholesky(a + eps * eye), eps)
        except np.linalg.LinAlgError:
            continue
    raise NotPSD(f"Cholesky failed for every jitter up to {JITTER_LADDER[-1] * scale:g}")


def is_psd(matrix, tol: float = PSD_TOL) -> bool:
    a = _as_matrix(matrix)
    if a.size == 0:
        return True
    return bool(np.linalg.eigvalsh(0.5 * (a + a.T)).min() >= -tol)


def clamp_covariance(cov: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Symmetrize ``cov`` and zero out diagonal round-off in ``[-tol, 0)``.

    Diagonal entries below ``-tol`` indicate a logic error, not round-off,
    and raise :class:`NotPSD`.
    """
    cov = 0.5 * (cov + cov.T)
    d = np.diag(cov).copy()
    if np.any(d < -tol):
        raise NotPSD(f"negative variance {d.min():.3e} beyond round-off tolerance")
    neg = d < 0.0
    if np.any(neg):
        idx = np.flatnonzero(neg)
        cov[idx, :] = 0.0
        cov[:, idx] = 0.0
    return cov


@dataclass(frozen=True)
class GaussianVector:
    """Multivariate normal ``N(mean, covariance)``.

    ``jitter`` records the diagonal regularization that was needed to
    produce this vector (0 for anything not built by conditioning).
    """

    mean: np.ndarray
    covariance: np.ndarray
    jitter: float = 0.0

    def __post_init__(self):
        mean = np.atleast_1d(np.array(self.mean, dtype=float))
        cov = np.atleast_2d(np.array(self.covariance, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"mean of length {mean.size} does not match covariance {cov.shape}"
            )
        if not np.allclose(cov, cov.T, rtol=0.0, atol=SYMMETRY_TOL):
            raise NotPSD("covariance is not symmetric")
        if not is_psd(cov):
            raise NotPSD("covariance is not positive semidefinite")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    def marginal(self, indices: Sequence[int]) -> GaussianVector:
        idx = np.asarray(indices, dtype=int)
        return GaussianVector(self.mean[idx], self.covariance[np.ix_(idx, idx)])


@dataclass(frozen=True)
class PartitionedGaussian:
    """A Gaussian vector split into a target block and a conditioning block."""

    underlying: GaussianVector
    block1: tuple[int, ...]
    block2: tuple[int, ...]
    _b1: np.ndarray = field(init=False, repr=False, compare=False)
    _b2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b1 = np.asarray(self.block1, dtype=int).ravel()
        b2 = np.asarray(self.block2, dtype=int).ravel()
        if b1.size < 1 or b2.size < 1:
            raise DimensionMismatch("both blocks need at least one index")
        both = np.concatenate([b1, b2])
        if np.unique(both).size != both.size:
            raise DimensionMismatch("blocks overlap or repeat an index")
        if both.size != self.underlying.dim or set(both.tolist()) != set(range(self.underlying.dim)):
            raise DimensionMismatch("blocks must jointly cover every dimension exactly once")
        object.__setattr__(self, "block1", tuple(b1.tolist()))
        object.__setattr__(self, "block2", tuple(b2.tolist()))
        object.__setattr__(self, "_b1", b1)
        object.__setattr__(self, "_b2", b2)

    @classmethod
    def split(cls, mean, covariance, n1: int) -> PartitionedGaussian:
        """Partition with the first ``n1`` coordinates as the target block."""
        g = GaussianVector(mean, covariance)
        return cls(g, tuple(range(n1)), tuple(range(n1, g.dim)))

    def blocks(self):
        """Return ``(mu1, mu2, S11, S12, S22)``."""
        m, s = self.underlying.mean, self.underlying.covariance
        b1, b2 = self._b1, self._b2
        return m[b1], m[b2], s[np.ix_(b1, b1)], s[np.ix_(b1, b2)], s[np.ix_(b2, b2)]


def _condition_blocks(mu1, mu2, s11, s12, s22, observed):
    """Core of :func:`condition` on raw arrays; returns ``(mean, cov, jitter)``."""
    observed = np.asarray(observed, dtype=float).ravel()
    if observed.size != mu2.size:
        raise DimensionMismatch(f"observed has length {observed.size}, expected {mu2.size}")
    try:
        chol = cholesky_psd(s22)
    except NotPSD as exc:
        raise SingularConditioning(str(exc)) from exc
    if np.any(np.diag(chol.lower) <= 0.0):
        raise SingularConditioning("conditioning covariance is singular")
    # A = L^-1 S21, b = L^-1 (z2 - mu2)
    a = solve_triangular(chol.lower, s12.T, lower=True, check_finite=False)
    b = solve_triangular(chol.lower, observed - mu2, lower=True, check_finite=False)
    mean = mu1 + a.T @ b
    cov = clamp_covariance(s11 - a.T @ a)
    return mean, cov, chol.jitter


def condition(g: PartitionedGaussian, observed) -> GaussianVector:
    """Distribution of block 1 given that block 2 equals ``observed``.

    Returns ``N(mu1 + S12 S22^-1 (z2 - mu2), S11 - S12 S22^-1 S21)``, the
    covariance symmetrized and clamped per :func:`clamp_covariance`.
    """
    mean, cov, jitter = _condition_blocks(*g.blocks(), observed)
    return GaussianVector(mean, cov, jitter)


def psd_factor(covariance) -> np.ndarray:
    """Square-root factor ``L`` with ``L L^T = covariance`` for sampling.

    Coordinates with exactly zero variance are deterministic and are kept out
    of the factorization so that they are reproduced exactly; the remaining
    block goes through :func:`cholesky_psd`.
    """
    cov = _as_matrix(covariance)
    d = np.diag(cov)
    if np.any(d < 0.0):
        raise NotPSD("negative variance on the diagonal")
    live = np.flatnonzero(d > 0.0)
    dead = np.flatnonzero(d == 0.0)
    if dead.size and np.any(cov[dead, :]):
        raise NotPSD("zero-variance coordinate has nonzero covariance")
    factor = np.zeros_like(cov)
    if live.size:
        factor[np.ix_(live, live)] = cholesky_psd(cov[np.ix_(live, live)]).lower
    return factor


def sample(g: GaussianVector, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` iid rows from ``g``; deterministic in ``seed``."""
    if count < 1:
        raise ValueError("count must be a positive integer")
    factor = psd_factor(g.covariance)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, g.dim))
    return g.mean + z @ factor.T
