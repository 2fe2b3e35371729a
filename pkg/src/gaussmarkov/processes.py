"""Prior Gauss-Markov processes on the half line ``x >= 0``.

A process is described by its mean function ``m(x)``, covariance function
``C(x, x')`` and variance function ``V(x) = C(x, x)``.  Brownian motion with
drift and an uncertain starting value is built in; any other Gauss-Markov
kernel can be wrapped with :class:`KernelProcess` and screened with
:func:`validate_markov`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DomainError, InvalidParameter

MARKOV_RTOL = 1e-9


def _check_domain(*xs):
    for x in xs:
        if np.any(np.asarray(x) < 0):
            raise DomainError(f"process is defined on x >= 0, got {x!r}")


class ProcessModel(ABC):
    """Mean and covariance functions of a Gauss-Markov process.

    Subclasses implement :meth:`_mean` and :meth:`_covariance`; the public
    methods add the domain check.  Both are expected to broadcast over numpy
    arrays, but :meth:`gram` falls back to a Python loop when they do not.
    """

    @abstractmethod
    def _mean(self, x): ...

    @abstractmethod
    def _covariance(self, x, xp): ...

    def mean(self, x):
        _check_domain(x)
        return self._mean(x)

    def covariance(self, x, xp):
        _check_domain(x, xp)
        return self._covariance(x, xp)

    def variance(self, x):
        return self.covariance(x, x)

    def mean_vector(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        _check_domain(xs)
        out = np.asarray(self._mean(xs), dtype=float)
        if out.shape != xs.shape:
            out = np.array([float(self._mean(x)) for x in xs.ravel()]).reshape(xs.shape)
        return out

    def gram(self, xs, xps=None) -> np.ndarray:
        """Matrix ``C(xs[i], xps[j])``; ``xps`` defaults to ``xs``."""
        xs = np.asarray(xs, dtype=float).ravel()
        xps = xs if xps is None else np.asarray(xps, dtype=float).ravel()
        _check_domain(xs, xps)
        shape = (xs.size, xps.size)
        try:
            out = np.asarray(self._covariance(xs[:, None], xps[None, :]), dtype=float)
        except (TypeError, ValueError):
            out = None
        if out is None or out.shape != shape:
            out = np.array([[float(self._covariance(a, b)) for b in xps] for a in xs]).reshape(shape)
        return out


@dataclass(frozen=True)
class KernelProcess(ProcessModel):
    """A process given by user-supplied mean and covariance callables."""

    mean_fn: Callable
    cov_fn: Callable

    def _mean(self, x):
        return self.mean_fn(x)

    def _covariance(self, x, xp):
        return self.cov_fn(x, xp)


@dataclass(frozen=True)
class BrownianMotionModel(ProcessModel):
    """Brownian motion with drift ``mu``, scale ``sigma`` and ``f(0) ~ N(mu0, sigma0^2)``.

    ``m(x) = mu0 + mu * x`` and ``C(x, x') = sigma0^2 + sigma^2 * min(x, x')``.
    """

    mu0: float = 0.0
    mu: float = 0.0
    sigma0: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        for name in ("mu0", "mu", "sigma0", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameter(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sigma0 < 0 or self.sigma < 0:
            raise InvalidParameter("sigma0 and sigma must be nonnegative")

    def _mean(self, x):
        return self.mu0 + self.mu * x

    def _covariance(self, x, xp):
        return self.sigma0**2 + self.sigma**2 * np.minimum(x, xp)


def brownian(mu0: float = 0.0, mu: float = 0.0, sigma0: float = 0.0, sigma: float = 1.0) -> BrownianMotionModel:
    return BrownianMotionModel(mu0, mu, sigma0, sigma)


def validate_markov(model: ProcessModel, triples: Iterable[tuple[float, float, float]], rtol: float = MARKOV_RTOL) -> bool:
    """Check the Gauss-Markov covariance identity on increasing triples.

    For ``x < x' < x''`` a Gauss-Markov covariance satisfies
    ``C(x, x'') V(x') = C(x, x') C(x', x'')``, which is the covariance form of
    ``f(x)`` and ``f(x'')`` being conditionally independent given ``f(x')``.
    """
    for x, xp, xpp in triples:
        if not x < xp < xpp:
            raise InvalidParameter(f"triple ({x}, {xp}, {xpp}) is not strictly increasing")
        lhs = float(model.covariance(x, xpp)) * float(model.variance(xp))
        rhs = float(model.covariance(x, xp)) * float(model.covariance(xp, xpp))
        if abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs)):
            return False
    return True


_BROWNIAN_KEYS = ("mu0", "mu", "sigma0", "sigma")


def model_from_mapping(config: Mapping[str, str]) -> BrownianMotionModel:
    """Build a model from ``model=brownian`` plus ``mu0/mu/sigma0/sigma`` keys.

    Missing numeric keys take the :func:`brownian` defaults.
    """
    kind = config.get("model")
    if kind != "brownian":
        raise InvalidParameter(f"unsupported model {kind!r}; only 'brownian' is built in")
    unknown = set(config) - {"model", *_BROWNIAN_KEYS}
    if unknown:
        raise InvalidParameter(f"unknown model keys: {', '.join(sorted(unknown))}")
    params = {}
    for key in _BROWNIAN_KEYS:
        if key in config:
            try:
                params[key] = float(config[key])
            except ValueError:
                raise InvalidParameter(f"{key}={config[key]!r} is not a decimal number") from None
    return brownian(**params)


def parse_model_config(text: str) -> BrownianMotionModel:
    """Parse the ``key=value`` model configuration format.

    One pair per line (or separated by whitespace); ``#`` starts a comment.
    """
    config: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep or not key or not value:
                raise InvalidParameter(f"line {lineno}: expected key=value, got {token!r}")
            if key in config:
                raise InvalidParameter(f"line {lineno}: duplicate key {key!r}")
            config[key] = value
    return model_from_mapping(config)
