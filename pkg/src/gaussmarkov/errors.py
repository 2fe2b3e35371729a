"""Exception hierarchy shared by every module of the package."""


class GaussMarkovError(Exception):
    """Base class for all errors raised by :mod:`gaussmarkov`."""


class DimensionMismatch(GaussMarkovError, ValueError):
    pass


class NotPSD(GaussMarkovError, ValueError):
    """A matrix that must be positive semidefinite is not, even after jitter."""


class SingularConditioning(GaussMarkovError):
    """The covariance of the conditioning block cannot be inverted.

    Usually caused by duplicated noise-free observations that disagree, or by
    observing a deterministic value that differs from its mean.
    """


class InvalidParameter(GaussMarkovError, ValueError):
    pass


class DomainError(GaussMarkovError, ValueError):
    """A location outside the half line ``x >= 0``."""


class DegenerateBracket(GaussMarkovError):
    """Two bracketing locations are perfectly correlated (or have zero variance)."""
