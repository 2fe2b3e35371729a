"""Exact Gaussian posteriors for Gauss-Markov processes observed with noise."""

from .bands import confidence_band, norm_ppf, two_sided_z
from .errors import (
    DegenerateBracket,
    DimensionMismatch,
    DomainError,
    GaussMarkovError,
    InvalidParameter,
    NotPSD,
    SingularConditioning,
)
from .gaussian import CholeskyFactor, GaussianVector, PartitionedGaussian, cholesky_psd, condition, sample
from .oracle import MonteCarloResult, dense_oracle, mc_mse, noise_free_mse
from .posterior import (
    Dataset,
    NodePosterior,
    PosteriorPoint,
    TwoPointWeight,
    bridge_moments,
    cond_var_one,
    cond_var_two,
    evaluate_brownian_fast,
    evaluate_grid,
    evaluate_posterior,
    node_posterior,
    weight_two_point,
)
from .processes import BrownianMotionModel, KernelProcess, ProcessModel, brownian, parse_model_config, validate_markov

__version__ = "0.1.0"
