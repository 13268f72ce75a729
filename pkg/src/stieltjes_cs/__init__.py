"""Stieltjes moment weight and deformed coherent states for the Landau problem."""

from .errors import (
    AccuracyError,
    ConfigError,
    DegenerateCaseError,
    DimensionError,
    DomainError,
    RangeError,
    StieltjesError,
)
from .moments import (
    GeneralizedFactorial,
    QDeformation,
    QuadratureConfig,
    eq_exp,
    generalized_factorial,
    moment_exact_log,
    moment_numeric_log,
    verify_moments,
    weight_laplace,
    weight_mellin_barnes,
    x_seq,
)
from .special import complex_gamma

__version__ = "0.1.0"
