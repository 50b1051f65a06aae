"""Gamma generalized normal (GGN) distribution toolkit.

Density, cdf, quantile and sampling for the GGN family, series expansions
and moments, maximum-likelihood fitting with gamma and beta baselines,
goodness-of-fit statistics and a Monte Carlo study driver.
"""

from .errors import (
    DomainError,
    FitError,
    GGNError,
    PoleError,
    SeriesConvergenceError,
    SingularScoreError,
)
from .estimation import FitOptions, FitResult, ModelTag, fit_beta, fit_gamma, fit_ggn, ggn_loglik, ggn_score
from .ggn import GgnParams, ggn_cdf, ggn_logpdf, ggn_pdf, ggn_quantile, ggn_sf
from .gn import GnParams, gn_cdf, gn_pdf, gn_quantile
from .gof import GofReport, gof_report, info_criteria
from .models import FittedModel, fit_model
from .sample import Sample
from .sampling import StreamSpec, ggn_sample
from .series import SeriesConfig, SeriesResult, ggn_moment, ggn_moment_quadrature
from .study import StudyConfig, StudyResult, run_study

__all__ = [
    "DomainError", "FitError", "GGNError", "PoleError", "SeriesConvergenceError", "SingularScoreError",
    "FitOptions", "FitResult", "ModelTag", "fit_beta", "fit_gamma", "fit_ggn", "ggn_loglik", "ggn_score",
    "GgnParams", "ggn_cdf", "ggn_logpdf", "ggn_pdf", "ggn_quantile", "ggn_sf",
    "GnParams", "gn_cdf", "gn_pdf", "gn_quantile",
    "GofReport", "gof_report", "info_criteria",
    "FittedModel", "fit_model", "Sample", "StreamSpec", "ggn_sample",
    "SeriesConfig", "SeriesResult", "ggn_moment", "ggn_moment_quadrature",
    "StudyConfig", "StudyResult", "run_study",
]
