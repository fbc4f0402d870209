"""The beta-Gompertz lifetime distribution and its nested sub-models."""

from .core import (
    BGParams, cdf, cumulative_hazard, hrf, log_pdf, log_sf, pdf, quantile,
    reversed_hrf, sample, sf,
)
from .datasets import aarset, parse_values, read_values
from .errors import ConvergenceError, DomainError, SeriesDivergenceError
from .inference import (
    Dataset, FitOptions, FitResult, compare_families, fit_mle, gof_report,
    information_criteria, ks_test, log_likelihood, lrt, observed_information,
    score, std_errors,
)
from .specfun import SeriesControl
from .submodels import BE, BG, E, FAMILIES, G, GE, GG, ModelFamily, ModelSpec, get_family

__version__ = "0.1.0"

__all__ = [
    "BGParams", "cdf", "cumulative_hazard", "hrf", "log_pdf", "log_sf", "pdf",
    "quantile", "reversed_hrf", "sample", "sf", "aarset", "parse_values",
    "read_values", "ConvergenceError", "DomainError", "SeriesDivergenceError",
    "Dataset", "FitOptions", "FitResult", "compare_families", "fit_mle",
    "gof_report", "information_criteria", "ks_test", "log_likelihood", "lrt",
    "observed_information", "score", "std_errors", "SeriesControl", "BE", "BG",
    "E", "FAMILIES", "G", "GE", "GG", "ModelFamily", "ModelSpec", "get_family",
]
