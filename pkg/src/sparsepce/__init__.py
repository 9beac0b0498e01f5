"""Sparse polynomial chaos surrogates with inner/outer cross validation."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .basis import BasisSpec, design_matrix, enumerate_total_degree, eval_univariate  # noqa: E402
from .input_model import InputSpace, MarginalDistribution, from_unit, lhs_sample, to_standard  # noqa: E402
from .regression import corrected_icv_error, loo_error, ols_fit  # noqa: E402
from .selectors import Selector, lars_path, omp_path  # noqa: E402
from .sensitivity import pce_moments, sobol_indices  # noqa: E402
from .training import ExperimentalDesign, SparsePceModel, TrainConfig, predict, train  # noqa: E402
from .validation import outer_loocv, q_squared, r_squared_train, replication_study  # noqa: E402

__all__ = [
    "BACKEND",
    "BasisSpec",
    "ExperimentalDesign",
    "InputSpace",
    "MarginalDistribution",
    "Selector",
    "SparsePceModel",
    "TrainConfig",
    "corrected_icv_error",
    "design_matrix",
    "enumerate_total_degree",
    "eval_univariate",
    "from_unit",
    "lars_path",
    "lhs_sample",
    "loo_error",
    "ols_fit",
    "omp_path",
    "outer_loocv",
    "pce_moments",
    "predict",
    "q_squared",
    "r_squared_train",
    "replication_study",
    "sobol_indices",
    "to_standard",
    "train",
]
