"""Degree-adaptive construction of sparse and full PCE models."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

from .basis import BasisSpec, DesignCache, cardinality, design_matrix
from .errors import DataError, NumericalError, TrainingError
from .input_model import InputSpace
from .regression import corrected_icv_error, loo_error, ols_fit
from .selectors import Selector, lars_path, omp_path


class ErrorMetric(str, Enum):
    LOO = "LOO"
    CORRECTED = "CorrectedLOO"


@dataclass(frozen=True)
class TrainConfig:
    selector: Selector = Selector.LARS
    p_max: int = 10
    seed: int = 0
    error_metric: ErrorMetric = ErrorMetric.CORRECTED

    def __post_init__(self):
        object.__setattr__(self, "selector", Selector(self.selector))
        object.__setattr__(self, "error_metric", ErrorMetric(self.error_metric))
        if int(self.p_max) < 1:
            raise ValueError("p_max must be >= 1")

    def to_dict(self):
        return {
            "selector": self.selector.value,
            "p_max": self.p_max,
            "seed": self.seed,
            "error_metric": self.error_metric.value,
        }


@dataclass(frozen=True)
class ExperimentalDesign:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape[0] != y.shape[0]:
            raise DataError(f"{x.shape[0]} input rows but {y.shape[0]} responses")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def size(self) -> int:
        return self.y.shape[0]

    def subset(self, rows) -> "ExperimentalDesign":
        return ExperimentalDesign(self.x[rows], self.y[rows])


@dataclass(frozen=True)
class SparsePceModel:
    spec: BasisSpec
    coefficients: np.ndarray
    input_space: InputSpace
    diagnostics: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=float)
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        if coef.shape != (self.spec.size,):
            raise ValueError("one coefficient per selected multi-index is required")
        object.__setattr__(self, "diagnostics", MappingProxyType(dict(self.diagnostics)))

    @property
    def indices(self) -> np.ndarray:
        return self.spec.indices

    @property
    def families(self):
        return self.spec.families


def predict(model: SparsePceModel, x_batch) -> np.ndarray:
    """Evaluate the expansion at natural-unit inputs."""
    z = model.input_space.standardize(x_batch)
    return design_matrix(z, model.spec) @ model.coefficients


@dataclass
class _Candidate:
    error: float
    p: int
    n_terms: int
    positions: np.ndarray
    coefficients: np.ndarray
    loo: float
    corrected: float


def _full_candidate(psi, y, p):
    n = y.shape[0]
    if psi.shape[1] > n - 1:
        return None
    try:
        fit = ols_fit(psi, y)
        loo = loo_error(fit, y)
        corr = corrected_icv_error(fit, y)
    except NumericalError:
        return None
    return _Candidate(np.nan, p, psi.shape[1], np.arange(psi.shape[1]), fit.coefficients, loo, corr)


def _path_candidates(path, p):
    for j in range(1, len(path) + 1):
        yield _Candidate(np.nan, p, j, path.order[:j], path.coefficients[j - 1], path.loo[j - 1], path.corrected_loo[j - 1])


def fit_standardized(z, y, families, cfg: TrainConfig, cache: DesignCache | None = None, rows=None):
    """Core of :func:`train` on already-standardized inputs.

    ``cache`` may hold design matrices of a larger sample set; ``rows`` then
    selects the training rows. Returns ``(indices, coefficients, diagnostics)``.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 3:
        raise DataError(f"training needs at least 3 samples, got {n}")
    if not np.all(np.isfinite(y)):
        raise DataError("responses must be finite")
    if cache is None:
        cache = DesignCache(z, families, cfg.p_max)
    d = cache.d
    use_corrected = cfg.error_metric is ErrorMetric.CORRECTED

    best: _Candidate | None = None
    per_p: dict[int, float] = {}
    for p in range(1, cfg.p_max + 1):
        if cfg.selector is Selector.FULL and cardinality(d, p) > n - 1:
            break
        psi = cache.matrix(p)
        if rows is not None:
            # keep the column-major layout of a directly built matrix so BLAS
            # reductions run in the same order and folds stay bit-identical
            psi = np.asfortranarray(psi[rows])
        indices = cache.indices(p)
        if cfg.selector is Selector.FULL:
            cand = _full_candidate(psi, y, p)
            cands = [cand] if cand is not None else []
        else:
            p_cap = min(n - 1, psi.shape[1])
            run = omp_path if cfg.selector is Selector.OMP else lars_path
            cands = list(_path_candidates(run(psi, y, indices, p_cap), p))
        e_min = np.inf
        for cand in cands:
            cand.error = cand.corrected if use_corrected else cand.loo
            if cand.error < e_min:
                e_min = cand.error
            # strict '<' keeps the smaller p, then the smaller P, on ties
            if np.isfinite(cand.error) and (best is None or cand.error < best.error):
                best = cand
        per_p[p] = float(e_min)
        if p > 2 and per_p[p] > per_p[p - 1] > per_p[p - 2]:
            break

    if best is None:
        raise TrainingError(f"no admissible (p, P) candidate for selector {cfg.selector.value} with N={n}")
    indices = cache.indices(best.p)[best.positions]
    diagnostics = {
        "selector": cfg.selector.value,
        "error_metric": cfg.error_metric.value,
        "n_train": int(n),
        "p_chosen": int(best.p),
        "p_tried": sorted(per_p),
        "per_p_min_error": {str(k): v for k, v in per_p.items()},
        "n_terms": int(best.n_terms),
        "eps_loo": float(best.loo),
        "eps_icv": float(best.corrected),
        "var_y": float(np.var(y)),
    }
    return indices, best.coefficients, diagnostics


def train(ed: ExperimentalDesign, space: InputSpace, cfg: TrainConfig | None = None, cache=None, rows=None) -> SparsePceModel:
    """Select degree and active set by (corrected) LOO error and fit the model.

    For p = 1..p_max a selector path is run on the total-degree basis; the
    (p, step) pair with the smallest error over all tried degrees wins. The
    degree loop stops once the per-degree minimum error has increased twice
    in a row.
    """
    cfg = cfg or TrainConfig()
    if ed.x.shape[1] != space.dimension:
        raise DataError(f"design has {ed.x.shape[1]} input columns, input space has {space.dimension}")
    z = space.standardize(ed.x) if cache is None else None
    indices, coef, diag = fit_standardized(z, ed.y, space.families, cfg, cache=cache, rows=rows)
    spec = BasisSpec(space.families, indices)
    fitted = predict(SparsePceModel(spec, coef, space), ed.x)
    var_y = diag["var_y"]
    diag["q2_icv"] = 1.0 - diag["eps_icv"] / var_y if var_y > 0 else float("nan")
    diag["r2_train"] = 1.0 - float(np.mean((ed.y - fitted) ** 2)) / var_y if var_y > 0 else 1.0
    diag["nonzero_coefficients"] = int(np.count_nonzero(coef))
    return SparsePceModel(spec, coef, space, diag, cfg.seed)


__all__ = [
    "ErrorMetric",
    "ExperimentalDesign",
    "SparsePceModel",
    "TrainConfig",
    "predict",
    "train",
]
