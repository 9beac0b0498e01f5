"""Moments and Sobol indices read off orthonormal PCE coefficients.

These are surrogate Sobol indices: exact functionals of the fitted
expansion, which only approximate those of the true model.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError

LABEL = "surrogate Sobol indices"


@dataclass(frozen=True)
class SobolIndices:
    total: np.ndarray
    first_order: np.ndarray
    second_order: np.ndarray
    variance: float
    mean: float

    def to_csv(self, names=None) -> str:
        d = self.total.shape[0]
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(d)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"# {LABEL}"])
        w.writerow(["name", "first", "total"])
        for i in range(d):
            w.writerow([names[i], repr(float(self.first_order[i])), repr(float(self.total[i]))])
        w.writerow(["sum", repr(float(self.first_order.sum())), repr(float(self.total.sum()))])
        w.writerow([])
        w.writerow(["i", "j", "second_order"])
        for i in range(d):
            for j in range(i + 1, d):
                w.writerow([names[i], names[j], repr(float(self.second_order[i, j]))])
        return buf.getvalue()


def _coefficients(model):
    return np.asarray(model.indices), np.asarray(model.coefficients, dtype=float)


def pce_moments(model) -> tuple[float, float]:
    indices, beta = _coefficients(model)
    zero = ~indices.any(axis=1)
    mean = float(beta[zero].sum()) if zero.any() else 0.0
    variance = float(np.sum(beta[~zero] ** 2))
    return mean, variance


def sobol_indices(model) -> SobolIndices:
    """Total, first- and (strict) second-order indices from squared coefficients."""
    indices, beta = _coefficients(model)
    mean, variance = pce_moments(model)
    if not variance > 0:
        raise UndefinedMetricError("Sobol indices are undefined for a zero-variance expansion")
    d = indices.shape[1]
    sq = beta**2
    active = indices > 0
    n_active = active.sum(axis=1)
    total = np.array([sq[active[:, i]].sum() for i in range(d)]) / variance
    first = np.array([sq[active[:, i] & (n_active == 1)].sum() for i in range(d)]) / variance
    second = np.zeros((d, d))
    pair_rows = n_active == 2
    for i in range(d):
        for j in range(i + 1, d):
            second[i, j] = second[j, i] = sq[pair_rows & active[:, i] & active[:, j]].sum() / variance
    return SobolIndices(total, first, second, variance, mean)
