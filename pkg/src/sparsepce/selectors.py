"""Greedy basis-selection paths: orthogonal matching pursuit and least angle regression.

Both selectors grow one nested active set and, at every step, refit the
active columns by OLS and record the analytic LOO error and its corrected
version. They differ only in how the next column is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._backend import kernels
from .regression import MAX_CONDITION, IncrementalQR

# a residual below this fraction of ||y|| counts as an exact fit
EXACT_FIT_RTOL = 1e-12


class Selector(str, Enum):
    OMP = "OMP"
    LARS = "LARS"
    FULL = "FULL"


@dataclass(frozen=True)
class PathStep:
    active: np.ndarray  # positions into the candidate basis
    active_set: np.ndarray  # the corresponding multi-indices
    coefficients: np.ndarray
    loo: float
    corrected_loo: float


@dataclass(frozen=True)
class SelectionPath:
    """Nested active sets; step j (1-based) uses ``order[:j]``."""

    selector: Selector
    indices: np.ndarray
    order: np.ndarray
    coefficients: tuple[np.ndarray, ...]
    loo: np.ndarray
    corrected_loo: np.ndarray

    def __len__(self):
        return len(self.coefficients)

    def step(self, j: int) -> PathStep:
        if not 1 <= j <= len(self):
            raise IndexError(f"path has {len(self)} steps, asked for step {j}")
        active = self.order[:j]
        return PathStep(active, self.indices[active], self.coefficients[j - 1], self.loo[j - 1], self.corrected_loo[j - 1])

    @property
    def steps(self) -> list[PathStep]:
        return [self.step(j) for j in range(1, len(self) + 1)]


def _check_inputs(psi, y, p_max):
    psi = np.asarray(psi, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p_full = psi.shape
    if y.shape != (n,):
        raise ValueError(f"response has shape {y.shape}, expected ({n},)")
    if p_max < 1 or p_max > min(n - 1, p_full):
        raise ValueError(f"P_max={p_max} must lie in [1, min(N-1, P_full)] = [1, {min(n - 1, p_full)}]")
    return psi, y


class _PathRecorder:
    def __init__(self, y, p_max, max_condition):
        self.qr = IncrementalQR(y, p_max, max_condition)
        self.order: list[int] = []
        self.coefs: list[np.ndarray] = []
        self.loo: list[float] = []
        self.corrected: list[float] = []

    def add(self, j, col) -> bool:
        if not self.qr.try_add(col):
            return False
        self.order.append(j)
        self.coefs.append(self.qr.coefficients())
        loo = self.qr.loo()
        self.loo.append(loo)
        self.corrected.append(self.qr.corrected(loo))
        return True

    def finish(self, selector, indices) -> SelectionPath:
        return SelectionPath(
            selector=selector,
            indices=np.asarray(indices),
            order=np.array(self.order, dtype=np.int64),
            coefficients=tuple(self.coefs),
            loo=np.array(self.loo),
            corrected_loo=np.array(self.corrected),
        )


def omp_path(psi, y, indices, p_max: int, max_condition: float = MAX_CONDITION) -> SelectionPath:
    """Orthogonal matching pursuit over the columns of ``psi``.

    Each step activates the candidate with the largest correlation
    ``|R^T psi_alpha| / ||psi_alpha||`` (lowest position on ties), refits by
    OLS and updates the residual.
    Candidates whose addition would make the fit singular are discarded and
    the next best is tried.
    """
    psi, y = _check_inputs(psi, y, p_max)
    rec = _PathRecorder(y, p_max, max_condition)
    norms = np.sqrt(np.einsum("ij,ij->j", psi, psi))
    available = norms > 0
    safe_norms = np.where(available, norms, 1.0)
    y_norm = float(np.linalg.norm(y))
    while len(rec.order) < p_max and available.any():
        if rec.order and np.linalg.norm(rec.qr.residual) <= EXACT_FIT_RTOL * y_norm:
            break
        corr = np.abs(psi.T @ rec.qr.residual) / safe_norms
        corr[~available] = -1.0
        while True:
            j = int(np.argmax(corr))
            if corr[j] < 0:
                break
            available[j] = False
            if rec.add(j, psi[:, j]):
                break
            corr[j] = -1.0
    return rec.finish(Selector.OMP, indices)


def lars_path(psi, y, indices, p_max: int, max_condition: float = MAX_CONDITION) -> SelectionPath:
    """Least angle regression activation order with hybrid OLS refits.

    The LARS geometry runs on unit-norm copies of the columns; the reported
    coefficients and LOO errors are OLS refits of each active set.
    """
    psi, y = _check_inputs(psi, y, p_max)
    norms = np.sqrt(np.einsum("ij,ij->j", psi, psi))
    rec = _PathRecorder(y, p_max, max_condition)
    candidate = (norms > 0).astype(np.uint8)
    safe_norms = np.where(norms > 0, norms, 1.0)
    mu = np.zeros_like(y)
    y_norm = float(np.linalg.norm(y))

    c = (psi.T @ y) / safe_norms
    scores = np.where(candidate.astype(bool), np.abs(c), -1.0)
    # first activation: largest absolute correlation
    while True:
        j = int(np.argmax(scores))
        if scores[j] < 0:
            return rec.finish(Selector.LARS, indices)
        candidate[j] = 0
        if rec.add(j, psi[:, j]):
            break
        scores[j] = -1.0

    while len(rec.order) < p_max:
        if np.linalg.norm(rec.qr.residual) <= EXACT_FIT_RTOL * y_norm:
            break
        k = rec.qr.k
        act = np.array(rec.order)
        c = (psi.T @ (y - mu)) / safe_norms
        signs = np.sign(c[act])
        signs[signs == 0] = 1.0
        big_c = float(np.max(np.abs(c[act])))
        # equiangular unit vector u = Q t / ||t||, t = R^-T (s * ||psi_A||)
        t = rec.qr.r_inv[:k, :k].T @ (signs * norms[act])
        big_a = 1.0 / float(np.sqrt(t @ t))
        u = (rec.qr.q[:, :k] @ t) * big_a
        a = (psi.T @ u) / safe_norms
        tiny = 1e-12 * big_c / big_a if big_c > 0 else 0.0
        while True:
            gamma, j = kernels.lars_step(
                np.ascontiguousarray(c), np.ascontiguousarray(a), big_c, big_a, candidate, tiny
            )
            if j < 0:
                break
            candidate[j] = 0
            if rec.add(j, psi[:, j]):
                break
        if j < 0:
            break
        mu = mu + gamma * u
    return rec.finish(Selector.LARS, indices)
