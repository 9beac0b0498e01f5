"""Least squares fits with analytic leave-one-out errors.

The LOO residual of a linear smoother is ``r_i / (1 - h_i)`` with ``h`` the
hat-matrix diagonal, so no refitting is needed. The corrected error
multiplies by ``N / (N - P) * (1 + tr((Psi^T Psi)^-1))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import CorrectionUndefinedError, DegenerateLeverageError, SingularSystemError

MAX_CONDITION = 1e12
LEVERAGE_TOL = 1e-12


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    hat_diagonal: np.ndarray
    gram_inverse_trace: float
    residuals: np.ndarray
    condition: float

    @property
    def n_samples(self) -> int:
        return self.residuals.shape[0]

    @property
    def n_terms(self) -> int:
        return self.coefficients.shape[0]


def condition_estimate(gram_trace: float, gram_inverse_trace: float) -> float:
    """tr(G) * tr(G^-1), an upper bound on the 2-norm condition number of G."""
    return gram_trace * gram_inverse_trace


def ols_fit(psi, y, max_condition: float = MAX_CONDITION) -> OlsFit:
    """OLS through a reduced QR of ``psi``; the Gram matrix is never formed."""
    psi = np.asarray(psi, dtype=float)
    y = np.asarray(y, dtype=float)
    if psi.ndim != 2 or y.shape != (psi.shape[0],):
        raise ValueError(f"shape mismatch: psi {psi.shape}, y {y.shape}")
    n, p = psi.shape
    if not n >= p >= 1:
        raise SingularSystemError(f"need N >= P >= 1, got N={n}, P={p}", condition=np.inf)
    q, r = np.linalg.qr(psi)
    diag = np.abs(np.diag(r))
    if np.any(diag == 0.0) or not np.all(np.isfinite(r)):
        raise SingularSystemError("design matrix is rank deficient", condition=np.inf)
    r_inv = solve_triangular(r, np.eye(p))
    inv_trace = float(np.sum(r_inv**2))
    cond = condition_estimate(float(np.sum(psi**2)), inv_trace)
    if not cond <= max_condition:
        raise SingularSystemError(f"Gram matrix condition estimate {cond:.3e} exceeds {max_condition:.0e}", cond)
    beta = r_inv @ (q.T @ y)
    return OlsFit(
        coefficients=beta,
        hat_diagonal=np.sum(q**2, axis=1),
        gram_inverse_trace=inv_trace,
        residuals=y - psi @ beta,
        condition=cond,
    )


def _loo(residuals, hat_diagonal) -> float:
    if np.any(hat_diagonal >= 1.0 - LEVERAGE_TOL):
        raise DegenerateLeverageError("a training point has leverage 1; the fit interpolates it")
    return float(np.mean((residuals / (1.0 - hat_diagonal)) ** 2))


def loo_error(fit: OlsFit, y) -> float:
    """Exact leave-one-out mean squared error of an OLS fit."""
    y = np.asarray(y, dtype=float)
    if y.shape != fit.residuals.shape:
        raise ValueError("response vector does not match the fit")
    return _loo(fit.residuals, fit.hat_diagonal)


def correction_factor(n_terms: int, n_samples: int, gram_inverse_trace: float) -> float:
    if n_terms >= n_samples:
        raise CorrectionUndefinedError(f"correction needs P < N, got P={n_terms}, N={n_samples}")
    return (1.0 - n_terms / n_samples) ** -1 * (1.0 + gram_inverse_trace)


def corrected_icv_error(fit: OlsFit, y, n_terms: int | None = None) -> float:
    """LOO error inflated by the small-sample correction factor."""
    p = fit.n_terms if n_terms is None else int(n_terms)
    factor = correction_factor(p, fit.n_samples, fit.gram_inverse_trace)
    return loo_error(fit, y) * factor


class IncrementalQR:
    """Reduced QR of a growing set of columns, plus everything the path needs.

    Columns are orthogonalized by classical Gram-Schmidt with one
    re-orthogonalization pass. ``R^-1`` is kept explicitly so coefficients,
    ``tr((Psi^T Psi)^-1)`` and equiangular directions cost O(k^2) per step.
    """

    def __init__(self, y, capacity: int, max_condition: float = MAX_CONDITION):
        self.y = np.asarray(y, dtype=float)
        n = self.y.shape[0]
        self.q = np.zeros((n, capacity), order="F")
        self.r_inv = np.zeros((capacity, capacity))
        self.qty = np.zeros(capacity)
        self.hat = np.zeros(n)
        self.residual = self.y.copy()
        self.inv_trace = 0.0
        self.gram_trace = 0.0
        self.k = 0
        self.max_condition = max_condition

    def try_add(self, col) -> bool:
        """Append ``col`` unless the enlarged system is (numerically) singular."""
        k = self.k
        if k >= self.q.shape[1]:
            return False
        col = np.asarray(col, dtype=float)
        norm = float(np.sqrt(col @ col))
        if norm == 0.0 or not np.isfinite(norm):
            return False
        qk = self.q[:, :k]
        c1 = qk.T @ col
        v = col - qk @ c1
        c2 = qk.T @ v
        v = v - qk @ c2
        rho = float(np.sqrt(v @ v))
        if not rho > 1e-14 * norm:
            return False
        c = c1 + c2
        # new column of R^-1: [-R^-1 c / rho ; 1 / rho]
        top = -(self.r_inv[:k, :k] @ c) / rho
        inv_trace = self.inv_trace + float(top @ top) + 1.0 / rho**2
        gram_trace = self.gram_trace + norm**2
        if not condition_estimate(gram_trace, inv_trace) <= self.max_condition:
            return False
        qn = v / rho
        self.q[:, k] = qn
        self.r_inv[:k, k] = top
        self.r_inv[k, k] = 1.0 / rho
        self.qty[k] = qn @ self.y
        self.hat += qn**2
        self.residual = self.residual - qn * self.qty[k]
        self.inv_trace = inv_trace
        self.gram_trace = gram_trace
        self.k = k + 1
        return True

    def coefficients(self) -> np.ndarray:
        k = self.k
        return self.r_inv[:k, :k] @ self.qty[:k]

    def loo(self) -> float:
        try:
            return _loo(self.residual, self.hat)
        except DegenerateLeverageError:
            return np.inf

    def corrected(self, loo: float) -> float:
        n = self.y.shape[0]
        if self.k >= n or not np.isfinite(loo):
            return np.inf
        return loo * correction_factor(self.k, n, self.inv_trace)
