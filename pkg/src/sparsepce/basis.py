"""Total-degree multi-index sets and orthonormal tensor-product polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from ._backend import kernels
from .errors import DomainError, SizeError
from .input_model import Family

MAX_CARDINALITY = 10_000_000
_FAMILY_CODE = {Family.LEGENDRE: 0, Family.HERMITE: 1}


def cardinality(d: int, p: int) -> int:
    return comb(p + d, d)


def _exact_degree(d: int, t: int):
    """Degree vectors of total degree exactly t, descending lexicographic order."""
    if d == 1:
        yield (t,)
        return
    for first in range(t, -1, -1):
        for rest in _exact_degree(d - 1, t - first):
            yield (first,) + rest


@lru_cache(maxsize=64)
def _enumerate(d: int, p: int) -> np.ndarray:
    rows = [alpha for t in range(p + 1) for alpha in _exact_degree(d, t)]
    out = np.array(rows, dtype=np.int64).reshape(len(rows), d)
    out.setflags(write=False)
    return out


def enumerate_total_degree(d: int, p: int) -> np.ndarray:
    """All multi-indices with total degree <= p, as a read-only (P, d) int array.

    Ordering: ascending total degree, ties in descending lexicographic order,
    so the degree-p set is always a prefix of the degree-(p+1) set and row 0 is
    the zero index.
    """
    if d < 1 or p < 0:
        raise ValueError(f"need d >= 1 and p >= 0, got d={d}, p={p}")
    size = cardinality(d, p)
    if size > MAX_CARDINALITY:
        raise SizeError(f"C({p}+{d}, {d}) = {size} basis terms exceeds the limit {MAX_CARDINALITY}")
    return _enumerate(d, p)


def _family_code(family) -> int:
    return _FAMILY_CODE[Family(family)]


def _check_domain(z: np.ndarray, families: Sequence[Family]):
    for i, fam in enumerate(families):
        col = z[:, i]
        if Family(fam) is Family.LEGENDRE:
            bad = ~(np.abs(col) <= 1.0 + 1e-12)
        else:
            bad = ~np.isfinite(col)
        if np.any(bad):
            row = int(np.flatnonzero(bad)[0])
            raise DomainError(
                f"standardized sample ({row}, {i}) = {col[row]!r} outside the {Family(fam).value} domain",
                variable=i,
                row=row,
            )


def univariate_tables(z: np.ndarray, families: Sequence[Family], kmax: int) -> np.ndarray:
    """(d, kmax+1, N) table of every univariate polynomial at every sample."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    _check_domain(z, families)
    zc = np.clip(z, -1.0, 1.0)
    tables = np.empty((z.shape[1], kmax + 1, z.shape[0]))
    for i, fam in enumerate(families):
        col = zc[:, i] if Family(fam) is Family.LEGENDRE else z[:, i]
        tables[i] = kernels.univariate_table(np.ascontiguousarray(col), kmax, _family_code(fam))
    return tables


def eval_univariate(family, k: int, x):
    """Degree-k orthonormal polynomial of ``family`` at ``x`` (scalar or array)."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if Family(family) is Family.LEGENDRE and np.any(~(np.abs(arr) <= 1.0 + 1e-12)):
        raise DomainError(f"Legendre argument outside [-1, 1]: {arr[np.abs(arr) > 1][:3]}")
    if Family(family) is Family.HERMITE and np.any(~np.isfinite(arr)):
        raise DomainError("Hermite argument must be finite")
    if Family(family) is Family.LEGENDRE:
        arr = np.clip(arr, -1.0, 1.0)
    vals = kernels.univariate_table(np.ascontiguousarray(arr), int(k), _family_code(family))[k]
    return float(vals[0]) if np.ndim(x) == 0 else vals


@dataclass(frozen=True)
class BasisSpec:
    families: tuple[Family, ...]
    indices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(Family(f) for f in self.families))
        idx = np.array(self.indices, dtype=np.int64).reshape(-1, len(self.families))
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return self.indices.shape[0]


def design_matrix(std_samples, spec: BasisSpec) -> np.ndarray:
    """Regression matrix, entry (n, j) = prod_i psi_{alpha_ji}(z_ni).

    Returned Fortran-ordered so each basis column is contiguous.
    """
    z = np.atleast_2d(np.asarray(std_samples, dtype=float))
    if z.shape[1] != len(spec.families):
        raise DomainError(f"samples have {z.shape[1]} columns, basis expects {len(spec.families)}")
    if spec.size < 1:
        raise ValueError("basis must contain at least one multi-index")
    kmax = int(spec.indices.max()) if spec.indices.size else 0
    tables = univariate_tables(z, spec.families, kmax)
    return kernels.tensor_design(tables, np.ascontiguousarray(spec.indices)).T


class DesignCache:
    """Design matrices of growing total degree on one fixed sample set.

    Univariate tables are computed once up to ``p_max``; columns are appended
    one total-degree block at a time, so ``matrix(p)`` for increasing ``p``
    never recomputes earlier blocks.
    """

    def __init__(self, std_samples, families: Sequence[Family], p_max: int):
        self.z = np.atleast_2d(np.asarray(std_samples, dtype=float))
        self.families = tuple(Family(f) for f in families)
        self.d = len(self.families)
        self.p_max = p_max
        self._tables = univariate_tables(self.z, self.families, p_max)
        self._blocks: list[np.ndarray] = []
        self._full: dict[int, np.ndarray] = {}

    def indices(self, p: int) -> np.ndarray:
        return enumerate_total_degree(self.d, p)

    def matrix(self, p: int) -> np.ndarray:
        if p > self.p_max:
            raise ValueError(f"degree {p} exceeds the cached maximum {self.p_max}")
        if p not in self._full:
            alphas = self.indices(p)
            while len(self._blocks) <= p:
                t = len(self._blocks)
                start = cardinality(self.d, t - 1) if t > 0 else 0
                block = np.ascontiguousarray(alphas[start : cardinality(self.d, t)])
                self._blocks.append(kernels.tensor_design(self._tables, block))
            self._full = {p: np.vstack(self._blocks[: p + 1]).T}
        return self._full[p]
