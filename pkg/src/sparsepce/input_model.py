"""Input marginals, isoprobabilistic standardization and Latin hypercube designs.

Uniform variables are mapped affinely onto [-1, 1] (Legendre reference
domain); Gaussian and lognormal variables, optionally truncated, are mapped
onto the standard normal through their CDF (Hermite reference domain).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigError, DomainError

# relative slack tolerated at the edges of a bounded support (rounding only)
_EDGE_RTOL = 1e-12
# smallest probability passed to the normal quantile at a truncation bound
_U_FLOOR = np.finfo(float).eps


class Kind(str, Enum):
    UNIFORM = "Uniform"
    GAUSSIAN = "Gaussian"
    LOGNORMAL = "Lognormal"


class Family(str, Enum):
    LEGENDRE = "Legendre"
    HERMITE = "Hermite"


@dataclass(frozen=True)
class MarginalDistribution:
    """One independent input variable.

    Parameters
    ----------
    kind : Kind
        Distribution family.
    params : tuple of float
        Uniform: (lower, upper). Gaussian: (mean, std). Lognormal: (mean, std)
        of the underlying normal.
    bounds : tuple of float, optional
        Truncation interval in natural units.
    """

    kind: Kind
    params: tuple[float, float]
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        a, b = (float(v) for v in self.params)
        object.__setattr__(self, "params", (a, b))
        if self.bounds is not None:
            lo, hi = (float(v) for v in self.bounds)
            object.__setattr__(self, "bounds", (lo, hi))
        if self.kind is Kind.UNIFORM:
            if not a < b:
                raise ConfigError(f"uniform marginal needs lower < upper, got {self.params}")
            if self.bounds is not None and self.bounds != (a, b):
                raise ConfigError("uniform bounds must equal (lower, upper)")
            return
        if not b > 0:
            raise ConfigError(f"{self.kind.value} marginal needs a positive standard deviation")
        if self.bounds is not None:
            lo, hi = self.bounds
            if not lo < hi:
                raise ConfigError(f"truncation bounds must satisfy lower < upper, got {self.bounds}")
            if self.kind is Kind.LOGNORMAL and hi <= 0:
                raise ConfigError("lognormal truncation interval must reach positive values")
            if not self._mass() > 0:
                raise ConfigError(f"truncation interval {self.bounds} holds no probability mass")

    # -- helpers in the underlying normal coordinate -------------------------
    def _z_bounds(self):
        mu, sigma = self.params
        lo, hi = self.bounds if self.bounds is not None else (-np.inf, np.inf)
        if self.kind is Kind.LOGNORMAL:
            lo = np.log(lo) if lo > 0 else -np.inf
            hi = np.log(hi)
        return (lo - mu) / sigma, (hi - mu) / sigma

    def _mass(self):
        zl, zu = self._z_bounds()
        return ndtr(zu) - ndtr(zl)

    @property
    def family(self) -> Family:
        return Family.LEGENDRE if self.kind is Kind.UNIFORM else Family.HERMITE

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is Kind.UNIFORM:
            return self.params
        if self.bounds is not None:
            return self.bounds
        return (0.0, np.inf) if self.kind is Kind.LOGNORMAL else (-np.inf, np.inf)

    def cdf(self, x):
        """CDF in natural units (the truncated CDF when bounds are set)."""
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.UNIFORM:
            a, b = self.params
            return np.clip((x - a) / (b - a), 0.0, 1.0)
        z = self._to_z(x)
        if self.bounds is None:
            return ndtr(z)
        zl, zu = self._z_bounds()
        return np.clip((ndtr(z) - ndtr(zl)) / (ndtr(zu) - ndtr(zl)), 0.0, 1.0)

    def _to_z(self, x):
        mu, sigma = self.params
        if self.kind is Kind.LOGNORMAL:
            with np.errstate(divide="ignore", invalid="ignore"):
                x = np.log(x)
        return (x - mu) / sigma

    def _from_z(self, z):
        mu, sigma = self.params
        x = mu + sigma * z
        return np.exp(x) if self.kind is Kind.LOGNORMAL else x

    def to_dict(self, name=None):
        out = {"kind": self.kind.value, "params": list(self.params)}
        if name is not None:
            out = {"name": name, **out}
        if self.bounds is not None:
            out["bounds"] = list(self.bounds)
        return out


def _check_support(x, marginal: MarginalDistribution, variable):
    lo, hi = marginal.support
    slack = _EDGE_RTOL * (hi - lo) if np.isfinite(hi - lo) else 0.0
    bad = ~((x >= lo - slack) & (x <= hi + slack))
    if marginal.kind is Kind.LOGNORMAL:
        bad |= ~(x > 0)
    if np.any(bad):
        where = int(np.flatnonzero(np.atleast_1d(bad))[0])
        value = np.atleast_1d(x)[where]
        raise DomainError(
            f"variable {variable}: value {value!r} outside support [{lo}, {hi}]",
            variable=variable,
            row=where,
        )


def to_standard(value, marginal: MarginalDistribution, variable: int = 0):
    """Map natural-unit values to the reference domain of the marginal's family.

    Uniform goes to [-1, 1]; Gaussian and lognormal go to a standard normal
    image via ``ndtri(F(value))``, with ``F`` the truncated CDF when bounded.
    Accepts scalars or arrays.
    """
    x = np.asarray(value, dtype=float)
    _check_support(x, marginal, variable)
    if marginal.kind is Kind.UNIFORM:
        a, b = marginal.params
        out = np.clip((2.0 * x - (a + b)) / (b - a), -1.0, 1.0)
        # pin the bounds exactly; the centered form can miss them by one ulp
        out = np.where(x == a, -1.0, np.where(x == b, 1.0, out))
    elif marginal.bounds is None:
        out = marginal._to_z(x)
    else:
        u = np.clip(marginal.cdf(x), _U_FLOOR, 1.0 - _U_FLOOR)
        out = ndtri(u)
    return float(out) if out.ndim == 0 else out


def from_unit(u, marginal: MarginalDistribution):
    """Inverse CDF: map probabilities in (0, 1) to natural units."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError(f"unit-hypercube coordinate outside (0, 1): {u[~((u > 0) & (u < 1))][:3]}")
    if marginal.kind is Kind.UNIFORM:
        a, b = marginal.params
        out = a + u * (b - a)
    elif marginal.bounds is None:
        out = marginal._from_z(ndtri(u))
    else:
        zl, zu = marginal._z_bounds()
        fl, fu = ndtr(zl), ndtr(zu)
        z = ndtri(fl + u * (fu - fl))
        out = marginal._from_z(z)
        out = np.clip(out, *marginal.bounds)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class InputSpace:
    """Ordered, mutually independent input marginals."""

    marginals: tuple[MarginalDistribution, ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if not self.marginals:
            raise ConfigError("an input space needs at least one marginal")
        names = tuple(self.names) or tuple(f"x{i + 1}" for i in range(len(self.marginals)))
        if len(names) != len(self.marginals):
            raise ConfigError("names and marginals differ in length")
        object.__setattr__(self, "names", names)

    @property
    def dimension(self) -> int:
        return len(self.marginals)

    @property
    def families(self) -> tuple[Family, ...]:
        return tuple(m.family for m in self.marginals)

    def standardize(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dimension:
            raise DomainError(f"expected {self.dimension} input columns, got {x.shape[1]}")
        out = np.empty_like(x)
        for i, m in enumerate(self.marginals):
            out[:, i] = to_standard(x[:, i], m, variable=i)
        return out

    def from_unit(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return np.column_stack([from_unit(u[:, i], m) for i, m in enumerate(self.marginals)])

    def to_list(self):
        return [m.to_dict(name) for name, m in zip(self.names, self.marginals)]

    @classmethod
    def from_list(cls, records: Sequence[dict]) -> "InputSpace":
        """Build from ``[{name, kind, params, bounds?}, ...]`` records."""
        try:
            marginals = [
                MarginalDistribution(r["kind"], tuple(r["params"]), tuple(r["bounds"]) if r.get("bounds") else None)
                for r in records
            ]
            names = [r.get("name", f"x{i + 1}") for i, r in enumerate(records)]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad input-space record: {exc}") from exc
        return cls(tuple(marginals), tuple(names))


@dataclass(frozen=True)
class DesignMatrixSample:
    natural: np.ndarray
    standardized: np.ndarray


def lhs_unit(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random Latin hypercube in (0, 1)^d: one point per stratum per column."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.empty((n, d))
    for j in range(d):
        u[:, j] = (rng.permutation(n) + rng.random(n)) / n
    # rng.random may return exactly 0.0
    return np.clip(u, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def make_rng(seed: int) -> np.random.Generator:
    """The generator used everywhere (PCG64, 128-bit state)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


RNG_NAME = "numpy.PCG64"


def lhs_sample(n: int, space: InputSpace, seed: int) -> DesignMatrixSample:
    u = lhs_unit(n, space.dimension, make_rng(seed))
    natural = space.from_unit(u)
    return DesignMatrixSample(natural=natural, standardized=space.standardize(natural))
