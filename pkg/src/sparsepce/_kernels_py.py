"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

LEGENDRE = 0
HERMITE = 1


def univariate_table(x, kmax, family):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((kmax + 1, x.shape[0]))
    out[0] = 1.0
    if kmax == 0:
        return out
    if family == LEGENDRE:
        out[1] = x / (1.0 / np.sqrt(3.0))
        for k in range(1, kmax):
            a_k = k / np.sqrt(4.0 * k * k - 1.0)
            a_k1 = (k + 1) / np.sqrt(4.0 * (k + 1) * (k + 1) - 1.0)
            out[k + 1] = (x * out[k] - a_k * out[k - 1]) / a_k1
    elif family == HERMITE:
        out[1] = x
        for k in range(1, kmax):
            out[k + 1] = (x * out[k] - np.sqrt(float(k)) * out[k - 1]) / np.sqrt(float(k + 1))
    else:
        raise ValueError(f"unknown polynomial family code {family}")
    return out


def tensor_design(tables, alphas):
    """Return the (P, N) C-ordered product matrix; callers transpose."""
    d = tables.shape[0]
    out = np.ones((alphas.shape[0], tables.shape[2]))
    for i in range(d):
        out *= tables[i][alphas[:, i]]
    return out


def lars_step(c, a, big_c, big_a, candidate, tiny):
    with np.errstate(divide="ignore", invalid="ignore"):
        g1 = (big_c - c) / (big_a - a)
        g2 = (big_c + c) / (big_a + a)
    g1[~(g1 > tiny) | ~np.isfinite(g1)] = np.inf
    g2[~(g2 > tiny) | ~np.isfinite(g2)] = np.inf
    g = np.minimum(g1, g2)
    g[~candidate.astype(bool)] = np.inf
    best = int(np.argmin(g))
    if not np.isfinite(g[best]):
        return np.inf, -1
    return float(g[best]), best
