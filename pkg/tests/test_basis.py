import math
from itertools import product

import numpy as np
import pytest
from numpy.polynomial import hermite_e, legendre

from sparsepce.basis import (
    BasisSpec,
    DesignCache,
    cardinality,
    design_matrix,
    enumerate_total_degree,
    eval_univariate,
)
from sparsepce.errors import DomainError, SizeError
from sparsepce.input_model import Family

LEG, HER = Family.LEGENDRE, Family.HERMITE


@pytest.mark.parametrize("d,p,expected", [(6, 9, 5005), (6, 10, 8008), (4, 8, 495), (4, 10, 1001), (2, 6, 28), (2, 10, 66)])
def test_known_cardinalities(d, p, expected):
    assert len(enumerate_total_degree(d, p)) == expected


def test_constant_only():
    assert enumerate_total_degree(3, 0).tolist() == [[0, 0, 0]]


def test_cardinality_grid():
    for d in range(1, 11):
        for p in range(0, 13):
            if math.comb(p + d, d) > 200_000:
                continue
            idx = enumerate_total_degree(d, p)
            assert idx.shape == (math.comb(p + d, d), d)
            assert cardinality(d, p) == idx.shape[0]


def test_enumeration_matches_brute_force():
    d, p = 3, 5
    brute = {a for a in product(range(p + 1), repeat=d) if sum(a) <= p}
    got = [tuple(r) for r in enumerate_total_degree(d, p)]
    assert len(set(got)) == len(got)
    assert set(got) == brute
    # ascending degree, descending lexicographic within each degree
    assert got == sorted(got, key=lambda a: (sum(a), tuple(-v for v in a)))


def test_enumeration_prefix_property():
    small, big = enumerate_total_degree(4, 3), enumerate_total_degree(4, 4)
    np.testing.assert_array_equal(big[: len(small)], small)
    assert enumerate_total_degree(2, 2).tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


def test_enumeration_read_only_and_errors():
    idx = enumerate_total_degree(2, 3)
    with pytest.raises(ValueError):
        idx[0, 0] = 1
    with pytest.raises(SizeError):
        enumerate_total_degree(40, 12)
    with pytest.raises(ValueError):
        enumerate_total_degree(0, 2)


def test_univariate_examples():
    assert eval_univariate(LEG, 0, 0.37) == 1.0
    assert eval_univariate(HER, 0, -5.0) == 1.0
    assert eval_univariate(LEG, 1, 1.0) == pytest.approx(math.sqrt(3), rel=1e-14)
    assert eval_univariate(HER, 2, 0.0) == pytest.approx(-1 / math.sqrt(2), rel=1e-14)
    with pytest.raises(DomainError):
        eval_univariate(LEG, 2, 1.5)
    with pytest.raises(DomainError):
        eval_univariate(HER, 2, np.inf)


def _legendre_closed(k, x):
    forms = [
        lambda t: 1.0,
        lambda t: t,
        lambda t: (3 * t**2 - 1) / 2,
        lambda t: (5 * t**3 - 3 * t) / 2,
        lambda t: (35 * t**4 - 30 * t**2 + 3) / 8,
    ]
    return math.sqrt(2 * k + 1) * forms[k](x)


def _hermite_closed(k, x):
    forms = [lambda t: 1.0, lambda t: t, lambda t: t**2 - 1, lambda t: t**3 - 3 * t, lambda t: t**4 - 6 * t**2 + 3]
    return forms[k](x) / math.sqrt(math.factorial(k))


@pytest.mark.parametrize("k", range(5))
def test_recurrence_matches_closed_forms(k):
    xs = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(eval_univariate(LEG, k, xs), [_legendre_closed(k, x) for x in xs], atol=1e-12)
    xs = np.linspace(-4, 4, 41)
    np.testing.assert_allclose(eval_univariate(HER, k, xs), [_hermite_closed(k, x) for x in xs], atol=1e-12, rtol=1e-12)


def test_legendre_quadrature_orthonormality():
    nodes, weights = legendre.leggauss(40)
    weights = weights / 2.0  # uniform density on [-1, 1]
    vals = np.array([eval_univariate(LEG, k, nodes) for k in range(13)])
    gram = (vals * weights) @ vals.T
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-10)


def test_hermite_quadrature_orthonormality():
    nodes, weights = hermite_e.hermegauss(40)
    weights = weights / math.sqrt(2 * math.pi)
    vals = np.array([eval_univariate(HER, k, nodes) for k in range(13)])
    gram = (vals * weights) @ vals.T
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-10)


def test_degree_two_at_origin():
    spec = BasisSpec((LEG,) * 3, [[2, 0, 0]])
    assert design_matrix(np.zeros((1, 3)), spec)[0, 0] == pytest.approx(-math.sqrt(5) / 2, rel=1e-14)
    # same value from a quadrature-normalized recurrence: P2(0) = -1/2, ||P2||^2 = 1/5
    nodes, weights = legendre.leggauss(10)
    p2 = legendre.legval(nodes, [0, 0, 1])
    norm = math.sqrt(np.sum(weights / 2 * p2**2))
    assert design_matrix(np.zeros((1, 3)), spec)[0, 0] == pytest.approx(-0.5 / norm, rel=1e-13)


def test_design_matrix_entries_are_products(rng):
    z = np.column_stack([rng.uniform(-1, 1, 30), rng.normal(size=30)])
    spec = BasisSpec((LEG, HER), enumerate_total_degree(2, 4))
    psi = design_matrix(z, spec)
    assert psi.shape == (30, 15)
    np.testing.assert_array_equal(psi[:, 0], 1.0)
    for j, (a, b) in enumerate(spec.indices):
        np.testing.assert_allclose(psi[:, j], eval_univariate(LEG, a, z[:, 0]) * eval_univariate(HER, b, z[:, 1]), rtol=1e-14)


def test_monte_carlo_orthonormality(rng):
    n = 200_000
    z = rng.uniform(-1, 1, size=(n, 3))
    psi = design_matrix(z, BasisSpec((LEG,) * 3, enumerate_total_degree(3, 2)))
    gram = psi.T @ psi / n
    # O(N^-1/2) tolerance, with head room for the degree-2 fourth moments
    assert np.max(np.abs(gram - np.eye(psi.shape[1]))) < 10 / math.sqrt(n)


def test_design_matrix_row_permutation(rng):
    z = rng.uniform(-1, 1, size=(25, 3))
    spec = BasisSpec((LEG,) * 3, enumerate_total_degree(3, 3))
    perm = rng.permutation(25)
    np.testing.assert_array_equal(design_matrix(z, spec)[perm], design_matrix(z[perm], spec))
    np.testing.assert_array_equal(design_matrix(z, spec), design_matrix(z, spec))


def test_design_matrix_domain_error():
    spec = BasisSpec((LEG, LEG), enumerate_total_degree(2, 2))
    z = np.zeros((4, 2))
    z[2, 1] = 1.5
    with pytest.raises(DomainError) as info:
        design_matrix(z, spec)
    assert (info.value.row, info.value.variable) == (2, 1)
    with pytest.raises(DomainError):
        design_matrix(np.zeros((4, 3)), spec)


def test_design_cache_matches_direct(rng):
    z = np.column_stack([rng.uniform(-1, 1, 20), rng.normal(size=20), rng.uniform(-1, 1, 20)])
    fams = (LEG, HER, LEG)
    cache = DesignCache(z, fams, 5)
    for p in (3, 1, 5, 0):
        np.testing.assert_array_equal(cache.matrix(p), design_matrix(z, BasisSpec(fams, enumerate_total_degree(3, p))))
    with pytest.raises(ValueError):
        cache.matrix(6)
