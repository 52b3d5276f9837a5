import math

import numpy as np
import pytest

from artifact import lattice
from artifact.errors import DomainError, StructuralError


def test_symmetric_pm1():
    d = lattice.symmetric_pm1()
    assert d.offset == -1 and d.step == 2
    assert np.allclose(d.weights, [0.5, 0.5])
    t = lattice.two_point_standardized(0.5)
    assert lattice.kolmogorov_distance(d, t) < 1e-15


def test_logarithmic_mean():
    d = lattice.logarithmic(0.5, 1e-12)
    assert np.isclose(d.mean, 1.442695, atol=1e-6)
    assert np.isclose(d.mean, 0.5 / (0.5 * math.log(2)), atol=1e-10)


def test_moments():
    assert np.isclose(lattice.moment(lattice.symmetric_pm1(), 3), 1.0)
    assert np.isclose(lattice.moment(lattice.binomial(3, 0.4), 0), 1.0)
    assert np.isclose(lattice.moment(lattice.poisson(2), 2, "raw"), 6.0)
    with pytest.raises(DomainError):
        lattice.moment(lattice.poisson(2), 2.5, "raw")


def test_parameter_checks():
    for bad in (lambda: lattice.bernoulli(1.5), lambda: lattice.poisson(0),
                lambda: lattice.negative_binomial(0, 0.5)):
        with pytest.raises(DomainError):
            bad()


def test_self_convolve():
    d = lattice.self_convolve(lattice.symmetric_pm1(), 2)
    x, w = d.atoms()
    assert np.allclose(x, [-2, 0, 2])
    assert np.allclose(w, [0.25, 0.5, 0.25])


def test_incommensurable():
    a = lattice.LatticeDist(0.0, 1.0, [0.5, 0.5])
    b = lattice.LatticeDist(0.0, math.sqrt(2), [0.5, 0.5])
    with pytest.raises(StructuralError):
        lattice.convolve(a, b)


def test_compound_identity():
    po = lattice.poisson(1.0)
    c = lattice.compound(po, lattice.point_mass(1.0))
    assert lattice.tv_distance(c, po) < 1e-12
    with pytest.raises(DomainError):
        lattice.compound(lattice.symmetric_pm1(), po)


def test_multiple_poisson_is_compound():
    # sum of k * Pois(2^-k), k >= 1, equals compound Poisson with geometric Y
    eps = 1e-13
    total = lattice.point_mass(0.0)
    lam = 0.0
    for k in range(1, 40):
        rate = 2.0 ** -k
        lam += rate
        xi = lattice.poisson(rate, eps)
        total = lattice.convolve(total, xi.affine(0.0, k))
    py = np.array([2.0 ** -k for k in range(1, 40)]) / lam
    Y = lattice.LatticeDist(1.0, 1.0, py)
    c = lattice.compound(lattice.poisson(lam, eps), Y)
    assert lattice.tv_distance(total, c) < 1e-9


def test_kolmogorov_small_n():
    d1 = lattice.self_convolve(lattice.symmetric_pm1(), 1).standardized()
    assert np.isclose(lattice.kolmogorov_distance(d1), 0.341345, atol=1e-6)
    d2 = lattice.self_convolve(lattice.symmetric_pm1(), 2).standardized()
    assert np.isclose(lattice.kolmogorov_distance(d2), 0.25)
    assert lattice.kolmogorov_distance(d2, d2) == 0


def test_tv_pb_poisson():
    pb = lattice.poisson_binomial([0.1, 0.2])
    po = lattice.poisson(0.3, 1e-15)
    tv = lattice.tv_distance(pb, po)
    assert np.isclose(tv, 0.0377545338, atol=1e-9)
    assert tv <= 0.05
    assert lattice.tv_distance(pb, pb) == 0


def test_zeta1():
    assert np.isclose(lattice.zeta1_distance(lattice.point_mass(0.0)), 0.797885, atol=1e-6)
    assert np.isclose(lattice.zeta1_distance(lattice.symmetric_pm1()), 0.535377, atol=1e-6)


def test_lindeberg_fractions():
    n = 9
    f = lattice.lindeberg_osipov_fractions([lattice.symmetric_pm1()] * n, 100.0)
    assert np.isclose(f[0], 0.0)
    assert np.isclose(f[1], n ** -0.5)


def test_decompose_poisson():
    r = lattice.bdnc_decompose(lattice.poisson(2.5))
    assert np.isclose(r.lambda_, 2.5)
    x, w = r.y_dist.atoms()
    assert np.isclose(w[x == 1][0], 1.0, atol=1e-10)


def test_decompose_negative_binomial():
    r = lattice.bdnc_decompose(lattice.negative_binomial(2, 0.5))
    assert np.isclose(r.lambda_, 2 * math.log(2))
    x, w = r.y_dist.atoms()
    k = x[:10]
    assert np.allclose(w[:10], 0.5 ** k / (k * math.log(2)), atol=1e-10)
    assert r.is_bdnc


def test_decompose_binomial_flagged():
    r = lattice.bdnc_decompose(lattice.binomial(2, 0.5))
    assert not r.is_bdnc
    assert r.min_gamma < 0


def test_decompose_needs_mass_at_zero():
    with pytest.raises(DomainError):
        lattice.bdnc_decompose(lattice.point_mass(1.0))
