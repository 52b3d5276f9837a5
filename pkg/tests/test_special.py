import math

import numpy as np
import pytest

from artifact import special
from artifact.errors import DomainError


def test_phi_values():
    assert special.Phi(0) == 0.5
    assert np.isclose(special.Phi(1), 0.841345, atol=1e-6)
    assert np.isclose(special.Phi_inv(0.841345), 1.0, atol=1e-5)
    assert np.isclose(special.Phi_inv(special.Phi(1.0)), 1.0, atol=1e-9)
    assert np.isclose(special.phi(0), 1 / math.sqrt(2 * math.pi))


def test_quantile_domain():
    with pytest.raises(DomainError):
        special.Phi_inv(0.0)
    with pytest.raises(DomainError):
        special.Phi_inv(1.0)


def test_std_normal_record():
    r = special.std_normal(1.0)
    assert np.isclose(r.cdf, 0.841345, atol=1e-6)
    assert np.isclose(r.pdf, 0.241971, atol=1e-6)
    assert np.isclose(r.quantile_inverse(r.cdf), 1.0)


def test_normal_integrals():
    # d/dx of the integrated cdf is the cdf itself
    x, h = 0.7, 1e-5
    der = (special.Phi_integral(x + h) - special.Phi_integral(x - h)) / (2 * h)
    assert np.isclose(der, special.Phi(x), atol=1e-8)
    assert np.isclose(special.Phi_tail_integral(0.0), special.phi(0.0))


def test_gamma_fns():
    g = special.gamma_fns(1.5)
    assert np.isclose(math.exp(g.log_gamma), 0.886227, atol=1e-6)
    assert special.gamma_fns(5).gamma_ratio(1) == 5
    r = special.gamma_fns(1.0).gamma_ratio(-0.5)
    assert np.isclose(r, 1.772454, atol=1e-6) and r < 1.7725
    with pytest.raises(DomainError):
        special.gamma_fns(0)


def test_wendel():
    b = special.wendel_bounds(1, 1)
    assert (b.lower, b.upper) == (1.0, 1.0)
    assert np.isclose(special.wendel_ratio(1, 1), 1.0)
    b = special.wendel_bounds(0.5, 0.5)
    r = special.wendel_ratio(0.5, 0.5)
    assert np.isclose(b.lower, 0.70711, atol=1e-5)
    assert np.isclose(r, 0.79788, atol=1e-5)
    assert b.lower <= r <= b.upper
    with pytest.raises(DomainError):
        special.wendel_bounds(1.0, 1.5)


def test_bessel_i0():
    assert special.bessel_i0(0) == 1.0
    assert np.isclose(special.bessel_i0(1.0), 1.266066, atol=1e-6)
    assert np.isclose(special.bessel_i0(3.0), 4.880793, atol=1e-6)


def test_extremal_shift():
    assert special.normal_extremal_distance("shift", 0).exact == 0
    e = special.normal_extremal_distance("shift", 2)
    assert np.isclose(e.exact, 0.682689, atol=1e-6)
    assert np.isclose(e.bounds[0], 0.797885, atol=1e-6)


def test_extremal_scale_matches_grid():
    e = special.normal_extremal_distance("scale", 2)
    x = np.linspace(0, 5, 200001)
    grid = np.abs(special.Phi(2 * x) - special.Phi(x)).max()
    assert np.isclose(e.exact, grid, atol=1e-9)
    assert np.isclose(e.exact, 0.161337, atol=1e-6)
    assert e.exact <= min(e.bounds)
    assert np.isclose(e.bounds[0], 0.469718, atol=1e-6)
    assert np.isclose(e.bounds[1], 0.241971, atol=1e-6)
    with pytest.raises(DomainError):
        special.normal_extremal_distance("scale", 0)
