import math

import numpy as np
import pytest

from artifact import bounds_rs as br
from artifact import lattice, tables
from artifact.errors import DomainError

STD = br.SummandMoments(0.0, 1.0, 1.0)


def test_coupling_tv():
    assert np.isclose(br.poisson_coupling_tv([0.1, 0.2]), 0.05)
    assert np.isclose(br.poisson_coupling_tv([0.05] * 40), 2.0 ** 2 / 40)
    with pytest.raises(DomainError):
        br.poisson_coupling_tv([])


def test_pb_sum_example():
    pb = br.PBParams.from_summary(100.0, 0.1)
    r = br.pb_sum_bound(pb, STD)
    assert np.isclose(r.value, min(0.5583, 0.3057 + math.sqrt(0.1)) / 10)
    assert np.isclose(r.value, 0.05583)


def test_pb_sum_needs_theta_below_one():
    pb = br.PBParams.from_p([1.0, 1.0])
    with pytest.raises(DomainError):
        br.pb_sum_bound(pb, br.SummandMoments(0.5, 1.0, 1.0))


def test_pb_sum_dominates_compound_oracle():
    p = [0.3] * 6
    N = lattice.poisson_binomial(p)
    S = lattice.compound(N, lattice.symmetric_pm1())
    exact = lattice.kolmogorov_distance(S.standardized())
    assert br.pb_sum_bound(br.PBParams.from_p(p), STD).value >= exact


def test_pb_sum_limit_is_poisson():
    lam = 5.0
    m = br.SummandMoments(0.0, 1.0, 1.0, 0.5)
    target = br.poisson_sum_bound(lam, m).value
    gaps = [br.pb_sum_bound(br.PBParams.from_p([lam / n] * n), m).value - target
            for n in (100, 1000, 10000)]
    assert all(g >= 0 for g in gaps)
    assert gaps[0] > gaps[1] > gaps[2]
    # the gap shrinks like theta^(delta/2) = (lam/n)^(1/4)
    assert gaps[2] < 0.35 * gaps[0]


def test_poisson_sum():
    r = br.poisson_sum_bound(100.0, STD)
    assert np.isclose(r.value, 0.03031)
    assert r.constant_used == ("M(1)", 0.3031)


def test_poisson_sum_lower():
    v = br.poisson_sum_lower(1.0, 1.0)
    assert np.isclose(v.value, 0.232880, atol=1e-6)
    assert v.value > 81 / (128 * math.e)
    best = br.poisson_sum_lower(1.0)
    assert np.isclose(best.value, 0.234411, atol=1e-6)
    assert np.isclose(br.poisson_sum_lower(1e-8).value, 0.5, atol=1e-4)
    with pytest.raises(DomainError):
        br.poisson_sum_lower(1.0, 0.0)


def test_sandwich():
    for key in ("1", "0.9", "0.8", "0.7", "0.6", "0.5", "0.4", "0.3", "0.2", "0.1"):
        assert br.poisson_sum_lower(float(key)).value < tables.M(key)


def test_mixed_poisson():
    assert np.isclose(br.mixed_poisson_bound(STD, 0.1).value, 0.03031)
    assert np.isclose(br.mixed_poisson_bound(STD, 0.1, 0.0).value,
                      br.mixed_poisson_bound(STD, 0.1).value)
    mom = br.inverse_gamma_moment(3.0, 50.0, 1.0)
    assert mom.exact <= mom.upper <= (3.0 / 50.0) ** 0.5 + 1e-15


def test_student_limit():
    c = br.student_limit_bounds(1, 1, STD).value
    assert np.isclose(c, 0.3031 * math.sqrt(2 / math.pi))
    assert c < 0.2419
    v = br.student_limit_bounds(100, 1e6, STD, "optimal_r").value
    assert np.isclose(v, (0.3031 + br.PINELIS_A) / 100)
    assert np.isclose(v, 0.004614, atol=2e-6)
    assert np.isclose(br.PINELIS_A, 0.158230, atol=1e-6)


def test_nb_limit():
    lap = br.nb_limit_bounds(1, 0.5, STD, "laplace").value
    assert np.isclose(lap, 0.53723, atol=1e-5) and lap < 0.5373
    v = br.nb_limit_bounds(4, 0.2, STD).value
    ratio = math.gamma(3.5) / math.gamma(4)
    assert np.isclose(ratio, 0.553892, atol=1e-6)
    assert np.isclose(v, 0.3031 * ratio * 0.5)
    assert np.isclose(v, 0.083942, atol=1e-6)
    with pytest.raises(DomainError):
        br.nb_limit_bounds(0.4, 0.2, STD)


def test_A_r():
    assert br.A_r(1) == 0.8593
    assert np.isclose(br.A_r(3), 0.159155, atol=1e-6)


def test_bdnc_reduces_to_poisson():
    m = br.SummandMoments(0.3, 1.2, 2.0)
    y = br.IndexMoments(1.0, EY2=1.0, EY_half=1.0, EY_full=1.0)
    assert br.bdnc_sum_bound(7.0, y, m).value == br.poisson_sum_bound(7.0, m).value


def test_bdnc_centered():
    y = br.IndexMoments(1.0, EY_half=1.0)
    assert np.isclose(br.bdnc_sum_bound(1.0, y, STD, "centered").value, 1.5155)
    with pytest.raises(DomainError):
        br.bdnc_sum_bound(1.0, br.IndexMoments(1.0), STD, "centered")


def test_nb_index_corollary():
    r, p = 3.0, 0.4
    nb = br.nb_index_moments(r, p)
    y = br.IndexMoments(nb.EY, EY_half=nb.EY_half_upper)
    v = br.bdnc_sum_bound(nb.lam, y, STD, "centered").value
    assert np.isclose(v, 1.5155 / math.sqrt(r * (1 - p)))


def test_nb_index_moments():
    nb = br.nb_index_moments(1.0, 0.5)
    assert np.isclose(nb.EY, 1.442695, atol=1e-6)
    assert np.isclose(nb.EY, lattice.logarithmic(0.5).mean, atol=1e-10)
    assert np.isclose(nb.ratio_upper, 1.177, atol=1e-3)


def test_insurance_example():
    ins = br.insurance_tail_estimate(365, 2.0, 1.0, 12.0, lambda k: 2.0 ** -k, 1600.0)
    assert np.isclose(ins.estimate, 0.0753, atol=5e-4)
    assert np.isclose(ins.error_bound, 0.0373, atol=5e-4)
    assert ins.ceiling <= 0.1128
    half = br.insurance_tail_estimate(365, 2.0, 1.0, 12.0, lambda k: 2.0 ** -k, ins.mean)
    assert np.isclose(half.estimate, 0.5)


def test_insurance_divergent_rates():
    with pytest.raises(DomainError):
        br.insurance_tail_estimate(1, 1.0, 1.0, 12.0, lambda k: 1.0, 10.0)
