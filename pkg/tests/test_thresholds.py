import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshtrap.specfn import DomainError
from meshtrap.thresholds import (EpsilonSet, HypothesisNotMet, ThresholdPoint, alpha_lower_bound,
                                 alpha_upper_bound, escape_prob_lower_bound, fundamental_lhs,
                                 theta_hat_lower, theta_hat_upper, threshold_curve, trapped_condition,
                                 weak_threshold)

from oracles import alpha_upper_formula, grid_root, series_erfinv

# rightmost sign change of the characterization equation on a 10^6-point grid (scipy erfinv)
ALPHA_W = {0.05: 0.20389985633021093, 0.1: 0.3287935054536429,
           0.2: 0.5111296103731118, 0.3: 0.6455722919971363}
ZERO = EpsilonSet()


def test_lhs_at_theta_one():
    assert fundamental_lhs(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) / 2, abs=1e-15)
    assert fundamental_lhs(0.5, 1.0) == pytest.approx(0.39894, abs=1e-5)


def test_lhs_against_series_assembly():
    t = series_erfinv(0.1)
    expected = math.sqrt(2 / math.pi) * math.exp(-t * t) / 0.9 - math.sqrt(2) * t
    assert fundamental_lhs(0.0, 0.9) == pytest.approx(expected, abs=1e-12)
    assert fundamental_lhs(0.0, 0.9) == pytest.approx(0.7539050497840742, abs=1e-13)


def test_lhs_sign_change():
    th = np.linspace(0.1 + 1e-6, 1.0, 2001)
    v = np.array([fundamental_lhs(0.1, t) for t in th])
    assert v[0] < 0 < v[-1]


@pytest.mark.parametrize("beta, theta", [(0.3, 0.3), (0.3, 0.2), (0.2, 1.1)])
def test_lhs_domain(beta, theta):
    with pytest.raises(DomainError):
        fundamental_lhs(beta, theta)


@pytest.mark.parametrize("beta", sorted(ALPHA_W))
def test_weak_threshold_matches_grid_oracle(beta):
    tp = weak_threshold(beta)
    assert isinstance(tp, ThresholdPoint)
    assert tp.alpha_w == pytest.approx(ALPHA_W[beta], abs=1e-9)
    assert tp.residual <= 1e-10
    assert tp.sign_changes == 1


def test_small_beta_limit():
    assert weak_threshold(1e-6).alpha_w < 0.01


def test_monotone():
    assert weak_threshold(0.1).alpha_w < weak_threshold(0.3).alpha_w
    pts = threshold_curve(list(np.linspace(0.02, 0.9, 30)))
    a = [p.alpha_w for p in pts]
    assert all(y > x for x, y in zip(a, a[1:]))


def test_threshold_curve_basic():
    assert threshold_curve([]) == []
    assert threshold_curve([0.2]) == [weak_threshold(0.2)]
    out = threshold_curve([0.2, 1.5, 0.3])
    assert isinstance(out[1], DomainError)
    assert out[2] == weak_threshold(0.3)


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.1, 2.0])
def test_weak_threshold_domain(beta):
    with pytest.raises(DomainError):
        weak_threshold(beta)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.9))
def test_threshold_invariants(beta):
    tp = weak_threshold(beta)
    assert beta < tp.alpha_w < 1
    assert tp.residual <= 1e-10


def test_theta_hat_collapse():
    for b in (0.05, 0.2, 0.4):
        a = weak_threshold(b).alpha_w
        assert theta_hat_lower(b, ZERO) == pytest.approx(a, abs=1e-9)
        assert theta_hat_upper(b, ZERO) == pytest.approx(a, abs=1e-9)


def test_theta_hat_lower_perturbed():
    expected, _ = grid_root(0.2, 0.99, 1.01)
    got = theta_hat_lower(0.2, EpsilonSet(eps1_c=0.01))
    assert abs(got - weak_threshold(0.2).alpha_w) <= 0.05
    assert got == pytest.approx(0.5198118037718664, abs=1e-9)
    assert got == pytest.approx(expected, abs=1e-9)


def test_theta_hat_lower_moves_monotonically():
    # oracle scan: the root increases with eps1_c
    oracle = [grid_root(0.2, 1 - e, 1 + e, points=10**5)[0] for e in (0.0, 0.005, 0.01, 0.02)]
    assert all(y > x for x, y in zip(oracle, oracle[1:]))
    got = [theta_hat_lower(0.2, EpsilonSet(eps1_c=e)) for e in (0.0, 0.005, 0.01, 0.02)]
    assert all(y > x for x, y in zip(got, got[1:]))
    np.testing.assert_allclose(got, oracle, atol=1e-8)


def test_alpha_bounds_collapse():
    a = weak_threshold(0.2).alpha_w
    assert alpha_lower_bound(0.2, ZERO) == pytest.approx(a, abs=1e-6)
    assert alpha_upper_bound(0.2, ZERO) == pytest.approx(a, abs=1e-6)


def test_alpha_lower_bound_range_and_boundary():
    for b in np.arange(0.05, 0.51, 0.05):
        v = alpha_lower_bound(b, EpsilonSet(eps1_c=0.01))
        assert 0 < v <= 1
    assert math.isfinite(alpha_lower_bound(0.999, ZERO))
    assert math.isfinite(alpha_lower_bound(0.999, EpsilonSet(eps1_c=0.001)))


def test_alpha_upper_explicit_factor():
    base = alpha_upper_bound(0.2, ZERO)
    assert alpha_upper_bound(0.2, EpsilonSet(eps1_m=0.01)) == pytest.approx(base / 1.01 ** 2, abs=1e-9)


def test_alpha_upper_against_oracle():
    eps = EpsilonSet(eps2_c=0.01, eps1_m=0.01, eps1_g=0.01, eps3_g=0.01)
    th, _ = grid_root(0.3, 1.01, 0.99)
    assert theta_hat_upper(0.3, eps) == pytest.approx(th, abs=1e-9)
    assert alpha_upper_bound(0.3, eps) == pytest.approx(alpha_upper_formula(0.3, th, 0.01, 0.01, 0.01), abs=1e-8)
    assert alpha_upper_bound(0.3, eps) == pytest.approx(0.6176915852761825, abs=1e-8)


def test_epsilon_convergence():
    """Both bounds approach alpha_w as eps -> 0; errors shrink until the round-off floor."""
    floor = 1e-11
    for b in (0.1, 0.2, 0.3):
        a = weak_threshold(b).alpha_w
        lo = [abs(alpha_lower_bound(b, EpsilonSet.uniform(10.0 ** -j)) - a) for j in range(2, 7)]
        hi = [abs(alpha_upper_bound(b, EpsilonSet.uniform(10.0 ** -j)) - a) for j in range(2, 7)]
        for errs in (lo, hi):
            assert errs[-1] <= 1e-5
            assert all(y < x or y < floor for x, y in zip(errs, errs[1:]))


def test_epsilon_set_validation():
    with pytest.raises(ValueError):
        EpsilonSet(eps1=-0.1)
    with pytest.raises(ValueError):
        EpsilonSet(eps2=0.5)
    with pytest.raises(ValueError):
        EpsilonSet.from_dict({"bogus": 0.1})
    assert EpsilonSet.from_dict({"eps1_c": 0.01}).eps1_c == 0.01


def test_escape_bound_examples():
    m = 400
    edge = math.sqrt(m) - 1 / (4 * math.sqrt(m))
    assert escape_prob_lower_bound(edge - 1e-9, m) == 0.0
    assert escape_prob_lower_bound(0.0, m) == pytest.approx(1 - 3.5 * math.exp(-(20 - 1 / 80) ** 2 / 18), abs=1e-15)
    assert escape_prob_lower_bound(0.0, m) == pytest.approx(1.0, abs=1e-9)
    # hand arithmetic: 1 - 3.5 exp(-(10 - 0.025 - 5)^2 / 18)
    assert escape_prob_lower_bound(5.0, 100) == pytest.approx(0.11509214118415023, abs=1e-14)
    assert escape_prob_lower_bound(5.0, 100, 2.5) == pytest.approx(1 - 2.5 * math.exp(-4.975 ** 2 / 18), abs=1e-14)


def test_escape_bound_hypothesis():
    with pytest.raises(HypothesisNotMet):
        escape_prob_lower_bound(10.0, 100)
    with pytest.raises(ValueError):
        escape_prob_lower_bound(1.0, 100, constant=3.0)


def test_trapped_condition():
    eps = EpsilonSet(eps1=0.05, eps2=0.05)
    assert trapped_condition(1.05 * 10 + 0.05 * 20 + 1e-9, 100, 400, eps)
    assert not trapped_condition(1.05 * 10 + 0.05 * 20 - 1e-9, 100, 400, eps)
