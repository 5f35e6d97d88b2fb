import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from meshtrap.specfn import DomainError, erf, erfc, erfinv, norm_cdf, norm_pdf

mpmath.mp.dps = 50


def series_erf(x: float) -> float:
    """Maclaurin series below 3, Lentz continued fraction for erfc above."""
    x = mpmath.mpf(x)
    ax = abs(x)
    if ax < 3:
        total, term = mpmath.mpf(0), ax
        for n in range(120):
            total += term / (2 * n + 1)
            term *= -ax * ax / (n + 1)
        val = 2 / mpmath.sqrt(mpmath.pi) * total
    else:
        # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        tiny = mpmath.mpf("1e-80")
        f = ax
        c, d = f, mpmath.mpf(0)
        for j in range(1, 400):
            a = mpmath.mpf(j) / 2
            d = ax + a * d
            d = 1 / (d if d != 0 else tiny)
            c = ax + a / c
            delta = c * d
            f *= delta
            if abs(delta - 1) < mpmath.mpf("1e-45"):
                break
        val = 1 - mpmath.exp(-ax * ax) / mpmath.sqrt(mpmath.pi) / f
    return float(val if x >= 0 else -val)


def test_erf_zero_and_saturation():
    assert erf(0.0) == 0.0
    assert abs(erf(6.0) - 1.0) <= 1e-15


def test_erf_matches_series_oracle():
    assert abs(erf(0.5) - series_erf(0.5)) <= 1e-14
    for x in np.linspace(-6, 6, 241):
        assert abs(erf(x) - series_erf(x)) <= 1e-14


def test_series_oracle_sanity():
    assert series_erf(0.5) == pytest.approx(float(mpmath.erf(0.5)), abs=1e-16)
    assert series_erf(4.0) == pytest.approx(float(mpmath.erf(4.0)), abs=1e-16)


@given(st.floats(-30, 30))
def test_erf_odd_and_bounded(x):
    assert erf(-x) == -erf(x)
    assert -1.0 <= erf(x) <= 1.0


def test_erfc_and_normal():
    assert erfc(0.0) == 1.0
    assert norm_cdf(0.0) == 0.5
    assert norm_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert norm_cdf(1.0) == pytest.approx(float(mpmath.ncdf(1.0)), abs=1e-15)


def test_erfinv_examples():
    assert erfinv(0.0) == 0.0
    assert erf(erfinv(erf(1.0))) == pytest.approx(erf(1.0), rel=1e-15)
    assert erfinv(erf(1.0)) == pytest.approx(1.0, abs=1e-10)
    y = 0.999999
    x = erfinv(y)
    assert math.isfinite(x)
    assert abs(erf(x) - y) <= 1e-9


@pytest.mark.parametrize("y", [1.0, -1.0, 1.5, float("nan")])
def test_erfinv_domain(y):
    with pytest.raises(DomainError):
        erfinv(y)


def test_erfinv_matches_mpmath():
    for y in [1e-300, 1e-8, 0.1, 0.5, 0.9, 0.999, 1 - 1e-9, 1 - 1e-15]:
        assert erfinv(y) == pytest.approx(float(mpmath.erfinv(y)), rel=1e-14)


def test_forward_round_trip_relative():
    ys = np.linspace(-1 + 1e-9, 1 - 1e-9, 20001)
    for y in ys:
        assert abs(erf(erfinv(y)) - y) <= 1e-12 * max(abs(y), 1e-300) + 1e-300


def _conditioning_floor(x: float) -> float:
    """Error in x implied by rounding erf(x) to a double."""
    y = erf(x)
    return math.ulp(y) / (2 / math.sqrt(math.pi) * math.exp(-x * x))


def test_inverse_round_trip_on_grid():
    xs = np.linspace(-5, 5, 10_001)
    for x in xs:
        tol = 1e-10 * max(1.0, abs(x)) + _conditioning_floor(x)
        assert abs(erfinv(erf(x)) - x) <= tol


def test_inverse_round_trip_well_conditioned_range():
    for x in np.linspace(-3.5, 3.5, 7001):
        assert abs(erfinv(erf(x)) - x) <= 1e-10 * max(1.0, abs(x))


@pytest.mark.xfail(strict=True, reason="erf(x) rounds to 1 - O(1e-12) for |x| near 5; float64 cannot "
                                       "resolve x to 1e-10 there regardless of the inverse")
def test_inverse_round_trip_literal_full_range():
    xs = np.linspace(-5, 5, 10_001)
    err = max(abs(erfinv(erf(x)) - x) / max(1.0, abs(x)) for x in xs)
    assert err <= 1e-10


def test_monotone():
    xs = np.linspace(-6, 6, 5001)
    e = [erf(x) for x in xs]
    assert all(b >= a for a, b in zip(e, e[1:]))
    assert all(b > a for a, b in zip(e[:2000], e[1:2001]) if abs(a) < 0.999)
    ys = np.linspace(-1 + 1e-9, 1 - 1e-9, 5001)
    v = [erfinv(y) for y in ys]
    assert all(b > a for a, b in zip(v, v[1:]))


@given(st.floats(-1, 1, exclude_min=True, exclude_max=True))
def test_erfinv_odd_bit_exact(y):
    assert erfinv(-y) == -erfinv(y)
