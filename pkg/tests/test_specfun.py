import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruelle_kit.errors import DomainError
from ruelle_kit.specfun import (
    SeriesBudget,
    beta_moment,
    gamma_reflect,
    hurwitz_zeta,
    hurwitz_zeta_array,
    hurwitz_zeta_series,
    lerch_exp,
    lerch_exp_series,
    polylog,
    polylog_exp,
    polylog_exp_series,
    zeta,
    zeta_prime,
    zeta_series,
)

mpmath = pytest.importorskip("mpmath")
mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("s", [1.0001, 1.1, 1.5, 2.0, 2.5, 3.0, 3.5, 7.0, 20.0])
def test_zeta_against_mpmath(s):
    assert rel(zeta(s), float(mpmath.zeta(s))) < 1e-14


@pytest.mark.parametrize("s", [0.5, -1.5, -3.3])
def test_continuation_used_by_small_mu_expansion(s):
    from ruelle_kit.specfun import _zeta_any

    sv = _zeta_any(s)
    ref = float(mpmath.zeta(s))
    assert rel(sv.value, ref) < 1e-13
    assert abs(sv.value - ref) <= sv.bound + 1e-300


def test_zeta_near_pole_is_large():
    assert zeta(1.0001) > 1e3


def test_zeta_prime_examples():
    assert zeta_prime(2.0) == pytest.approx(-0.9375482543158437, rel=1e-14)
    assert zeta_prime(2.5) < 0
    h = 1e-6
    assert zeta_prime(2.0) == pytest.approx((zeta(2 + h) - zeta(2 - h)) / (2 * h), abs=1e-6)


def test_polylog_examples():
    assert polylog(1.0, 0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert polylog(2.0, 1.0) == zeta(2.0)
    n = np.arange(1, 10**5 + 1, dtype=float)
    assert polylog(3.0, 0.7) == pytest.approx(math.fsum(0.7**n / n**3), abs=1e-12)


def test_polylog_domain():
    from ruelle_kit.errors import DivergenceError

    with pytest.raises(DivergenceError):
        polylog(1.0, 1.0)
    for x in (0.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            polylog(2.0, x)


def test_zeta_three_against_direct_sum():
    n = np.arange(1, 10**7 + 1, dtype=float)
    direct = math.fsum(n**-3.0)
    tail = 1.0 / (2 * 1e14)  # integral bound N^{1-s}/(s-1)
    assert abs(zeta(3.0) - direct) <= tail + 1e-12


def test_beta_moment_quadrature():
    from scipy.integrate import quad

    ref, _ = quad(lambda x: x**2.5 * (1 - x) ** 3, 0, 1, epsabs=1e-14)
    assert beta_moment(2.5, 3.0) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("s", [1.5, 2.0, 2.8, 3.5, 6.0])
def test_zeta_prime_against_mpmath(s):
    assert rel(zeta_prime(s), float(mpmath.zeta(s, 1, 1))) < 1e-13


def test_known_values():
    assert zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert zeta(4.0) == pytest.approx(math.pi**4 / 90, rel=1e-15)
    assert polylog(2.0, 0.5) == pytest.approx(math.pi**2 / 12 - math.log(2) ** 2 / 2, rel=1e-15)
    assert gamma_reflect(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-15)


def test_zeta_pole():
    with pytest.raises(DomainError):
        zeta(1.0)


def test_gamma_reflect_poles():
    for s in (0.0, -1.0, -4.0):
        with pytest.raises(DomainError):
            gamma_reflect(s)


@pytest.mark.parametrize("s,mu", [(2.0, 1e-3), (2.5, 0.01), (3.5, 1e-6), (1.5, 0.3), (2.0 + 1e-11, 1e-4),
                                  (3.0, 2.0), (0.7, 0.05), (-1.5, 0.4), (4.9999, 1e-5)])
def test_polylog_exp_against_mpmath(s, mu):
    ref = float(mpmath.polylog(s, mpmath.exp(-mu)))
    sv = polylog_exp_series(s, mu)
    assert rel(sv.value, ref) < 1e-13
    assert abs(sv.value - ref) <= sv.bound + 4e-16 * abs(ref)


@pytest.mark.parametrize("s,mu,a", [(2.5, 0.01, 3.0), (3.0, 0.2, 10.0), (1.8, 0.001, 1.0)])
def test_lerch_against_mpmath(s, mu, a):
    ref = float(mpmath.lerchphi(mpmath.exp(-mu), s, a))
    assert rel(lerch_exp(s, mu, a), ref) < 1e-12


def test_series_bounds_are_honest():
    for s in (1.3, 2.2, 3.5, 9.0):
        sv = zeta_series(s)
        assert abs(sv.value - float(mpmath.zeta(s))) <= sv.bound + 1e-300
    sv = hurwitz_zeta_series(2.5, 17.0)
    assert abs(sv.value - float(mpmath.zeta(2.5, 17))) <= sv.bound


def test_budget_target():
    b = SeriesBudget(rel_tol=1e-6, abs_tol=1e-3)
    assert b.target(10.0) == pytest.approx(1e-3)


def test_hurwitz_array_matches_scalar():
    a = np.array([1.0, 2.0, 30.0, 1000.0, 12345.0])
    arr = hurwitz_zeta_array(3.5, a)
    for x, v in zip(a, arr):
        assert rel(v, hurwitz_zeta(3.5, x)) < 1e-13


def test_beta_moment():
    assert beta_moment(1.0, 1.0) == pytest.approx(1 / 6, rel=1e-15)
    assert beta_moment(3.0, 3.5) == pytest.approx(float(mpmath.beta(4, 4.5)), rel=1e-13)
    assert beta_moment(300.0, 250.0) == pytest.approx(float(mpmath.beta(301, 251)), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(1.05, 12.0), a=st.floats(1.0, 500.0))
def test_hurwitz_shift_identity(s, a):
    # zeta(s, a) - zeta(s, a+1) = a^-s
    lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0)
    assert lhs == pytest.approx(a ** (-s), rel=1e-9, abs=1e-15 * hurwitz_zeta(s, a))


@settings(max_examples=60, deadline=None)
@given(s=st.floats(1.05, 8.0), mu1=st.floats(0.0, 3.0), mu2=st.floats(0.0, 3.0))
def test_polylog_monotone_in_mu(s, mu1, mu2):
    lo, hi = sorted((mu1, mu2))
    assert polylog_exp(s, hi) <= polylog_exp(s, lo) * (1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(1.2, 8.0), mu=st.floats(1e-6, 2.0))
def test_polylog_differentiation_identity(s, mu):
    # d/dmu Li_s(e^-mu) = -Li_{s-1}(e^-mu)
    h = 1e-6 * max(mu, 1e-3)
    if mu - h <= 0:
        return
    num = (polylog_exp(s, mu + h) - polylog_exp(s, mu - h)) / (2 * h)
    assert num == pytest.approx(-polylog_exp(s - 1.0, mu), rel=1e-4, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(s1=st.floats(1.05, 30.0), s2=st.floats(1.05, 30.0))
def test_zeta_decreasing(s1, s2):
    lo, hi = sorted((s1, s2))
    if hi - lo > 1e-9:
        assert zeta(hi) < zeta(lo)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(1.01, 10.0))
def test_polylog_at_one_is_zeta(s):
    assert polylog(s, 1.0) == pytest.approx(zeta(s), rel=1e-14)


@pytest.mark.parametrize("s", [0.93, 1.015625, 1.06, 1.97, 2.04, 3.09])
@pytest.mark.parametrize("mu", [1e-9, 1e-4, 0.16, 0.45])
def test_polylog_exp_near_integer_order(s, mu):
    ref = float(mpmath.polylog(s, mpmath.exp(-mpmath.mpf(mu))))
    assert polylog_exp(s, mu) == pytest.approx(ref, rel=2e-14)


@pytest.mark.parametrize("s", [0.5, 1.0, 1.7982, 2.0, 3.5, 6.0])
@pytest.mark.parametrize("mu", [4.589306057068628e-08, 1e-4, 3e-3])
@pytest.mark.parametrize("a", [1.0, 2.5, 10000.0, 123456.7])
def test_lerch_small_decay_large_shift(s, mu, a):
    sv = lerch_exp_series(s, mu, a)
    ref = float(mpmath.lerchphi(mpmath.exp(-mpmath.mpf(mu)), s, a))
    assert abs(sv.value - ref) <= sv.bound
    assert sv.value == pytest.approx(ref, rel=2e-14)
