"""Real special functions with certified truncation bounds.

Every series evaluator has two forms.  The plain form (``zeta``,
``polylog``, ...) returns a float.  The ``*_series`` form returns a
:class:`SeriesValue` carrying the value, a bound on its absolute error and
the number of terms used.  The bound covers truncation and a conservative
allowance for floating-point rounding.

Zeta-type sums are evaluated with direct summation up to a shift point
followed by an Euler-Maclaurin tail.  Each included correction term has
constant sign derivatives behind it, so the remainder is bounded by the
magnitude of the last included correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DivergenceError, DomainError

__all__ = [
    "SeriesBudget",
    "SeriesValue",
    "DEFAULT_BUDGET",
    "zeta",
    "zeta_series",
    "zeta_prime",
    "zeta_prime_series",
    "hurwitz_zeta",
    "hurwitz_zeta_series",
    "hurwitz_zeta_array",
    "polylog",
    "polylog_series",
    "polylog_exp",
    "polylog_exp_series",
    "lerch_exp",
    "lerch_exp_series",
    "gamma_reflect",
    "beta_moment",
]

_EPS = np.finfo(float).eps
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SeriesBudget:
    """Truncation policy for an infinite series.

    Parameters
    ----------
    rel_tol : float
        Target bound on ``|error| / |value|``.
    abs_tol : float
        Absolute floor for the target bound (relevant for tiny values).
    max_terms : int
        Hard cap on explicitly summed terms.
    """

    rel_tol: float = 1e-13
    abs_tol: float = 1e-300
    max_terms: int = 10**8

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise DomainError("abs_tol must be nonnegative")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")

    def target(self, value: float) -> float:
        return max(self.rel_tol * abs(value), self.abs_tol)


DEFAULT_BUDGET = SeriesBudget()


class SeriesValue(NamedTuple):
    value: float
    bound: float
    terms: int


def _check(sv: SeriesValue, budget: SeriesBudget, what: str) -> SeriesValue:
    if sv.bound > budget.target(sv.value):
        raise ConvergenceError(
            f"{what}: achieved bound {sv.bound:.3e} above target", sv.bound
        )
    return sv


@lru_cache(maxsize=None)
def _bernoulli_ratios(kmax: int = 60) -> tuple[float, ...]:
    """B_{2k}/(2k)! for k = 0..kmax, from exact rational Bernoulli numbers."""
    n = 2 * kmax
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    bern = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        bern.append(a[0])
    out = []
    fact = 1
    for k in range(kmax + 1):
        if k > 0:
            fact *= (2 * k - 1) * (2 * k)
        out.append(float(bern[2 * k] / fact))
    return tuple(out)


# ---------------------------------------------------------------------------
# Hurwitz zeta and its s-derivative


def _shift_point(s: float) -> float:
    return max(20.0, abs(s) + 10.0)


def _hurwitz_em(s: float, a: float, rel_tol: float, drop_pole: bool = False) -> SeriesValue:
    """sum_{n>=0} (n+a)^{-s} for a > 0, s != 1 (continued for -0.5 < s < 1).

    With ``drop_pole`` the pole part 1/(s-1) is subtracted analytically,
    which keeps full precision for s close to (or equal to) 1.
    """
    x0 = _shift_point(s)
    n_direct = max(0, math.ceil(x0 - a))
    parts = [(n + a) ** (-s) for n in range(n_direct)]
    X = a + n_direct
    base = X ** (-s)
    if drop_pole:
        lx = math.log(X)
        parts.append(math.expm1((1.0 - s) * lx) / (s - 1.0) if s != 1.0 else -lx)
    else:
        parts.append(X * base / (s - 1.0))
    parts.append(0.5 * base)
    b = _bernoulli_ratios()
    poch = s  # (s)_{2k-1}
    xp = base / X  # X^{-s-2k+1}
    inv_x2 = 1.0 / (X * X)
    bound = math.inf
    prev = math.inf
    head = math.fsum(parts)
    for k in range(1, len(b)):
        term = b[k] * poch * xp
        mag = abs(term)
        if mag > prev:
            break
        parts.append(term)
        bound = mag
        prev = mag
        if mag <= 0.01 * rel_tol * abs(head):
            break
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        xp *= inv_x2
    total = math.fsum(parts)
    mags = math.fsum(abs(x) for x in parts)
    rounding = _EPS * abs(total) + 4.0 * _EPS * mags
    return SeriesValue(total, bound + rounding, len(parts))


def _hurwitz_prime_em(s: float, a: float, rel_tol: float) -> SeriesValue:
    """d/ds sum_{n>=0} (n+a)^{-s}, for s > 1 and a > 0."""
    x0 = max(30.0, abs(s) + 10.0)
    n_direct = max(0, math.ceil(x0 - a))
    parts = [-math.log(n + a) * (n + a) ** (-s) for n in range(n_direct)]
    X = a + n_direct
    lx = math.log(X)
    base = X ** (-s)
    parts.append(-X * base * (lx / (s - 1.0) + 1.0 / (s - 1.0) ** 2))
    parts.append(-0.5 * lx * base)
    head = math.fsum(parts)
    b = _bernoulli_ratios()
    poch = s
    xp = base / X
    inv_x2 = 1.0 / (X * X)
    harm = 1.0 / s  # H_{2k-1}(s) = sum_{i<2k-1} 1/(s+i)
    bound = math.inf
    prev = math.inf
    for k in range(1, len(b)):
        # the remainder estimate at this order needs log X > H_{2k}(s)
        if lx <= harm + 1.0 / (s + 2 * k - 1):
            break
        term = b[k] * poch * xp * (harm - lx)
        mag = abs(term)
        if mag > prev:
            break
        parts.append(term)
        bound = mag
        prev = mag
        if mag <= 0.01 * rel_tol * abs(head):
            break
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        harm += 1.0 / (s + 2 * k - 1) + 1.0 / (s + 2 * k)
        xp *= inv_x2
    total = math.fsum(parts)
    mags = math.fsum(abs(x) for x in parts)
    rounding = _EPS * abs(total) + 6.0 * _EPS * mags
    return SeriesValue(total, bound + rounding, len(parts))


def hurwitz_zeta_series(
    s: float, a: float, budget: SeriesBudget = DEFAULT_BUDGET
) -> SeriesValue:
    """Hurwitz zeta sum_{n>=0} (n+a)^{-s} for s > 1, a > 0."""
    if not s > 1:
        raise DomainError(f"Hurwitz zeta needs s > 1, got {s}")
    if not a > 0:
        raise DomainError(f"Hurwitz zeta needs a > 0, got {a}")
    return _check(_hurwitz_em(float(s), float(a), budget.rel_tol), budget, "hurwitz_zeta")


def hurwitz_zeta(s: float, a: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    return hurwitz_zeta_series(s, a, budget).value


def hurwitz_zeta_array(s: float, a) -> np.ndarray:
    """Vectorized Hurwitz zeta for many shifts ``a`` (each > 0) at fixed s > 1.

    Shifts below the Euler-Maclaurin threshold fall back to the scalar path.
    Relative accuracy is close to machine precision throughout.
    """
    if not s > 1:
        raise DomainError(f"Hurwitz zeta needs s > 1, got {s}")
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError("Hurwitz zeta needs a > 0")
    out = np.empty_like(a)
    x0 = _shift_point(s)
    big = a >= x0
    small_idx = np.flatnonzero(~big)
    for i in small_idx:
        out.flat[i] = _hurwitz_em(s, float(a.flat[i]), 1e-16).value
    if np.any(big):
        X = a[big]
        base = X ** (-s)
        total = X * base / (s - 1.0) + 0.5 * base
        b = _bernoulli_ratios()
        poch = s
        xp = base / X
        inv_x2 = 1.0 / (X * X)
        # at X >= x0 the corrections shrink by at least (s+2k)^2/(2 pi X)^2
        for k in range(1, 16):
            total += b[k] * poch * xp
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            xp = xp * inv_x2
        out[big] = total
    return out


# ---------------------------------------------------------------------------
# Riemann zeta


def _zeta_any(s: float, rel_tol: float = 1e-15) -> SeriesValue:
    """Riemann zeta on the real line minus the pole, by continuation."""
    if s == 1.0:
        raise DivergenceError("zeta has a pole at s = 1")
    if s > -0.5:
        return _hurwitz_em(s, 1.0, rel_tol)
    if s == math.floor(s) and int(s) % 2 == 0:
        return SeriesValue(0.0, 0.0, 0)
    t = 1.0 - s
    inner = _hurwitz_em(t, 1.0, rel_tol)
    pref = 2.0**s * math.pi ** (s - 1.0) * math.sin(0.5 * math.pi * s) * math.gamma(t)
    val = pref * inner.value
    bound = abs(pref) * inner.bound + 16 * _EPS * abs(val)
    return SeriesValue(val, bound, inner.terms)


def zeta_series(s: float, budget: SeriesBudget = DEFAULT_BUDGET) -> SeriesValue:
    """Riemann zeta sum_{n>=1} n^{-s} for s > 1 with an error bound."""
    if not s > 1:
        raise DomainError(f"zeta needs s > 1, got {s}")
    return _check(_hurwitz_em(float(s), 1.0, budget.rel_tol), budget, "zeta")


def zeta(s: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    """Riemann zeta for s > 1.

    >>> round(zeta(2.0), 12)
    1.644934066848
    """
    return zeta_series(s, budget).value


def zeta_prime_series(s: float, budget: SeriesBudget = DEFAULT_BUDGET) -> SeriesValue:
    """Derivative of zeta, -sum_{n>=2} log(n) n^{-s}, for s > 1."""
    if not s > 1:
        raise DomainError(f"zeta_prime needs s > 1, got {s}")
    return _check(_hurwitz_prime_em(float(s), 1.0, budget.rel_tol), budget, "zeta_prime")


def zeta_prime(s: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    return zeta_prime_series(s, budget).value


# ---------------------------------------------------------------------------
# Polylogarithm Li_s(x) = sum_{n>=1} n^{-s} x^n on (0, 1]


def _direct_exp_sum(s: float, mu: float, offset: float, start: int,
                    budget: SeriesBudget) -> SeriesValue:
    """sum_{n>=start} e^{-mu n} (n + offset)^{-s} by chunked direct summation.

    Requires mu > 0 and start + offset > 0.  The tail after the last summed
    index N is bounded by t_{N+1} / (1 - rho) where rho dominates the ratio
    of consecutive terms.
    """
    total = 0.0
    n0 = start
    used = 0
    while True:
        n = np.arange(n0, n0 + _CHUNK, dtype=float)
        terms = np.exp(-mu * n - s * np.log(n + offset))
        total += float(np.sum(terms[::-1]))
        used += _CHUNK
        n_last = n0 + _CHUNK - 1
        y = n_last + 1 + offset
        t_next = math.exp(-mu * (n_last + 1) - s * math.log(y))
        # ratio of consecutive terms beyond n_last is at most rho
        log_rho = -mu if s >= 0 else -mu - s * math.log1p(1.0 / y)
        tail = t_next / -math.expm1(log_rho) if log_rho < 0 else math.inf
        # pairwise summation; each term carries a few ulps from exp/log
        rounding = 4.0 * _EPS * (math.log2(used) + 4.0) * total
        if tail + rounding <= 0.5 * budget.target(total) or (tail == 0.0):
            return SeriesValue(total, tail + rounding, used)
        if used >= budget.max_terms:
            raise ConvergenceError(
                f"direct summation exhausted {used} terms (mu = {mu:.3e})",
                tail + rounding,
            )
        n0 += _CHUNK


def _paired_pole_factor(eps: float, m: int, log_mu: float) -> SeriesValue:
    """Regular part left when the two poles at s = m + 1 + eps cancel.

    Gamma(1-s) mu^{s-1} + zeta(s-m) (-mu)^m / m!  equals
    (-mu)^m / m! times  Z(eps) - expm1(h(eps)) / eps,  where
    Z(eps) = zeta(1+eps) - 1/eps and
    h(eps) = log Gamma(1-eps) - sum_{j<=m} log1p(eps/j) + eps log mu.
    """
    harm = math.fsum(1.0 / j for j in range(1, m + 1))
    if eps == 0.0:
        val = harm - log_mu
        return SeriesValue(val, 4 * _EPS * (abs(harm) + abs(log_mu)), 1)
    z = _hurwitz_em(1.0 + eps, 1.0, 1e-16, drop_pole=True)
    # log Gamma(1 - eps) = euler*eps + sum_{k>=2} zeta(k) eps^k / k, |eps| < 0.1
    lg = [_EULER * eps] + [_zeta_any(float(k)).value * eps**k / k for k in range(2, _LG_TERMS)]
    h = math.fsum(lg + [-math.log1p(eps / j) for j in range(1, m + 1)] + [eps * log_mu])
    e = math.expm1(h) / eps
    val = z.value - e
    bound = z.bound + 8 * _EPS * (abs(e) + abs(z.value)) + 2.0 * abs(eps) ** _LG_TERMS
    return SeriesValue(val, bound, z.terms)


_EULER = 0.57721566490153286
_LG_TERMS = 40
_PAIR_WINDOW = 0.1
_LERCH_DIRECT = 2000


def _expansion_near_one(s: float, mu: float, rel_tol: float) -> SeriesValue:
    """Li_s(e^{-mu}) for small mu by the expansion in powers of mu.

    Li_s(e^{-mu}) = Gamma(1-s) mu^{s-1} + sum_k zeta(s-k) (-mu)^k / k!
    for mu < 2 pi; callers use it for mu < 1/2.  When s is within 0.1 of
    an integer n >= 1 the two terms with poles at s = n are combined, which
    avoids cancelling two terms of size 1/|s - n|.
    """
    n_int = round(s)
    m = n_int - 1
    paired = n_int >= 1 and abs(s - n_int) < _PAIR_WINDOW
    log_mu = math.log(mu)
    terms = []
    pair_err = 0.0
    if not paired:
        terms.append(math.gamma(1.0 - s) * mu ** (s - 1.0))
    fact = 1.0
    mu_k = 1.0
    k = 0
    truncation = math.inf
    zeta_err = 0.0
    while k < 200:
        if k > 0:
            fact *= k
            mu_k *= mu
        if paired and k == m:
            pf = _paired_pole_factor(s - n_int, m, log_mu)
            terms.append((-1) ** k * mu_k / fact * pf.value)
            pair_err = pf.bound * mu_k / fact
        else:
            zk = _zeta_any(s - k)
            terms.append(zk.value * (-1) ** k * mu_k / fact)
            zeta_err += zk.bound * mu_k / fact
        k += 1
        t = k + 1.0 - s  # argument of the reflected zeta for the next term
        if t > 1.0 and s >= 0 and k > m:
            # |zeta(s-k)| <= 2 zeta(t) Gamma(t) / (2 pi)^t once s - k < 0,
            # and successive bounds shrink by at least mu / (2 pi)
            lg = (math.log(2.0 * _zeta_any(t).value) + math.lgamma(t)
                  - t * math.log(2.0 * math.pi) + k * log_mu - math.lgamma(k + 1.0))
            truncation = math.exp(lg) / (1.0 - mu / (2.0 * math.pi))
            if truncation <= 0.01 * rel_tol * abs(math.fsum(terms)):
                break
    total = math.fsum(terms)
    mags = math.fsum(abs(x) for x in terms)
    rounding = _EPS * abs(total) + 4.0 * _EPS * mags
    return SeriesValue(total, truncation + zeta_err + pair_err + rounding, k)


def polylog_exp_series(
    s: float, mu: float, budget: SeriesBudget = DEFAULT_BUDGET
) -> SeriesValue:
    """Li_s(e^{-mu}) for mu >= 0 with a certified error bound.

    Working with ``mu = -log x`` keeps full relative precision in ``1 - x``
    when x is extremely close to 1.
    """
    s = float(s)
    mu = float(mu)
    if mu < 0 or math.isnan(mu):
        raise DomainError(f"polylog needs x in (0, 1], got mu = {mu}")
    if mu == 0.0:
        if not s > 1:
            raise DivergenceError(f"polylog at x = 1 diverges for s = {s} <= 1")
        return zeta_series(s, budget)
    if math.isinf(mu):
        return SeriesValue(0.0, 0.0, 0)
    if s == 1.0:
        val = -math.log(-math.expm1(-mu))
        return SeriesValue(val, 4 * _EPS * abs(val), 1)
    if mu >= 0.5 or s < 0:
        return _check(_direct_exp_sum(s, mu, 0.0, 1, budget), budget, "polylog")
    return _check(_expansion_near_one(s, mu, budget.rel_tol), budget, "polylog")


def polylog_exp(s: float, mu: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    return polylog_exp_series(s, mu, budget).value


def polylog_series(s: float, x: float, budget: SeriesBudget = DEFAULT_BUDGET) -> SeriesValue:
    """Li_s(x) = sum_{n>=1} n^{-s} x^n for x in (0, 1]."""
    if not (0.0 < x <= 1.0):
        raise DomainError(f"polylog needs x in (0, 1], got {x}")
    if x == 1.0:
        if not s > 1:
            raise DivergenceError(f"polylog at x = 1 diverges for s = {s} <= 1")
        return zeta_series(s, budget)
    return polylog_exp_series(s, -math.log(x), budget)


def polylog(s: float, x: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    """Real polylogarithm on (0, 1].

    >>> round(polylog(1.0, 0.5), 12)
    0.69314718056
    """
    return polylog_series(s, x, budget).value


# ---------------------------------------------------------------------------
# Lerch transcendent Phi(e^{-mu}, s, a) = sum_{n>=0} e^{-mu n} (n+a)^{-s}


def _expint_scaled(s: float, z: float) -> SeriesValue:
    """e^z E_s(z) with E_s(z) = int_1^inf e^{-z u} u^{-s} du, for z > 0.

    A continued fraction is used for z >= 1 and the power series
    E_s(z) = Gamma(1-s) z^{s-1} - sum_k (-z)^k / (k! (k+1-s)) below that;
    near an integer s = n the Gamma term is paired with the k = n-1 term.
    """
    if z >= 1.0:
        # modified Lentz for E_s(z) = e^{-z} / (z + s - 1*s/(z + s + 2 - ...))
        tiny = 1e-300
        b = z + s
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, 10000):
            an = -i * (s - 1.0 + i)
            b += 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h *= delta
            if abs(delta - 1.0) < _EPS:
                return SeriesValue(h, 16 * _EPS * abs(h) + 2 * i * _EPS * abs(h), i)
        raise ConvergenceError("exponential integral: continued fraction did not converge")
    n_int = round(s)
    paired = n_int >= 1 and abs(s - n_int) < _PAIR_WINDOW
    log_z = math.log(z)
    terms = []
    pair_err = 0.0
    if paired:
        m = n_int - 1
        eps = s - n_int
        if eps == 0.0:
            pf = math.fsum([_EULER, log_z] + [-1.0 / j for j in range(1, m + 1)])
            pf_bound = 8 * _EPS * (abs(log_z) + 1.0 + math.log(m + 1.0))
        else:
            lg = [_EULER * eps] + [_zeta_any(float(k)).value * eps**k / k for k in range(2, _LG_TERMS)]
            h = math.fsum(lg + [-math.log1p(eps / j) for j in range(1, m + 1)] + [eps * log_z])
            pf = math.expm1(h) / eps
            pf_bound = 8 * _EPS * abs(pf) + 2.0 * abs(eps) ** (_LG_TERMS - 1)
        scale = (-1) ** n_int * z**m / math.factorial(m)
        terms.append(scale * pf)
        pair_err = abs(scale) * pf_bound
    else:
        m = -1
        terms.append(math.gamma(1.0 - s) * math.exp((s - 1.0) * log_z))
    zk = 1.0
    k = 0
    while True:
        if k > 0:
            zk *= -z / k
        if k != m:
            terms.append(-zk / (k + 1.0 - s))
        k += 1
        if k > m + 1 and k + 1.0 - s > 0 and abs(zk) * z / (k + 1.0 - s) < 1e-17 * abs(math.fsum(terms)):
            break
        if k > 400:
            raise ConvergenceError("exponential integral: series did not converge")
    total = math.fsum(terms)
    mags = math.fsum(abs(x) for x in terms)
    val = math.exp(z) * total
    bound = math.exp(z) * (pair_err + 4 * _EPS * mags + _EPS * abs(total)) + 4 * _EPS * abs(val)
    return SeriesValue(val, bound, k)


def _lerch_em(s: float, mu: float, a: float, rel_tol: float) -> SeriesValue:
    """sum_{n>=0} e^{-mu n} (n+a)^{-s} for small mu > 0 by Euler-Maclaurin.

    f(t) = t^{-s} e^{-mu (t - a)} is completely monotone for s >= 0, so every
    odd derivative is negative and the remainder is bounded by the last
    included correction, as for the Hurwitz zeta.  The integral part is
    e^{-mu (X - a)} X^{1-s} E_s(mu X).
    """
    x0 = _shift_point(s)
    n_direct = max(0, math.ceil(x0 - a))
    n = np.arange(n_direct, dtype=float)
    expo = mu * n + s * np.log(n + a)
    parts = list(np.exp(-expo))
    # exp() magnifies rounding in its argument
    expo_err = math.fsum(np.abs(expo) * np.array(parts)) if n_direct else 0.0
    X = a + n_direct
    damp = math.exp(-mu * n_direct)
    ei = _expint_scaled(s, mu * X)
    lx = math.log(X)
    # int_X^inf e^{-mu (t - a)} t^{-s} dt, with ei = e^{mu X} E_s(mu X)
    integral = damp * math.exp((1.0 - s) * lx) * ei.value
    fX = damp * math.exp(-s * lx)
    parts += [integral, 0.5 * fX]
    expo_err += abs(integral) * (abs(1.0 - s) * abs(lx) + mu * n_direct)
    expo_err += 0.5 * fX * (abs(s) * abs(lx) + mu * n_direct)
    head = math.fsum(parts)
    b = _bernoulli_ratios()
    # |f^{(m)}(X)| = damp * sum_j C(m, j) mu^{m-j} (s)_j X^{-s-j}
    max_order = 2 * (len(b) - 1)
    poch = np.ones(max_order + 1)
    for j in range(1, max_order + 1):
        poch[j] = poch[j - 1] * (s + j - 1)
    bound = math.inf
    prev = math.inf
    for k in range(1, len(b)):
        order = 2 * k - 1
        j = np.arange(order + 1)
        log_binom = np.array([math.lgamma(order + 1) - math.lgamma(i + 1) - math.lgamma(order - i + 1)
                              for i in j])
        with np.errstate(divide="ignore"):
            logs = log_binom + (order - j) * math.log(mu) + np.log(poch[: order + 1]) - (s + j) * lx
        deriv = damp * math.fsum(np.exp(logs))
        term = b[k] * deriv
        mag = abs(term)
        if mag > prev:
            break
        parts.append(term)
        bound = mag
        prev = mag
        if mag <= 0.01 * rel_tol * abs(head):
            break
    total = math.fsum(parts)
    mags = math.fsum(abs(x) for x in parts)
    rounding = _EPS * abs(total) + 4.0 * _EPS * mags + 2.0 * _EPS * expo_err + abs(integral) / max(abs(ei.value), 1e-300) * ei.bound
    return SeriesValue(total, bound + rounding, len(parts))


def lerch_exp_series(
    s: float, mu: float, a: float, budget: SeriesBudget = DEFAULT_BUDGET
) -> SeriesValue:
    """Lerch transcendent at x = e^{-mu} with shift a > 0."""
    s, mu, a = float(s), float(mu), float(a)
    if not a > 0:
        raise DomainError("Lerch transcendent needs a > 0")
    if mu < 0:
        raise DomainError("Lerch transcendent needs x <= 1")
    if mu == 0.0:
        return hurwitz_zeta_series(s, a, budget)
    # estimated number of direct terms
    need = math.log(1.0 / budget.rel_tol) / mu
    if need <= _LERCH_DIRECT or s < 0:
        return _check(_direct_exp_sum(s, mu, a, 0, budget), budget, "lerch")
    return _check(_lerch_em(s, mu, a, budget.rel_tol), budget, "lerch")


def lerch_exp(s: float, mu: float, a: float, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    return lerch_exp_series(s, mu, a, budget).value


# ---------------------------------------------------------------------------
# Gamma and Beta


def gamma_reflect(s: float) -> float:
    """Gamma at a negative non-integer argument via reflection.

    Computes pi / (sin(pi s) Gamma(1 - s)) with Gamma on the positive axis
    from the C library.

    >>> round(gamma_reflect(-0.5), 10)
    -3.5449077018
    """
    s = float(s)
    if s <= 0 and s == math.floor(s):
        raise DomainError(f"Gamma has a pole at {s}")
    if s > 0:
        return math.gamma(s)
    return math.pi / (math.sin(math.pi * s) * math.gamma(1.0 - s))


def beta_moment(delta: float, gamma: float) -> float:
    """Integral of x^delta (1-x)^gamma over [0, 1]."""
    if not (delta > 0 and gamma > 0):
        raise DomainError("beta_moment needs positive exponents")
    if gamma + delta + 2.0 < 170.0:
        return math.gamma(delta + 1.0) * math.gamma(gamma + 1.0) / math.gamma(gamma + delta + 2.0)
    return math.exp(
        math.lgamma(delta + 1.0) + math.lgamma(gamma + 1.0) - math.lgamma(gamma + delta + 2.0)
    )
