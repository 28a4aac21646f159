"""Leading eigenvalue and pressure of the single and double Hofbauer models.

For beta < 1 the eigenvalue lambda > 1 solves

    1 = Li_{gamma beta}(1/lambda) Li_{delta beta}(1/lambda) / (zeta(gamma) zeta(delta))^beta

(double model) or 1 = Li_{gamma beta}(1/lambda) / zeta(gamma)^beta (single
model).  For beta >= 1 the pressure vanishes and lambda = 1.

Roots are found by bisection on the pressure p = log(lambda), so that the
tiny pressures near beta = 1 keep full relative precision.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BracketError, DomainError
from .model import Params, WaltersData
from .specfun import gamma_reflect, polylog_exp, zeta, zeta_prime

__all__ = [
    "PressureResult",
    "CriticalResult",
    "solve_pressure_single",
    "solve_pressure_double",
    "solve_lambda_single",
    "solve_lambda_double",
    "maindouble_residual",
    "walters_existence_value",
    "walters_rhs",
    "find_critical_beta",
    "asymptote_eval",
    "pressure_scan",
]

_RES_TOL = 1e-12
_LOG_LAMBDA_CAP = 60 * math.log(2.0)


@dataclass(frozen=True)
class PressureResult:
    beta: float
    pressure: float
    residual: float
    iterations: int
    convention: bool = False

    @property
    def lam(self) -> float:
        return math.exp(self.pressure)


@dataclass(frozen=True)
class CriticalResult:
    beta_c: float
    residual: float
    iterations: int


def _log_factor(exponent: float, beta: float, mu: float) -> float:
    """log of Li_{exponent*beta}(e^{-mu}) / zeta(exponent)^beta."""
    s = exponent * beta
    if mu == 0.0 and s <= 1.0:
        return math.inf
    return math.log(polylog_exp(s, mu)) - beta * math.log(zeta(exponent))


def _bisect_pressure(exponents: Sequence[float], beta: float) -> PressureResult:
    def G(mu: float) -> float:
        return math.fsum(_log_factor(e, beta, mu) for e in exponents)

    hi = math.log(2.0)
    while G(hi) > 0:
        hi *= 2.0
        if hi > _LOG_LAMBDA_CAP:
            raise BracketError("no eigenvalue below 2^60")
    lo = 0.0
    g_lo = G(lo)
    if g_lo <= 0:
        raise BracketError(f"no root with lambda > 1 at beta = {beta}")
    best_mu, best_g = hi, G(hi)
    it = 0
    while it < 400:
        it += 1
        if lo > 0 and hi / lo > 8.0:
            mid = math.sqrt(lo * hi)
        elif lo == 0 and hi > 1e-300:
            mid = 0.5 * hi
        else:
            mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            break
        g = G(mid)
        if abs(g) < abs(best_g):
            best_mu, best_g = mid, g
        if abs(math.expm1(g)) <= 0.25 * _RES_TOL:
            break
        if g > 0:
            lo = mid
        else:
            hi = mid
    return PressureResult(beta, best_mu, abs(math.expm1(best_g)), it)


def solve_pressure_single(gamma: float, beta: float) -> PressureResult:
    """Pressure of beta*g for the single Hofbauer model with exponent gamma."""
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    if not beta > 0:
        raise DomainError("beta must be positive")
    if beta >= 1:
        res = abs(math.expm1(_log_factor(gamma, beta, 0.0))) if beta == 1 else math.nan
        return PressureResult(beta, 0.0, res, 0, convention=True)
    return _bisect_pressure((gamma,), beta)


def solve_pressure_double(p: Params) -> PressureResult:
    """Pressure of beta*g for the double Hofbauer model."""
    if not p.beta > 0:
        raise DomainError("beta must be positive")
    if p.beta >= 1:
        if p.beta == 1:
            g = _log_factor(p.gamma, 1.0, 0.0) + _log_factor(p.delta, 1.0, 0.0)
            res = abs(math.expm1(g))
        else:
            res = math.nan
        return PressureResult(p.beta, 0.0, res, 0, convention=True)
    return _bisect_pressure((p.gamma, p.delta), p.beta)


def solve_lambda_single(gamma: float, beta: float) -> float:
    return solve_pressure_single(gamma, beta).lam


def solve_lambda_double(p: Params) -> float:
    return solve_pressure_double(p).lam


def maindouble_residual(p: Params, lam: float, n_terms: int = 10**6) -> tuple[float, float]:
    """Residual of the eigenvalue equation by plain truncated summation.

    Independent of the polylog machinery: sums n = 1..n_terms directly and
    bounds the rest by x^{N+1} / (1 - x).  Returns (residual, tail bound of
    the product).
    """
    if lam <= 1.0:
        raise DomainError("truncated check needs lambda > 1")
    n = np.arange(1, n_terms + 1, dtype=float)
    mu = math.log(lam)
    fac = []
    tails = []
    for e in (p.gamma, p.delta):
        s = e * p.beta
        terms = np.exp(-mu * n - s * np.log(n))
        fac.append(math.fsum(terms) / zeta(e) ** p.beta)
        t = math.exp(-mu * (n_terms + 1)) / -math.expm1(-mu)
        tails.append(t / zeta(e) ** p.beta)
    prod = fac[0] * fac[1]
    tail = tails[0] * fac[1] + tails[1] * fac[0] + tails[0] * tails[1]
    return abs(prod - 1.0), tail


# ---------------------------------------------------------------------------
# Walters criterion


def walters_existence_value(p: Params) -> float:
    """Right-hand side of the Walters existence inequality for beta*g.

    Equals zeta(gamma beta) zeta(delta beta) / (zeta(gamma) zeta(delta))^beta,
    or +inf when either zeta argument is at most 1.
    """
    b = p.beta
    if p.gamma * b <= 1 or p.delta * b <= 1:
        return math.inf
    return math.exp(
        math.log(zeta(p.gamma * b)) + math.log(zeta(p.delta * b))
        - b * (math.log(zeta(p.gamma)) + math.log(zeta(p.delta)))
    )


def walters_rhs(data: WaltersData, lam: float | None = None, n_terms: int = 10**5) -> float:
    """Generic Walters bracket product truncated at ``n_terms``.

    With ``lam=None`` this is the existence criterion; otherwise it is the
    eigenvalue equation's right-hand side at ``lam``.
    """
    log_scale = max(data.a, data.c) if lam is None else math.log(lam)

    def bracket(first: float, seq, run) -> float:
        total = math.exp(first)
        acc = 0.0
        parts = [total]
        for j in range(1, n_terms + 1):
            acc += run(j + 1)
            parts.append(math.exp(seq(j + 1) + acc - j * log_scale))
        return math.fsum(parts)

    left = bracket(data.d_n(1), data.d_n, data.a_n)
    right = bracket(data.b_n(1), data.b_n, data.c_n)
    return math.exp(-2 * log_scale) * left * right


def find_critical_beta(gamma: float, delta: float, tol: float = 1e-8,
                       upper: float = 4.0, scan_points: int = 64) -> CriticalResult:
    """Inverse temperature where the Walters criterion value crosses 1."""
    if not (gamma > 1 and delta > 1):
        raise DomainError("exponents must exceed 1")
    g, d = max(gamma, delta), min(gamma, delta)
    params = Params(g, d)

    def f(beta: float) -> float:
        return math.log(walters_existence_value(params.with_beta(beta)))

    lo_edge = 1.0 / d + 1e-6
    grid = np.linspace(lo_edge, upper, scan_points)
    vals = [f(b) for b in grid]
    lo = hi = None
    for b0, b1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if v0 == 0.0:
            return CriticalResult(float(b0), 0.0, 0)
        if v0 > 0 > v1 or v1 == 0.0:
            lo, hi = float(b0), float(b1)
            break
    if lo is None:
        raise BracketError("no sign change of the Walters criterion in the scan window")
    it = 0
    while hi - lo > tol:
        it += 1
        mid = 0.5 * (lo + hi)
        v = f(mid)
        if v == 0.0:
            lo = hi = mid
            break
        if v > 0:
            lo = mid
        else:
            hi = mid
    beta_c = 0.5 * (lo + hi)
    return CriticalResult(beta_c, walters_existence_value(params.with_beta(beta_c)) - 1.0, it)


# ---------------------------------------------------------------------------
# Asymptotics near beta = 1


def _entropy_numerator(e: float) -> float:
    z = zeta(e)
    return z * math.log(z) - e * zeta_prime(e)


def _slope(e: float) -> float:
    # implicit differentiation of Li_{e beta}(e^{-p}) = zeta(e)^beta at (1, 0)
    return -_entropy_numerator(e) / zeta(e - 1.0)


def asymptote_eval(kind: str, gamma: float, delta: float | None = None) -> float:
    """Constants describing the pressure near beta = 1.

    ``"b"`` (1 < gamma < 2): limit of p_1(beta) / (1 - beta)^{1/(gamma-1)}.
    ``"c"`` (2 < gamma < 3): limit of p_1(beta) / (beta - 1), the left
    derivative of the single-model pressure.
    ``"plinna"`` (2 < delta < gamma < 3): mean of the two ``"c"`` slopes.

    Diagnostic kinds: ``"c_printed"`` and ``"plinna_printed"`` evaluate the
    alternative closed forms with zeta'(gamma - 1) in the denominator;
    ``"plinna_exact"`` is the exact left derivative of the double-model
    pressure, weighted by zeta(e - 1)/zeta(e).
    """
    if kind == "b":
        if not 1 < gamma < 2:
            raise DomainError("kind b needs 1 < gamma < 2")
        base = _entropy_numerator(gamma) / (-gamma_reflect(1.0 - gamma))
        return base ** (1.0 / (gamma - 1.0))
    if kind in ("c", "c_printed"):
        if not 2 < gamma < 3:
            raise DomainError("kind c needs 2 < gamma < 3")
        if kind == "c":
            return _slope(gamma)
        return _entropy_numerator(gamma) / (gamma * zeta_prime(gamma - 1.0))
    if kind in ("plinna", "plinna_printed", "plinna_exact"):
        if delta is None or not (2 < delta < gamma < 3):
            raise DomainError("kind plinna needs 2 < delta < gamma < 3")
        if kind == "plinna":
            return 0.5 * (_slope(gamma) + _slope(delta))
        if kind == "plinna_exact":
            w_g = zeta(gamma - 1.0) / zeta(gamma)
            w_d = zeta(delta - 1.0) / zeta(delta)
            a_g = -_entropy_numerator(gamma) / zeta(gamma)
            a_d = -_entropy_numerator(delta) / zeta(delta)
            return (a_g + a_d) / (w_g + w_d)
        zd = zeta(delta)
        t1 = _entropy_numerator(gamma) / (gamma * zeta_prime(gamma - 1.0))
        # second term exactly as displayed, with zeta'(gamma) in the numerator
        t2 = (zd * math.log(zd) - delta * zeta_prime(gamma)) / (delta * zeta_prime(delta - 1.0))
        return 0.5 * (t1 + t2)
    raise DomainError(f"unknown asymptote kind {kind!r}")


# ---------------------------------------------------------------------------
# Scans


def _thread_cap() -> int:
    raw = os.environ.get("RUELLE_KIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"RUELLE_KIT_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def pressure_scan(gamma: float, delta: float, betas: Iterable[float],
                  threads: int | None = None) -> list[PressureResult]:
    """Double-model pressures on a grid, in grid order."""
    betas = list(betas)
    workers = threads if threads is not None else _thread_cap()

    def one(b: float) -> PressureResult:
        return solve_pressure_double(Params(gamma, delta, b))

    if workers <= 1:
        return [one(b) for b in betas]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, betas))
