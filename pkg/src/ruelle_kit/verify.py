"""Invariant suites behind ``ruelle-kit verify``.

Each check measures an error and compares it with a tolerance.  The
environment variable RUELLE_KIT_TOL_SCALE multiplies every tolerance; a
scale of 0 turns every check into a failure and exercises the failure path.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import Params

SUITES = ("specfun", "model", "pressure", "eigen", "transfer", "renewal", "correlation")

DEFAULT_PARAMS = Params(3.5, 3.0)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def tol_scale() -> float:
    raw = os.environ.get("RUELLE_KIT_TOL_SCALE", "1")
    try:
        return float(raw)
    except ValueError:
        return 1.0


def _specfun() -> list[tuple[str, float, float]]:
    from .specfun import beta_moment, gamma_reflect, hurwitz_zeta, polylog, polylog_exp, zeta

    pi = math.pi
    return [
        ("zeta(2) = pi^2/6", abs(zeta(2.0) - pi**2 / 6), 1e-14),
        ("zeta(4) = pi^4/90", abs(zeta(4.0) - pi**4 / 90), 1e-14),
        ("Li_2(1/2)", abs(polylog(2.0, 0.5) - (pi**2 / 12 - math.log(2) ** 2 / 2)), 1e-14),
        ("Li_s(1) = zeta(s)", abs(polylog_exp(3.5, 0.0) - zeta(3.5)), 1e-14),
        ("Gamma(-1/2) = -2 sqrt(pi)", abs(gamma_reflect(-0.5) + 2 * math.sqrt(pi)), 1e-14),
        ("int x(1-x) dx = 1/6", abs(beta_moment(1.0, 1.0) - 1 / 6), 1e-15),
        ("zeta(s, 1) = zeta(s)", abs(hurwitz_zeta(3.5, 1.0) - zeta(3.5)), 1e-14),
        ("zeta(s, a) - zeta(s, a+1) = a^-s",
         abs(hurwitz_zeta(2.5, 7.0) - hurwitz_zeta(2.5, 8.0) - 7.0**-2.5), 1e-15),
    ]


def _model() -> list[tuple[str, float, float]]:
    from .model import parse_word, potential_value, renormalize, walters_data
    from .specfun import zeta

    p = DEFAULT_PARAMS
    w = parse_word("1(011)*")
    data = walters_data(p)
    return [
        ("renormalization fixed point, runs 2..100", renormalize(p, range(2, 101)).max_residual, 1e-12),
        ("g(L1) = -log zeta(gamma)", abs(potential_value(p, "01") + math.log(zeta(p.gamma))), 1e-15),
        ("g(0^inf) = 0", abs(potential_value(p, "0*")), 0.0),
        ("shift of periodic word", 0.0 if w.shift(4) == parse_word("(011)*") and w.shift(2) == parse_word("(110)*") else 1.0, 0.0),
        ("Walters sequences reach their limits", 0.0 if data.check_limits() else 1.0, 0.0),
    ]


def _pressure() -> list[tuple[str, float, float]]:
    from .pressure import find_critical_beta, pressure_scan, solve_pressure_double

    crit = find_critical_beta(3.0, 2.5)
    res1 = solve_pressure_double(Params(3.0, 2.5, 1.0)).residual
    half = solve_pressure_double(Params(3.0, 2.5, 0.5))
    scan = pressure_scan(3.0, 2.5, np.linspace(0.5, 0.999, 12))
    steps = np.diff([r.pressure for r in scan])
    return [
        ("critical beta (3, 2.5) = 1", abs(crit.beta_c - 1.0), 1e-6),
        ("pressure equation residual at beta = 1", abs(res1), 1e-11),
        ("pressure equation residual at beta = 0.5", abs(half.residual), 1e-11),
        ("pressure decreasing in beta", float(max(0.0, steps.max())), 0.0),
        ("beta = 2 convention", abs(solve_pressure_double(Params(3.0, 2.5, 2.0)).pressure), 0.0),
    ]


def _eigen() -> list[tuple[str, float, float]]:
    from .eigen import EigenSystem, all_words, build_measure_table, eigen_residual, jacobian_array

    p = DEFAULT_PARAMS
    rng = np.random.default_rng(7)
    r1 = rng.integers(1, 10**4, 2000)
    r2 = rng.integers(1, 10**4, 2000)
    out = []
    worst = 0.0
    for sym in (0, 1):
        # J(0x) + J(1x) for x with leading symbol sym and runs (r1, r2)
        same = jacobian_array(p, np.full(r1.shape, sym), r1 + 1, r2)
        other = jacobian_array(p, np.full(r1.shape, 1 - sym), np.ones_like(r1), r1)
        worst = max(worst, float(np.max(np.abs(same + other - 1.0))))
    out.append(("Jacobian normalization", worst, 1e-10))
    es = EigenSystem(Params(3.0, 3.0))
    out.append(("eigenmeasure residual depth <= 5 (symmetric)",
                max(eigen_residual(es, w) for w in all_words(5)), 1e-10))
    tab = build_measure_table(p, 6)
    out.append(("invariant measure additivity", tab.additivity_residual(), 1e-12))
    out.append(("invariant measure total", abs(tab.mass("0") + tab.mass("1") - 1.0), 1e-14))
    return out


def _transfer() -> list[tuple[str, float, float]]:
    from .eigen import all_words
    from .renewal import renewal_solution
    from .specfun import hurwitz_zeta, zeta
    from .transfer import (BernoulliMeasure, InvariantMeasure, JacobianPotential,
                           apply_power_bruteforce, dlr_residual)

    p = DEFAULT_PARAMS
    J = JacobianPotential(p)
    ones = max(abs(apply_power_bruteforce(J, None, y, n) - 1.0)
               for y in ("(01)*", "0001*", "1(011)*") for n in (1, 6, 12))
    ex = abs(apply_power_bruteforce(J, "0", "01(10)*", 1) - hurwitz_zeta(p.gamma, 2) / zeta(p.gamma))
    sol = renewal_solution(p, 12)
    ora = max(abs(apply_power_bruteforce(J, "0", "10(01)*", q) - sol.A[q]) for q in range(1, 13))
    ps = Params(3.0, 3.0)
    m = InvariantMeasure(ps)
    Js = JacobianPotential(ps)
    words = all_words(2)
    dlr = max(dlr_residual(Js, m, a, b, run_cut=10**5).residual for a in words for b in words)
    bern = max(dlr_residual(Js, BernoulliMeasure(), a, b).residual for a in words for b in words)
    return [
        ("L^n 1 = 1 for the Jacobian", ones, 1e-12),
        ("L(I_[0])(01...) closed form", ex, 1e-15),
        ("oracle equals renewal A(q), q <= 12", ora, 1e-10),
        ("DLR residual |a|,|b| <= 2 (symmetric)", dlr, 1e-10),
        ("Bernoulli control violates DLR", 1e-2 / bern, 1.0),
    ]


def _renewal() -> list[tuple[str, float, float]]:
    from .renewal import (conservation_residual, limit_K, mixed_recurrences, p_mass,
                          renewal_solution)

    p = DEFAULT_PARAMS
    head, tail = p_mass(p, 10**4)
    sol = renewal_solution(p, 200)
    A, B = mixed_recurrences(p, 200)
    k = limit_K(p, 10**4)
    return [
        ("sum p_q = 1", abs(head + tail - 1.0), 1e-12),
        ("mixed recurrences reproduce A", float(np.max(np.abs(A - sol.A))), 1e-12),
        ("mixed recurrences reproduce B", float(np.max(np.abs(B[1:] - sol.B[1:]))), 1e-12),
        ("A + Abar = 1", conservation_residual(p, 200), 1e-12),
        ("closed-form numerator of K", k.numerator_gap, 1e-10),
        ("sum a = sum b", abs(k.sum_b_direct - k.numerator), 1e-10),
    ]


def _correlation() -> list[tuple[str, float, float]]:
    from .correlation import correlation_series, correlation_value, fit_log_slope, deviation_renewal_residual
    from .renewal import renewal_solution

    p = DEFAULT_PARAMS
    sol = renewal_solution(p, 100)
    cs = correlation_series(p, 100, sol)
    cv = correlation_value(p, 10, 2000, sol=sol)
    x = np.arange(1.0, 101.0)
    fit = fit_log_slope(x, x**-2.0)
    return [
        ("V renewal equation", deviation_renewal_residual(p, 100, sol), 1e-13),
        ("truncated correlation within tail bound", max(0.0, abs(cs[10] - cv.value) - cv.tail_bound), 0.0),
        ("exact power-law fit", abs(fit.slope + 2.0) + abs(1.0 - fit.r_squared), 1e-12),
    ]


_BUILDERS: dict[str, Callable[[], list[tuple[str, float, float]]]] = {
    "specfun": _specfun,
    "model": _model,
    "pressure": _pressure,
    "eigen": _eigen,
    "transfer": _transfer,
    "renewal": _renewal,
    "correlation": _correlation,
}


def run_suite(name: str) -> list[Check]:
    """Run one suite (or ``all``) and return its checks."""
    names = SUITES if name == "all" else (name,)
    scale = tol_scale()
    checks = []
    for s in names:
        if s not in _BUILDERS:
            raise KeyError(s)
        for label, err, tol in _BUILDERS[s]():
            checks.append(Check(s, label, float(err), tol * scale))
    return checks


def format_table(checks: list[Check]) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{status}  {c.suite:<12} {c.name:<46} error={c.error:.3e} tol={c.tol:.3e}")
    return "\n".join(lines)
