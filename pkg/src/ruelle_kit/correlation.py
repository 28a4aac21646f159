"""Deviation sequences and decay of correlations for I_[0] under mu_1."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .eigen import build_measure_table, hurwitz_table
from .errors import BudgetError, DomainError
from .model import Params
from .renewal import RenewalSolution, limit_K, renewal_solution, solve_B_s
from .specfun import hurwitz_zeta, zeta

__all__ = [
    "mu_zero",
    "deviation_seq",
    "correlation_value",
    "correlation_series",
    "fit_log_slope",
    "FitResult",
    "generating_function_check",
    "deviation_renewal_residual",
    "decay_report",
    "to_csv",
]


def _require_probability(p: Params) -> None:
    if p.beta != 1:
        raise DomainError("decay of correlations is computed at beta = 1")
    if min(p.gamma, p.delta) <= 2:
        raise DomainError("mu_1 is a finite measure only when gamma, delta > 2")


def mu_zero(p: Params) -> float:
    """mu_1[0] from the normalized invariant measure table."""
    _require_probability(p)
    return build_measure_table(p, 1, kind="mu", normalize=True).mass("0")


def _partition(p: Params) -> float:
    # total unnormalized mass: sum_j zeta(gamma, j) + nu10 * sum_j zeta(delta, j)
    return zeta(p.gamma - 1) + zeta(p.gamma) * zeta(p.delta - 1) / zeta(p.delta)


def deviation_seq(p: Params, Q: int, side: str = "01",
                  sol: RenewalSolution | None = None) -> np.ndarray:
    """V_q = mu_1[0] - B(q) (side '01') or mu_1[0] - A(q) (side '10'), q = 0..Q."""
    _require_probability(p)
    if sol is None or sol.Q < Q:
        sol = renewal_solution(p, Q)
    m0 = mu_zero(p)
    if side == "01":
        seq = np.array(sol.B[: Q + 1])
    elif side == "10":
        seq = np.array(sol.A[: Q + 1])
    else:
        raise DomainError("side must be '01' or '10'")
    return m0 - seq


def _run_mass_tail(p: Params, J: int) -> float:
    """mu_1 of [0^{J+1}] = sum_{j>J} mu_1(0^j 1)."""
    return (hurwitz_zeta(p.gamma - 1, J + 1) - J * hurwitz_zeta(p.gamma, J + 1)) / _partition(p)


@dataclass(frozen=True)
class CorrelationValue:
    q: int
    value: float
    tail_bound: float
    J_max: int


def correlation_value(p: Params, q: int, J_max: int, tol: float | None = None,
                      sol: RenewalSolution | None = None) -> CorrelationValue:
    """Truncated j-sum of mu_1(0^j 1) (B^j_q - mu_1[0]) for j <= J_max.

    Both B^j_q and mu_1[0] lie in [0, 1], so the remaining terms are bounded
    by mu_1([0^{J_max+1}]).  A budget error is raised when that bound exceeds
    ``tol``.
    """
    _require_probability(p)
    if J_max < 1:
        raise DomainError("J_max must be >= 1")
    bound = _run_mass_tail(p, J_max)
    if tol is not None and bound > tol:
        raise BudgetError(f"j-tail bound {bound:.3e} exceeds tolerance {tol:.3e}")
    if sol is None or sol.Q < q:
        sol = renewal_solution(p, max(q, 1))
    m0 = mu_zero(p)
    Z = _partition(p)
    tg = hurwitz_table(p.gamma, J_max + 1)
    terms = np.empty(J_max)
    for j in range(1, J_max + 1):
        bj = solve_B_s(p, j, max(q, 1), sol)[q]
        terms[j - 1] = tg[j] / Z * (bj - m0)
    return CorrelationValue(q, math.fsum(terms), bound, J_max)


def correlation_series(p: Params, Q: int, sol: RenewalSolution | None = None) -> np.ndarray:
    """Correlation C(q) for q = 0..Q with the j-sum resummed exactly.

    Writing mu_1(0^j 1) = zeta(gamma, j)/Z and expanding B^j_q,

        Z (C(q) + mu_1[0]^2) = zeta(gamma) B(q) + sum_{i=1}^{q-1} A(q-i) zeta(gamma, i+1)
                              + zeta(gamma-1, q+2) - (q+1) zeta(gamma, q+2).
    """
    _require_probability(p)
    if sol is None or sol.Q < Q:
        sol = renewal_solution(p, max(Q, 1))
    m0 = mu_zero(p)
    Z = _partition(p)
    zg = zeta(p.gamma)
    tg = hurwitz_table(p.gamma, Q + 3)
    n = np.arange(Q + 1)
    # sum_{j>=2} zeta(gamma, j+q) = zeta(gamma-1, q+2) - (q+1) zeta(gamma, q+2)
    tg1 = hurwitz_table(p.gamma - 1, Q + 3)
    W = tg1[n + 2] - (n + 1) * tg[n + 2]
    w = np.zeros(Q + 1)
    w[1:] = tg[2 : Q + 2]  # w[i] = zeta(gamma, i+1)
    A = np.asarray(sol.A[: Q + 1])
    mid = np.convolve(w, A)[: Q + 1]  # sum_i w[i] A[q-i], A[0] = 0 drops i = q
    B = np.array(sol.B[: Q + 1])
    B[0] = 1.0
    return (zg * B + mid + W) / Z - m0 * m0


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def fit_log_slope(xs, ys, window: tuple[float, float] | slice | None = None) -> FitResult:
    """Least-squares line through (log x, log y).

    ``window`` is either a (lo, hi) range of x values (inclusive) or an index
    slice.  At least 8 points are required and every y must be positive.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if window is None:
        sel = np.ones(len(xs), dtype=bool)
    elif isinstance(window, slice):
        sel = np.zeros(len(xs), dtype=bool)
        sel[window] = True
    else:
        lo, hi = window
        sel = (xs >= lo) & (xs <= hi)
    x, y = xs[sel], ys[sel]
    if len(x) < 8:
        raise DomainError("window needs at least 8 points")
    if np.any(y <= 0) or np.any(x <= 0):
        raise DomainError("log fit needs positive values on the window")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(float(slope), float(intercept), r2, int(len(x)))


def _signed_fit(q: np.ndarray, v: np.ndarray, window) -> tuple[FitResult, int]:
    lo, hi = window
    sel = (q >= lo) & (q <= hi)
    sign = int(np.sign(v[sel][-1])) or 1
    return fit_log_slope(q, sign * v, window), sign


def deviation_renewal_residual(p: Params, Q: int, sol: RenewalSolution | None = None) -> float:
    """max |V_q - sum_{j<=q-2} V_j p_{q-j} - K_q| for 3 <= q <= Q.

    K_q = mu_1[0] sum_{j>=q} p_j - b(q); this is an exact rearrangement of
    the renewal equation for B.
    """
    sol = sol if sol is not None and sol.Q >= Q else renewal_solution(p, Q)
    V = deviation_seq(p, Q, "01", sol)
    K = _k_terms(p, sol, Q)
    P = np.asarray(sol.p)
    worst = 0.0
    for q in range(3, Q + 1):
        j = np.arange(1, q - 1)
        worst = max(worst, abs(V[q] - np.dot(V[j], P[q - j]) - K[q]))
    return worst


def _k_terms(p: Params, sol: RenewalSolution, Q: int) -> np.ndarray:
    m0 = mu_zero(p)
    P = np.asarray(sol.p[: Q + 1])
    tail = 1.0 - np.concatenate(([0.0], np.cumsum(P)[:-1]))  # sum_{j>=q} p_j
    K = m0 * tail - np.asarray(sol.b[: Q + 1])
    K[:3] = 0.0
    return K


def generating_function_check(p: Params, Q: int, sol: RenewalSolution | None = None) -> dict:
    """Partial sums of the generating-function numerator against V_n.

    From V(z)(1 - f(z)) = K(z) + V_1 z + V_2 z^2 and 1 - f(z) ~ M(1 - z),
    V_n is asymptotically (V_1 + V_2 + K_3 + ... + K_n)/M.  ``partial`` holds
    those sums and ``ratio`` = V_n / partial_n, which tends to 1/M.
    ``partial_no_v1`` drops the V_1 term (the telescoped form with V_1 = 0)
    for comparison; it tends to -V_1 rather than to zero.
    """
    sol = sol if sol is not None and sol.Q >= Q else renewal_solution(p, Q)
    V = deviation_seq(p, Q, "01", sol)
    K = _k_terms(p, sol, Q)
    G = K.copy()
    G[1], G[2] = V[1], V[2]
    partial = np.cumsum(G)
    partial_no_v1 = partial - V[1]
    partial[0] = partial_no_v1[:2] = np.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = V / partial
    return {
        "V": V,
        "partial": partial,
        "partial_no_v1": partial_no_v1,
        "ratio": ratio,
        "inv_M": 1.0 / limit_K(p, min(Q, 1000)).M,
        "V1": float(V[1]),
    }


@dataclass(frozen=True)
class DecayReport:
    gamma: float
    delta: float
    Q: int
    window: tuple[float, float]
    slope_V01: float
    r2_V01: float
    claimed_V01: float
    slope_V10: float
    r2_V10: float
    claimed_V10: float
    slope_corr: float
    r2_corr: float
    claimed_corr: float
    V1: float
    findings: list

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=False,
                          default=lambda v: float(v))


def decay_report(p: Params, Q: int = 10**5, window: tuple[float, float] = (1e3, 1e4),
                 tol_V: float = 0.2, tol_corr: float = 0.25,
                 sol: RenewalSolution | None = None) -> DecayReport:
    """Fit decay exponents and record any disagreement with claimed exponents."""
    _require_probability(p)
    sol = sol if sol is not None and sol.Q >= Q else renewal_solution(p, Q)
    q = np.arange(Q + 1, dtype=float)
    v01 = deviation_seq(p, Q, "01", sol)
    v10 = deviation_seq(p, Q, "10", sol)
    corr = correlation_series(p, Q, sol)
    f01, _ = _signed_fit(q, v01, window)
    f10, _ = _signed_fit(q, v10, window)
    fc, _ = _signed_fit(q, corr, window)
    claims = {
        "V01": (f01, 2 - p.gamma, tol_V),
        "V10": (f10, 3 - p.delta - p.gamma, tol_V),
        "correlation": (fc, 2 - p.delta, tol_corr),
    }
    findings = []
    for name, (fit, claim, tol) in claims.items():
        if abs(fit.slope - claim) > tol:
            findings.append({
                "quantity": name,
                "claimed_exponent": claim,
                "measured_exponent": fit.slope,
                "r_squared": fit.r_squared,
                "note": "measured exponent differs from the claimed one; the claimed "
                        "exponents for the deviation sequences are mutually inconsistent",
            })
    return DecayReport(p.gamma, p.delta, Q, tuple(window),
                       f01.slope, f01.r_squared, 2 - p.gamma,
                       f10.slope, f10.r_squared, 3 - p.delta - p.gamma,
                       fc.slope, fc.r_squared, 2 - p.delta,
                       float(v01[1]), findings)


def to_csv(p: Params, Q: int, sol: RenewalSolution | None = None, stride: int = 1) -> str:
    sol = sol if sol is not None and sol.Q >= Q else renewal_solution(p, Q)
    corr = correlation_series(p, Q, sol)
    v01 = deviation_seq(p, Q, "01", sol)
    v10 = deviation_seq(p, Q, "10", sol)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["q", "correlation", "V01", "V10"])
    for k in range(1, Q + 1, stride):
        wr.writerow([k, "%.15e" % corr[k], "%.15e" % v01[k], "%.15e" % v10[k]])
    return buf.getvalue()
