"""Renewal equations for the thermodynamic limit of the Jacobian kernel.

With J the normalized Jacobian of the double Hofbauer potential at beta = 1,
write

    A(q) = L^q(I_[0])(10...),      B(q) = L^q(I_[0])(01...).

Splitting the preimage tree at the last symbol change gives two mixed
recurrences

    B(q) = sum_{j<q} c_{q-j} A(j) + e_q,        A(q) = d_q + sum_{j<q} d_{q-j} B(j)

with c_k = k^-gamma/zeta(gamma), d_k = k^-delta/zeta(delta) and
e_q = zeta(gamma, q+1)/zeta(gamma).  Substituting one into the other yields
genuine renewal equations A = a + p*A and B = b + p*B with p = c*d,
a = d + d*e and b = e + c*d.

Boundaries with a longer leading run use the same A, B arrays:

    B^s_q = L^q(I_[0])(0^s 1...) = sum_{j<q} p^s_j A(q-j) + alpha^s_q
    C^s_q = L^q(I_[0])(1^s 0...) = d^s_q + sum_{j<q} d^s_j B(q-j)

where p^s_j = (s+j-1)^-gamma / zeta(gamma, s), alpha^s_q =
zeta(gamma, s+q)/zeta(gamma, s) and d^s_j = (s+j-1)^-delta / zeta(delta, s).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from .eigen import hurwitz_table
from .errors import DivergenceError, DomainError
from .model import INF, Params, Word, parse_word
from .specfun import beta_moment, hurwitz_zeta, zeta

__all__ = [
    "RenewalState",
    "RenewalSolution",
    "KResult",
    "p_term",
    "p_terms",
    "p_mass",
    "p_asymptotic_ratio",
    "source_terms",
    "source_arrays",
    "make_state",
    "solve_renewal",
    "renewal_solution",
    "mixed_recurrences",
    "conservation_residual",
    "limit_K",
    "limit_value",
    "solve_B_s",
    "solve_C_s",
    "p_s_mass",
    "boundary_value",
    "tl_value_for_boundary",
    "tl_trajectory",
    "to_csv",
]



def _require_critical(p: Params) -> None:
    if p.beta != 1:
        raise DomainError("renewal sequences are defined for beta = 1")


def _weights(p: Params, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """c[k], d[k], e[k] for 0 <= k <= n (index 0 is zero)."""
    k = np.arange(n + 1, dtype=float)
    k[0] = 1.0
    zg, zd = zeta(p.gamma), zeta(p.delta)
    c = k ** (-p.gamma) / zg
    d = k ** (-p.delta) / zd
    tg = hurwitz_table(p.gamma, n + 2)
    e = tg[1 : n + 2] / zg  # e[k] = zeta(gamma, k+1)/zeta(gamma)
    c[0] = d[0] = e[0] = 0.0
    return c, d, e.copy()


def _conv(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """First n+1 coefficients of the direct (exact-order) convolution."""
    return np.convolve(x[: n + 1], y[: n + 1])[: n + 1]


# ---------------------------------------------------------------------------
# p_q and the source sequences


def p_term(p: Params, q: int, form: str = "convolution") -> float:
    """Inter-renewal probability p_q.

    ``form='convolution'`` sums i^-delta j^-gamma over i + j = q with fsum;
    ``form='displayed'`` adds the terms left to right starting from
    (q-1)^-delta, in plain floating point.
    """
    _require_critical(p)
    if q < 1:
        raise DomainError("q must be >= 1")
    if q == 1:
        return 0.0
    zz = zeta(p.gamma) * zeta(p.delta)
    i = np.arange(1, q, dtype=float)
    terms = (q - i) ** (-p.delta) * i ** (-p.gamma)
    if form == "convolution":
        return math.fsum(terms) / zz
    if form == "displayed":
        acc = 0.0
        for t in terms:
            acc += t
        return acc / zz
    raise DomainError(f"unknown form {form!r}")


def p_terms(p: Params, Q: int) -> np.ndarray:
    """Array P with P[q] = p_q for 0 <= q <= Q (P[0] = P[1] = 0)."""
    _require_critical(p)
    c, d, _ = _weights(p, Q)
    return _conv(d, c, Q)


def p_mass(p: Params, Q: int) -> tuple[float, float]:
    """(sum_{q=2}^Q p_q, tail) with the tail computed from Hurwitz values.

    tail = sum_{i+j>Q} d_i c_j = sum_{i<Q} d_i zeta(gamma, Q-i+1)/zeta(gamma)
    + zeta(delta, Q)/zeta(delta).
    """
    P = p_terms(p, Q)
    head = math.fsum(P[2:])
    _, d, _ = _weights(p, Q)
    tg = hurwitz_table(p.gamma, Q + 1)
    i = np.arange(1, Q)
    tail = math.fsum(d[i] * tg[Q - i + 1]) / zeta(p.gamma) + hurwitz_zeta(p.delta, Q) / zeta(p.delta)
    return head, tail


def p_asymptotic_ratio(p: Params, q: int) -> dict:
    """Compare p_q with two candidate asymptotic laws.

    ``beta_law`` is p_q q^{gamma+delta-1} zeta(gamma)zeta(delta)/B(delta, gamma),
    the Riemann-sum constant of a pure convolution of two power laws.
    ``tail_law`` is p_q q^delta zeta(delta), the leading single-jump term.
    """
    pq = p_term(p, q)
    zz = zeta(p.gamma) * zeta(p.delta)
    return {
        "q": q,
        "p_q": pq,
        "beta_law": pq * q ** (p.gamma + p.delta - 1) * zz / beta_moment(p.delta, p.gamma),
        "tail_law": pq * q**p.delta * zeta(p.delta),
    }


def source_arrays(p: Params, Q: int) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) arrays of length Q+1 with index 0 unused."""
    _require_critical(p)
    c, d, e = _weights(p, Q)
    a = d + _conv(d, e, Q)
    b = e + _conv(c, d, Q)
    a[0] = b[0] = 0.0
    return a, b


def source_terms(p: Params, q: int, side: str) -> float:
    """a(q) or b(q) as a single value.

    a(q) = q^-delta/zeta(delta) + sum_{k=2}^{q} (q+1-k)^-delta/zeta(delta)
    * k^-gamma r(k)/zeta(gamma), and b(q) = sum_{k=1}^{q-1}
    (q-k)^-gamma k^-delta/(zeta(gamma)zeta(delta)) + (q+1)^-gamma r(q+1)/zeta(gamma),
    where k^-gamma r(k) = zeta(gamma, k).
    """
    _require_critical(p)
    if q < 1:
        raise DomainError("q must be >= 1")
    zg, zd = zeta(p.gamma), zeta(p.delta)
    k = np.arange(1, q, dtype=float)
    if side == "a":
        tg = hurwitz_table(p.gamma, q + 1)
        mid = math.fsum((q - k) ** (-p.delta) * tg[2 : q + 1]) / (zd * zg)
        return q ** (-p.delta) / zd + mid
    if side == "b":
        mid = math.fsum((q - k) ** (-p.gamma) * k ** (-p.delta)) / (zg * zd)
        return mid + hurwitz_zeta(p.gamma, q + 1) / zg
    raise DomainError("side must be 'a' or 'b'")


# ---------------------------------------------------------------------------
# Renewal state and solvers


@dataclass(frozen=True)
class RenewalState:
    """Inputs and (optionally) the solution of one renewal equation.

    Arrays have length Q+1; index 0 holds the q = 0 value (p[0] = 0,
    A[0] = 0) so that the equation reads A[q] = src[q] + sum_j A[j] p[q-j].
    """

    Q: int
    p: np.ndarray
    src: np.ndarray
    A: np.ndarray | None
    meta: Params

    def __post_init__(self) -> None:
        if self.Q < 1:
            raise DomainError("horizon Q must be >= 1")
        if len(self.p) != self.Q + 1 or len(self.src) != self.Q + 1:
            raise DomainError("arrays must have length Q+1")
        if self.p[1] != 0.0 or np.any(self.p < 0):
            raise DomainError("p must be nonnegative with p[1] = 0")
        if math.fsum(self.p) > 1 + 1e-12:
            raise DomainError("partial sums of p exceed 1")
        for arr in (self.p, self.src) + ((self.A,) if self.A is not None else ()):
            arr.setflags(write=False)

    def solved(self, fast: bool = False) -> "RenewalState":
        return RenewalState(self.Q, self.p, self.src, solve_renewal(self, fast=fast), self.meta)


def make_state(p: Params, Q: int, side: str = "a") -> RenewalState:
    if Q < 1:
        raise DomainError("horizon Q must be >= 1")
    a, b = source_arrays(p, Q)
    src = a if side == "a" else b if side == "b" else None
    if src is None:
        raise DomainError("side must be 'a' or 'b'")
    return RenewalState(Q, p_terms(p, Q), src, None, p)


def _forward(p: np.ndarray, src: np.ndarray, Q: int) -> np.ndarray:
    A = np.zeros(Q + 1)
    rp = p[::-1].copy()  # rp[Q - k] = p[k]
    for q in range(1, Q + 1):
        # sum_{j=1}^{q-1} A[j] p[q-j]; p[1] = 0 so j = q-1 drops out
        A[q] = src[q] + np.dot(A[1:q], rp[Q - q + 1 : Q])
    return A


def _relaxed(p: np.ndarray, src: np.ndarray, Q: int, leaf: int = 256) -> np.ndarray:
    """Divide-and-conquer online convolution with FFT cross terms."""
    A = np.zeros(Q + 1)
    acc = src.astype(float).copy()
    acc[0] = 0.0

    def solve(lo: int, hi: int) -> None:  # fills A[lo:hi]
        if hi - lo <= leaf:
            for q in range(lo, hi):
                if q == 0:
                    continue
                s = acc[q]
                j = np.arange(lo, q)
                if len(j):
                    s += np.dot(A[j], p[q - j])
                A[q] = s
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        # contributions of A[lo:mid] to targets in [mid, hi)
        seg = fftconvolve(A[lo:mid], p[: hi - lo])
        acc[mid:hi] += seg[mid - lo : hi - lo]
        solve(mid, hi)

    solve(0, Q + 1)
    return A


def solve_renewal(state: RenewalState, fast: bool = False) -> np.ndarray:
    """Solve A[q] = src[q] + sum_{j=1}^{q-1} A[j] p[q-j], A[0] = 0.

    The default forward recurrence is O(Q^2) with exact-order dot products.
    ``fast=True`` uses a divide-and-conquer scheme whose cross terms are FFT
    convolutions (O(Q log^2 Q)).
    """
    if state.Q < 1:
        raise DomainError("horizon Q must be >= 1")
    if fast:
        return _relaxed(np.asarray(state.p), np.asarray(state.src), state.Q)
    return _forward(np.asarray(state.p), np.asarray(state.src), state.Q)


@dataclass(frozen=True)
class RenewalSolution:
    """All renewal arrays for one parameter point up to horizon Q."""

    params: Params
    Q: int
    p: np.ndarray
    a: np.ndarray
    b: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def B_value(self, q: int) -> float:
        return 1.0 if q == 0 else float(self.B[q])


@lru_cache(maxsize=8)
def renewal_solution(p: Params, Q: int, fast: bool = False) -> RenewalSolution:
    _require_critical(p)
    P = p_terms(p, Q)
    a, b = source_arrays(p, Q)
    sa = RenewalState(Q, P, a, None, p)
    sb = RenewalState(Q, P, b, None, p)
    A = solve_renewal(sa, fast)
    B = solve_renewal(sb, fast)
    B[0] = 1.0  # L^0(I_[0])(01...) = 1
    for arr in (A, B):
        arr.setflags(write=False)
    return RenewalSolution(p, Q, P, a, b, A, B)


def mixed_recurrences(p: Params, Q: int) -> tuple[np.ndarray, np.ndarray]:
    """A and B from the coupled single-jump recurrences, evaluated directly."""
    _require_critical(p)
    c, d, e = _weights(p, Q)
    A = np.zeros(Q + 1)
    B = np.zeros(Q + 1)
    for q in range(1, Q + 1):
        j = np.arange(1, q)
        B[q] = e[q] + np.dot(c[q - j], A[j])
        A[q] = d[q] + np.dot(d[q - j], B[j])
    return A, B


def conservation_residual(p: Params, Q: int) -> float:
    """max_q |A(q) + Abar(q) - 1| where Abar solves the I_[1] recurrences.

    Abar(q) = L^q(I_[1])(10...) = f_q + sum_{m<q} d_m Bbar(q-m) with
    f_q = zeta(delta, q+1)/zeta(delta), and
    Bbar(q) = L^q(I_[1])(01...) = c_q + sum_{m<q} c_m Abar(q-m).
    """
    sol = renewal_solution(p, Q)
    c, d, _ = _weights(p, Q)
    td = hurwitz_table(p.delta, Q + 2)
    f = td[1 : Q + 2] / zeta(p.delta)
    Ab = np.zeros(Q + 1)
    Bb = np.zeros(Q + 1)
    for q in range(1, Q + 1):
        m = np.arange(1, q)
        Ab[q] = f[q] + np.dot(d[m], Bb[q - m])
        Bb[q] = c[q] + np.dot(c[m], Ab[q - m])
    return float(np.max(np.abs(sol.A[1:] + Ab[1:] - 1.0)))


# ---------------------------------------------------------------------------
# Limit


@dataclass(frozen=True)
class KResult:
    K: float
    numerator: float
    M: float
    numerator_direct: float
    sum_b_direct: float
    M_direct: float
    Q: int

    @property
    def numerator_gap(self) -> float:
        return abs(self.numerator - self.numerator_direct)


def limit_value(p: Params) -> float:
    """Closed-form K = zeta(gamma-1)/zeta(gamma) / M, without the direct sums."""
    _require_critical(p)
    if min(p.gamma, p.delta) <= 2:
        raise DivergenceError(
            f"M = sum q p_q diverges: needs gamma, delta > 2, got ({p.gamma}, {p.delta})"
        )
    num = zeta(p.gamma - 1) / zeta(p.gamma)
    return num / (num + zeta(p.delta - 1) / zeta(p.delta))


def limit_K(p: Params, Q: int = 10**5) -> KResult:
    """K = (sum_q a(q)) / M with M = sum_q q p_q.

    Closed forms: sum a = sum b = zeta(gamma-1)/zeta(gamma) and
    M = zeta(gamma-1)/zeta(gamma) + zeta(delta-1)/zeta(delta).  The direct
    values sum the arrays to Q and add the exact tails from Hurwitz values.
    M is finite exactly when both exponents exceed 2.
    """
    _require_critical(p)
    if min(p.gamma, p.delta) <= 2:
        raise DivergenceError(
            f"M = sum q p_q diverges: needs gamma, delta > 2, got ({p.gamma}, {p.delta})"
        )
    zg, zd = zeta(p.gamma), zeta(p.delta)
    num = zeta(p.gamma - 1) / zg
    M = num + zeta(p.delta - 1) / zd

    a, b = source_arrays(p, Q)
    c, d, e = _weights(p, Q)
    tg = hurwitz_table(p.gamma, Q + 2)
    td = hurwitz_table(p.delta, Q + 2)
    j = np.arange(1, Q + 1)

    def e_tail(n: int) -> float:
        # sum_{j>n} zeta(gamma, j+1)/zeta(gamma)
        return (hurwitz_zeta(p.gamma - 1, n + 2) - (n + 1) * hurwitz_zeta(p.gamma, n + 2)) / zg

    # sum_{q>Q} a(q) = sum_{q>Q} d_q + sum_{j<=Q} e_j D(Q-j) + sum_{j>Q} e_j
    D = td[Q - j + 1] / zd  # D(k) = sum_{m>k} d_m, k = Q-j >= 0
    a_tail = td[Q + 1] / zd + math.fsum(e[j] * D) + e_tail(Q)
    # sum_{q>Q} b(q) = sum_{j>Q} e_j + sum_{j<=Q} d_j Ctail(Q-j) + sum_{j>Q} d_j
    Ct = tg[Q - j + 1] / zg
    b_tail = e_tail(Q) + math.fsum(d[j] * Ct) + td[Q + 1] / zd
    num_direct = math.fsum(a[1:]) + a_tail
    b_direct = math.fsum(b[1:]) + b_tail

    # M = sum_i i d_i + sum_j j c_j; the direct path sums q p_q and adds the
    # tail sum_{q>Q} q p_q = sum_{i+j>Q} (i+j) d_i c_j via Hurwitz tails
    P = p_terms(p, Q)
    head = math.fsum(np.arange(Q + 1) * P)
    # i < Q: sum_{j>Q-i} (i+j) c_j = i*Ct(Q-i) + sum_{j>=Q-i+1} j c_j
    i = np.arange(1, Q)
    k = Q - i + 1
    tg1 = hurwitz_table(p.gamma - 1, Q + 2)
    tail = math.fsum(d[i] * (i * tg[k] + tg1[k])) / zg
    # i >= Q: every j contributes
    tail += hurwitz_zeta(p.delta - 1, Q) / zd + hurwitz_zeta(p.delta, Q) / zd * (zeta(p.gamma - 1) / zg)
    M_direct = head + tail
    return KResult(num / M, num, M, num_direct, b_direct, M_direct, Q)


# ---------------------------------------------------------------------------
# Longer leading runs


def _s_weights(exponent: float, s: int, n: int) -> np.ndarray:
    """w[j] = (s+j-1)^-exponent / zeta(exponent, s) for 0 <= j <= n (w[0] = 0)."""
    j = np.arange(n + 1, dtype=float)
    w = (s + j - 1.0) ** (-exponent) / hurwitz_zeta(exponent, s)
    w[0] = 0.0
    return w


def p_s_mass(p: Params, s: int, J: int) -> tuple[float, float]:
    """(sum_{j<=J} p^s_j, tail) with tail = zeta(gamma, s+J)/zeta(gamma, s)."""
    w = _s_weights(p.gamma, s, J)
    return math.fsum(w), hurwitz_zeta(p.gamma, s + J) / hurwitz_zeta(p.gamma, s)


def solve_B_s(p: Params, s: int, Q: int, sol: RenewalSolution | None = None) -> np.ndarray:
    """B^s_q = L^q(I_[0])(0^s 1...) for 0 <= q <= Q."""
    if s < 1:
        raise DomainError("s must be >= 1")
    if s == 1:
        sol = sol or renewal_solution(p, Q)
        return np.array(sol.B[: Q + 1])
    if sol is None or sol.Q < Q:
        sol = renewal_solution(p, Q)
    w = _s_weights(p.gamma, s, Q)
    zs = hurwitz_zeta(p.gamma, s)
    tg = hurwitz_table(p.gamma, s + Q)
    alpha = tg[s : s + Q + 1] / zs
    conv = _conv(w, np.asarray(sol.A), Q)
    out = alpha + conv
    out[0] = 1.0
    return out


def solve_C_s(p: Params, s: int, Q: int, sol: RenewalSolution | None = None) -> np.ndarray:
    """C^s_q = L^q(I_[0])(1^s 0...) for 0 <= q <= Q."""
    if s < 1:
        raise DomainError("s must be >= 1")
    if sol is None or sol.Q < Q:
        sol = renewal_solution(p, Q)
    if s == 1:
        return np.array(sol.A[: Q + 1])
    w = _s_weights(p.delta, s, Q)
    Bv = np.array(sol.B[: Q + 1])
    out = w + _conv(w, Bv, Q) - w * Bv[0]  # j = q term uses the d^s_q source, not B(0)
    out[0] = 0.0
    return out


def boundary_value(p: Params, symbol: int, run: float, q: int,
                   sol: RenewalSolution | None = None) -> float:
    """L^q(I_[0])(z) for z with the given leading symbol and run length."""
    if run == INF:
        return 1.0 if symbol == 0 else 0.0
    run = int(run)
    if q == 0:
        return 1.0 if symbol == 0 else 0.0
    if sol is None or sol.Q < q:
        sol = renewal_solution(p, q)
    m = np.arange(1, q)
    if symbol == 0:
        if run == 1:
            return float(sol.B[q])
        w = _s_weights(p.gamma, run, q)
        alpha = hurwitz_zeta(p.gamma, run + q) / hurwitz_zeta(p.gamma, run)
        return alpha + float(np.dot(w[m], np.asarray(sol.A)[q - m]))
    if run == 1:
        return float(sol.A[q])
    w = _s_weights(p.delta, run, q)
    return float(w[q] + np.dot(w[m], np.asarray(sol.B)[q - m]))


def _as_word(y) -> Word:
    w = parse_word(y) if isinstance(y, str) else y
    if not isinstance(w, Word) or not w.is_infinite:
        raise DomainError(f"boundary must be an eventually periodic infinite word, got {y!r}")
    return w


def tl_value_for_boundary(p: Params, y, cyl: str = "0", q: int | None = None,
                          sol: RenewalSolution | None = None) -> float:
    """Thermodynamic limit (q=None) or finite-horizon value mu_q^y([cyl]).

    Only the cylinders [0] and [1] are supported.  The limit is 1 for 0^inf,
    0 for 1^inf and K for every other eventually periodic boundary.
    """
    w = _as_word(y)
    if cyl not in ("0", "1"):
        raise DomainError("cyl must be '0' or '1'")
    if q is None:
        tail = w.shift(len(w.prefix))
        sym, run, _ = tail.runs(1)[0]
        if run == INF:
            v = 1.0 if sym == 0 else 0.0
        else:
            v = limit_value(p)
    else:
        sym, run, _ = w.shift(q).runs(1)[0]
        v = boundary_value(p, sym, run, q, sol)
    return v if cyl == "0" else 1.0 - v


def tl_trajectory(p: Params, y, Q: int, sol: RenewalSolution | None = None) -> np.ndarray:
    """mu_q^y([0]) = L^q(I_[0])(sigma^q y) for q = 0..Q."""
    w = _as_word(y)
    if sol is None or sol.Q < Q:
        sol = renewal_solution(p, Q)
    out = np.empty(Q + 1)
    for q in range(Q + 1):
        sym, run, _ = w.shift(q).runs(1)[0]
        out[q] = boundary_value(p, sym, run, q, sol)
    return out


def to_csv(sol: RenewalSolution) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["q", "p_q", "a_q", "b_q", "A_q", "B_q"])
    for q in range(1, sol.Q + 1):
        wr.writerow([q] + ["%.15e" % v for v in (sol.p[q], sol.a[q], sol.b[q], sol.A[q], sol.B[q])])
    return buf.getvalue()
