"""Eigenfunctions, eigenmeasures, invariant measures and the normalized Jacobian.

Conventions
-----------
* The eigenfunction is scaled so that it equals ``a_scale`` (default 1) at
  0^inf for beta < 1; on 0^n 1... it is a_scale * r_beta(n).
* The eigenmeasure is unnormalized with nu([01]) = 1.  Call
  :func:`build_measure_table` with ``normalize=True`` for probabilities.
* With s = gamma*beta and x = 1/lambda we use the identity
  r_beta(q) = q^s Phi(x, s, q), Phi the Lerch transcendent.  At
  beta = lambda = 1 this is q^gamma zeta(gamma, q).
"""

from __future__ import annotations

import itertools
import json
import math
import threading
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ClassificationError,
    DepthError,
    DivergenceError,
    DomainError,
    MassLookupError,
)
from .model import INF, Params, PointClass, Word, classify, parse_word, potential_value
from .pressure import solve_pressure_double
from .specfun import hurwitz_zeta, hurwitz_zeta_array, lerch_exp, polylog_exp, zeta

__all__ = [
    "INFINITE",
    "NotNormalizableWarning",
    "MeasureTable",
    "EigenSystem",
    "r_seq",
    "s_seq",
    "b_scale",
    "eigenfunction_value",
    "nu_cylinder",
    "mu_cylinder",
    "jacobian_value",
    "jacobian_array",
    "hurwitz_table",
    "selection_ratio",
    "build_measure_table",
    "eigen_residual",
    "eigenmeasure_discrepancy",
    "all_words",
]

INF_RUN = np.int64(2**62)
MAX_WORD_DEPTH = 100_000


class _InfiniteMarker:
    """Tag for the eigenfunction value +inf at the fixed points when beta = 1.

    Deliberately supports no arithmetic.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __float__(self):
        raise TypeError("INFINITE marker is not a float; branch on it explicitly")


INFINITE = _InfiniteMarker()


class NotNormalizableWarning(UserWarning):
    """The invariant measure at beta = 1 is infinite (some exponent <= 2)."""


# ---------------------------------------------------------------------------
# Measure tables


def all_words(depth: int, min_depth: int = 1) -> list[str]:
    """All binary words of lengths min_depth..depth in shortlex order."""
    out = []
    for n in range(min_depth, depth + 1):
        out.extend("".join(b) for b in itertools.product("01", repeat=n))
    return out


@dataclass
class MeasureTable:
    """Finite map from cylinder words to masses.

    Lookups of words missing from the table fall back to the sum of the two
    one-symbol refinements when those are derivable.
    """

    entries: dict[str, float]
    normalized: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k, v in self.entries.items():
            if v < 0 or math.isnan(v):
                raise DomainError(f"negative or NaN mass for {k}")

    @property
    def total(self) -> float:
        if "0" in self.entries and "1" in self.entries:
            return self.entries["0"] + self.entries["1"]
        return self.mass("0") + self.mass("1")

    @property
    def max_depth(self) -> int:
        return max((len(k) for k in self.entries), default=0)

    def mass(self, w: Word | str) -> float:
        key = w if isinstance(w, str) else w.literal()
        if key in self.entries:
            return self.entries[key]
        if len(key) >= self.max_depth:
            raise MassLookupError(f"no mass for cylinder {key}")
        return self.mass(key + "0") + self.mass(key + "1")

    __call__ = mass

    def __getitem__(self, key: str) -> float:
        return self.mass(key)

    def __contains__(self, key: str) -> bool:
        try:
            self.mass(key)
        except MassLookupError:
            return False
        return True

    def normalize(self) -> "MeasureTable":
        z = self.total
        return MeasureTable({k: v / z for k, v in self.entries.items()}, True, dict(self.params))

    def additivity_residual(self) -> float:
        """max |m(w) - m(w0) - m(w1)| over stored levels."""
        worst = 0.0
        for k, v in self.entries.items():
            a, b = k + "0", k + "1"
            if a in self.entries and b in self.entries:
                worst = max(worst, abs(v - self.entries[a] - self.entries[b]))
        return worst

    def to_json(self) -> str:
        keys = sorted(self.entries, key=lambda k: (len(k), k))
        payload = {
            "params": self.params,
            "normalized": self.normalized,
            "entries": {k: self.entries[k] for k in keys},
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "MeasureTable":
        d = json.loads(text)
        return cls({k: float(v) for k, v in d["entries"].items()}, bool(d["normalized"]), d.get("params", {}))


# ---------------------------------------------------------------------------
# Hurwitz tables at beta = 1


_table_lock = threading.Lock()
_tables: dict[float, np.ndarray] = {}


def hurwitz_table(exponent: float, qmax: int) -> np.ndarray:
    """Array T with T[q] = zeta(exponent, q) for 1 <= q <= qmax (T[0] unused)."""
    with _table_lock:
        t = _tables.get(exponent)
        if t is None or len(t) <= qmax:
            size = max(qmax + 1, 2 * len(t) if t is not None else 1024)
            q = np.arange(1, size, dtype=float)
            t = np.empty(size)
            t[0] = math.nan
            t[1:] = hurwitz_zeta_array(exponent, q)
            _tables[exponent] = t
        return t


# ---------------------------------------------------------------------------
# Eigen data for one parameter point


class EigenSystem:
    """Eigenvalue, eigenfunction and eigenmeasure of beta*g at fixed Params.

    ``pressure`` (log lambda) is solved when not given.  Values are cached
    per instance; instances are safe to share between threads.
    """

    def __init__(self, p: Params, pressure: float | None = None, a_scale: float = 1.0):
        if p.beta <= 0:
            raise DomainError("beta must be positive")
        self.p = p
        if pressure is None:
            pressure = solve_pressure_double(p).pressure if p.beta < 1 else 0.0
        if pressure < 0:
            raise DomainError("pressure must be nonnegative")
        self.mu = float(pressure)
        self.lam = math.exp(self.mu)
        self.a = float(a_scale)
        s0, s1 = p.gamma * p.beta, p.delta * p.beta
        if self.mu == 0.0 and (s0 <= 1 or s1 <= 1):
            raise DivergenceError("eigen series diverge at lambda = 1 with exponent*beta <= 1")
        self._s = (s0, s1)
        self._lock = threading.Lock()
        # Li_{gamma beta}(1/lambda) / zeta(gamma)^beta
        self.f1 = polylog_exp(s0, self.mu) / zeta(p.gamma) ** p.beta
        self.b = self.a * self.f1
        # nu(10) relative to nu(01) = 1
        self.nu10 = polylog_exp(s0, self.mu) / zeta(p.delta) ** p.beta
        self._const_cache: dict[tuple[int, int], float] = {}

    # -- building blocks --------------------------------------------------

    @property
    def critical(self) -> bool:
        return self.mu == 0.0

    def lerch(self, symbol: int, q: int) -> float:
        """Phi(1/lambda, exponent*beta, q)."""
        s = self._s[symbol]
        if self.mu == 0.0:
            return hurwitz_zeta(s, q)
        return lerch_exp(s, self.mu, q)

    def run_series(self, symbol: int, q: int) -> float:
        """r_beta(q) for symbol 0, s_beta(q) for symbol 1."""
        if q < 1:
            raise DomainError("run length starts at 1")
        return q ** self._s[symbol] * self.lerch(symbol, q)

    def base_nu(self, symbol: int, q: int) -> float:
        """nu of the cylinder c^q cbar."""
        scale = 1.0 if symbol == 0 else self.nu10
        return scale * q ** (-self._s[symbol]) * math.exp(-self.mu * (q - 1))

    def constant_nu(self, symbol: int, n: int) -> float:
        """nu of the cylinder c^n: sum over q >= n of nu(c^q cbar)."""
        key = (symbol, n)
        with self._lock:
            v = self._const_cache.get(key)
        if v is None:
            scale = 1.0 if symbol == 0 else self.nu10
            v = scale * math.exp(-self.mu * (n - 1)) * self.lerch(symbol, n)
            with self._lock:
                self._const_cache[key] = v
        return v

    # -- eigenfunction ----------------------------------------------------

    def phi(self, c: PointClass | Word | str):
        if not isinstance(c, PointClass):
            c = classify(c)
        sym = c.leading_symbol
        if c.leading_run == INF:
            if self.critical:
                return INFINITE
            return self.a if sym == 0 else self.b
        n = c.require_leading()
        scale = self.a if sym == 0 else self.b
        return scale * self.run_series(sym, int(n))

    # -- eigenmeasure ----------------------------------------------------

    def nu(self, w: Word | str) -> float:
        """nu of a finite cylinder by pulling back through the eigen-relation.

        lambda nu(c w') = integral over [w'] of exp(beta g(c x)) dnu(x); when
        w' does not consist of c's only the integrand is constant.
        """
        bits = _bits(w)
        if len(bits) > MAX_WORD_DEPTH:
            raise DepthError(f"word longer than {MAX_WORD_DEPTH}")
        log_factor = 0.0
        i = 0
        n = len(bits)
        while True:
            rest = bits[i:]
            c = rest[0]
            if all(b == c for b in rest):
                return math.exp(log_factor) * self.constant_nu(c, len(rest))
            k = 0
            while rest[1 + k] == c:
                k += 1
            log_factor += -self.mu + potential_value(self.p, PointClass(c, 1 + k))
            i += 1
            if i >= n:  # pragma: no cover - loop always ends on a constant word
                raise DepthError("pull-back did not terminate")

    # -- invariant measure ----------------------------------------------

    def _constant_mu(self, symbol: int, n: int) -> float:
        scale = self.a if symbol == 0 else self.nu10 * self.b
        s = self._s[symbol]
        if self.critical:
            if s <= 2:
                warnings.warn("invariant measure is infinite for exponent <= 2 at beta = 1",
                              NotNormalizableWarning, stacklevel=3)
                return math.inf
            # sum_{q>=n} zeta(s, q) = zeta(s-1, n) - (n-1) zeta(s, n)
            return scale * (hurwitz_zeta(s - 1.0, n) - (n - 1) * hurwitz_zeta(s, n))
        # sum_{q>=n} x^{q-1} Phi(x, s, q) = x^{n-1}[Phi(x, s-1, n) - (n-1) Phi(x, s, n)]
        x_pow = math.exp(-self.mu * (n - 1))
        return scale * x_pow * (lerch_exp(s - 1.0, self.mu, n) - (n - 1) * lerch_exp(s, self.mu, n))

    def mu_mass(self, w: Word | str) -> float:
        """Unnormalized mass of the invariant measure phi*nu on a cylinder."""
        bits = _bits(w)
        c = bits[0]
        if all(b == c for b in bits):
            return self._constant_mu(c, len(bits))
        k = 1
        while bits[k] == c:
            k += 1
        phi = self.phi(PointClass(c, k))
        return phi * self.nu(bits)

    def mu_total(self) -> float:
        return self._constant_mu(0, 1) + self._constant_mu(1, 1)


def _bits(w: Word | str | tuple) -> tuple[int, ...]:
    if isinstance(w, tuple):
        return w
    if isinstance(w, str):
        w = parse_word(w)
    if w.is_infinite:
        raise DomainError("cylinder word expected, got an infinite point")
    return w.prefix


@lru_cache(maxsize=64)
def _system(p: Params, pressure: float | None = None) -> EigenSystem:
    return EigenSystem(p, pressure)


def _system_for(p: Params, lam: float | None) -> EigenSystem:
    if lam is None:
        return _system(p)
    if lam < 1:
        raise DomainError("lambda must be >= 1")
    return _system(p, math.log(lam) if lam != 1.0 else 0.0)


# ---------------------------------------------------------------------------
# Public functional API


def r_seq(gamma: float, beta: float, lam: float, q: int) -> float:
    """1 + q^{gamma beta} sum_{n>=2} (n+q-1)^{-gamma beta} lam^{-(n-1)}."""
    s = gamma * beta
    if q < 1:
        raise DomainError("q must be >= 1")
    if lam < 1:
        raise DomainError("lambda must be >= 1")
    if lam == 1.0:
        if s <= 1:
            raise DivergenceError("r series diverges for gamma*beta <= 1 at lambda = 1")
        return q**s * hurwitz_zeta(s, q)
    return q**s * lerch_exp(s, math.log(lam), q)


def s_seq(delta: float, beta: float, lam: float, q: int) -> float:
    """Same series as :func:`r_seq` with the exponent delta."""
    return r_seq(delta, beta, lam, q)


def b_scale(p: Params, lam: float | None = None, a_scale: float = 1.0) -> float:
    """Eigenfunction value at 1^inf relative to a_scale at 0^inf."""
    return a_scale * _system_for(p, lam).f1


def eigenfunction_value(p: Params, lam: float | None, c: PointClass | Word | str,
                        a_scale: float = 1.0):
    es = _system_for(p, lam)
    v = es.phi(c)
    if v is INFINITE:
        return v
    return a_scale * v


def nu_cylinder(p: Params, lam: float | None, w: Word | str) -> float:
    """Unnormalized eigenmeasure of a cylinder, with nu([01]) = 1."""
    return _system_for(p, lam).nu(w)


def mu_cylinder(p: Params, w: Word | str, lam: float | None = None) -> float:
    """Unnormalized invariant measure phi*nu of a cylinder (mu([01]) = r(1))."""
    es = _system_for(p, lam)
    if es.critical and min(p.gamma, p.delta) <= 2:
        warnings.warn("beta = 1 with an exponent <= 2: invariant measure is not finite",
                      NotNormalizableWarning, stacklevel=2)
    return es.mu_mass(w)


def build_measure_table(p: Params, depth: int, kind: str = "mu", normalize: bool = True,
                        lam: float | None = None) -> MeasureTable:
    """Masses of every cylinder of length 1..depth."""
    es = _system_for(p, lam)
    if kind == "mu":
        f = es.mu_mass
    elif kind == "nu":
        f = es.nu
    else:
        raise DomainError("kind must be 'mu' or 'nu'")
    entries = {w: f(w) for w in all_words(depth)}
    params = p.as_dict() | {"pressure": es.mu, "kind": kind}
    table = MeasureTable(entries, False, params)
    return table.normalize() if normalize else table


# ---------------------------------------------------------------------------
# Jacobian at beta = 1


def jacobian_value(p: Params, c: PointClass | Word | str) -> float:
    """Normalized Jacobian J = e^g phi / (phi o sigma) at beta = 1.

    With T_e(q) = zeta(e, q): J = T_gamma(n)/T_gamma(n-1) on L_n (n >= 2),
    J = m^{-delta}/T_delta(m) on 0 1^m 0..., J = m^{-gamma}/T_gamma(m) on
    1 0^m 1..., symmetric formulas for the other symbol, J = 1 at the two
    fixed points and J = 0 at 01^inf and 10^inf.
    """
    if p.beta != 1:
        raise DomainError("the Jacobian is defined at beta = 1")
    if not isinstance(c, PointClass):
        c = classify(c)
    if c.leading_run == INF:
        return 1.0
    n = c.require_leading()
    sym = c.leading_symbol
    if n >= 2:
        e = p.exponent(sym)
        return hurwitz_zeta(e, n) / hurwitz_zeta(e, n - 1)
    m = c.require_second()
    if m == INF:
        return 0.0
    e = p.exponent(1 - sym)
    return m ** (-e) / hurwitz_zeta(e, m)


def jacobian_array(p: Params, sym: np.ndarray, run1: np.ndarray, run2: np.ndarray) -> np.ndarray:
    """Vectorized :func:`jacobian_value`; infinite runs are ``INF_RUN``.

    ``run2`` is only read where ``run1 == 1``.
    """
    sym = np.asarray(sym)
    run1 = np.asarray(run1, dtype=np.int64)
    run2 = np.asarray(run2, dtype=np.int64)
    out = np.ones(run1.shape)
    fin1 = run1 < INF_RUN
    many = fin1 & (run1 >= 2)
    one = fin1 & (run1 == 1)
    if np.any(one & (run2 <= 0)):
        raise ClassificationError("second run needed but unresolved")
    need = 2
    if np.any(many):
        need = max(need, int(run1[many].max()))
    if np.any(one & (run2 < INF_RUN)):
        need = max(need, int(run2[one & (run2 < INF_RUN)].max()))
    tg = hurwitz_table(p.gamma, need)
    td = hurwitz_table(p.delta, need)
    for s_val, table in ((0, tg), (1, td)):
        sel = many & (sym == s_val)
        if np.any(sel):
            n = run1[sel]
            out[sel] = table[n] / table[n - 1]
    one_inf = one & (run2 >= INF_RUN)
    out[one_inf] = 0.0
    for s_val, table, e in ((0, td, p.delta), (1, tg, p.gamma)):
        sel = one & (run2 < INF_RUN) & (sym == s_val)
        if np.any(sel):
            m = run2[sel].astype(float)
            out[sel] = m ** (-e) / table[run2[sel]]
    return out


# ---------------------------------------------------------------------------
# Diagnostics


def selection_ratio(p: Params, n: int, lam: float | None = None) -> float:
    """mu_beta(1^n 0) / mu_beta(0^n 1) for beta < 1."""
    if not (1 < p.delta <= p.gamma < 2):
        raise DomainError("selection ratio needs 1 < delta <= gamma < 2")
    if not p.beta < 1:
        raise DomainError("selection ratio needs beta < 1")
    es = _system_for(p, lam)
    if p.symmetric:
        return 1.0
    return es.mu_mass("1" * n + "0") / es.mu_mass("0" * n + "1")


def eigen_residual(es: EigenSystem, w: str, run_cut: int = 4000) -> float:
    """|lambda^{-1} integral L(1_w) dnu - nu(w)| for a cylinder word.

    The integral is assembled independently of the pull-back: when the
    integrand exp(beta g(c x)) is not constant on [sigma w] the cylinder is
    split by the leading run of x, summed explicitly up to ``run_cut`` and
    closed with a Lerch tail.
    """
    bits = _bits(w)
    c = bits[0]
    rest = bits[1:]
    lam_inv = math.exp(-es.mu)

    def weight(run: int) -> float:
        return math.exp(potential_value(es.p, PointClass(c, run)))

    def run_sum(sym: int, start: int, shift: int) -> float:
        # sum_{r>=start} exp(beta g(c, r + shift)) nu(sym^r symbar), shift in {0, 1}
        r = np.arange(start, run_cut + 1, dtype=float)
        s = es._s[sym]
        scale = 1.0 if sym == 0 else es.nu10
        if shift:
            e = es.p.exponent(c) * es.p.beta
            head = math.fsum(scale * np.exp(-e * np.log((r + 1) / r) - s * np.log(r) - es.mu * (r - 1)))
            # exp(beta g(c, r+1)) nu(c^r cbar) = scale (r+1)^{-s} x^{r-1}
            tail = scale * math.exp(-es.mu * run_cut) * (
                lerch_exp(s, es.mu, run_cut + 2) if es.mu > 0 else hurwitz_zeta(s, run_cut + 2))
        else:
            head = math.fsum(scale * np.exp(-s * np.log(r) - es.mu * (r - 1)))
            tail = scale * math.exp(-es.mu * run_cut) * (
                lerch_exp(s, es.mu, run_cut + 1) if es.mu > 0 else hurwitz_zeta(s, run_cut + 1))
        return head + tail

    if not rest:
        integral = weight(1) * run_sum(1 - c, 1, 0) + run_sum(c, 1, 1)
    elif all(b == c for b in rest):
        integral = run_sum(c, len(rest), 1)
    elif all(b == 1 - c for b in rest):
        integral = weight(1) * run_sum(1 - c, len(rest), 0)
    else:
        k = 0
        while rest[k] == c:
            k += 1
        integral = weight(1 + k) * es.nu(rest)
    return abs(lam_inv * integral - es.nu(bits))


def eigenmeasure_discrepancy(p: Params) -> dict:
    """Compare additivity masses of [0], [1] at beta = 1 with the alternative closed forms.

    The alternative forms solve nu(0) = nu(1)/zeta(gamma) + zeta(gamma) - 1
    and nu(1) = nu(0)/zeta(delta) + zeta(delta) - 1, which presume
    nu([01]) = nu([10]) = 1 simultaneously; they agree with the additivity
    values only when gamma = delta.
    """
    es = _system(p.with_beta(1.0), 0.0)
    zg, zd = zeta(p.gamma), zeta(p.delta)
    add0 = es.constant_nu(0, 1)
    add1 = es.constant_nu(1, 1)
    cf0 = (zd / zg - 1 / zg + zg - 1) / (1 - 1 / (zg * zd))
    cf1 = (zg / zd - 1 / zd + zd - 1) / (1 - 1 / (zg * zd))
    tot_a, tot_c = add0 + add1, cf0 + cf1
    return {
        "additivity_nu0": add0,
        "additivity_nu1": add1,
        "closed_form_nu0": cf0,
        "closed_form_nu1": cf1,
        "abs_diff_nu0": abs(add0 - cf0),
        "abs_diff_nu1": abs(add1 - cf1),
        "normalized_additivity_nu0": add0 / tot_a,
        "normalized_closed_form_nu0": cf0 / tot_c,
        "normalized_diff_nu0": abs(add0 / tot_a - cf0 / tot_c),
    }
