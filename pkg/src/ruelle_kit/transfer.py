"""Brute-force powers of the transfer operator over the preimage tree.

L^n f(y) = sum over words w of length n of exp(S_n f_pot(w y)) f(w y).
The tree is expanded level by level from y.  Each node carries the leading
symbol and the first two run lengths of its point, which is all the
potentials here depend on, plus the prepended bits for evaluating f.
Zero-weight branches (the Jacobian vanishes at 10^inf and 01^inf) are pruned;
this does not change the sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .eigen import INF_RUN, EigenSystem, hurwitz_table, jacobian_array
from .errors import BudgetError, ClassificationError, DomainError, MassLookupError
from .model import INF, Params, Word, parse_word, potential_array

__all__ = [
    "Potential",
    "JacobianPotential",
    "GibbsPotential",
    "ConstantPotential",
    "LeafTable",
    "apply_power_bruteforce",
    "finite_volume_prob",
    "dlr_residual",
    "BernoulliMeasure",
    "InvariantMeasure",
    "MAX_DEPTH",
]

MAX_DEPTH = 24
_FULL_EXPAND = 1 << 20


class Potential(Protocol):
    def weights(self, sym: np.ndarray, run1: np.ndarray, run2: np.ndarray) -> np.ndarray:
        """exp(potential) at points with the given two-run data."""


@dataclass(frozen=True)
class JacobianPotential:
    """log J for the double Hofbauer model at beta = 1."""

    params: Params

    def __post_init__(self) -> None:
        if self.params.beta != 1:
            raise DomainError("the Jacobian potential needs beta = 1")

    def weights(self, sym, run1, run2):
        return jacobian_array(self.params, sym, run1, run2)


@dataclass(frozen=True)
class GibbsPotential:
    """beta * g for the double Hofbauer model."""

    params: Params

    def weights(self, sym, run1, run2):
        run = np.where(run1 >= INF_RUN, np.inf, run1.astype(float))
        return np.exp(potential_array(self.params, sym, run))


@dataclass(frozen=True)
class ConstantPotential:
    """Constant potential log(value); value 1/2 gives the fair coin."""

    value: float = 0.5

    def weights(self, sym, run1, run2):
        return np.full(np.shape(run1), self.value)


@dataclass
class LeafTable:
    """Per-leaf data of an expanded tree (only nonzero-weight leaves)."""

    words: np.ndarray  # prepended bits, first symbol most significant
    weights: np.ndarray
    n: int

    def word(self, i: int) -> str:
        return format(int(self.words[i]), f"0{self.n}b") if self.n else ""


def _point_state(y: Word) -> tuple[int, int, int]:
    if not y.is_infinite:
        raise ClassificationError(f"evaluation point must be an infinite word, got {y}")
    runs = y.runs(2)
    sym, r1, _ = runs[0]
    if r1 == INF:
        return sym, int(INF_RUN), 0
    r2 = runs[1][1]
    return sym, int(r1), int(INF_RUN) if r2 == INF else int(r2)


def _expand(pot: Potential, sym, r1, r2, wt, code, level: int, prune: bool):
    """Prepend one symbol to every node."""
    out = []
    for a in (0, 1):
        same = sym == a
        ns = np.full(sym.shape, a, dtype=np.int8)
        n1 = np.where(same, np.where(r1 >= INF_RUN, r1, r1 + 1), 1)
        n2 = np.where(same, r2, r1)
        nw = wt * pot.weights(ns, n1, n2)
        nc = code | (np.uint64(a) << np.uint64(level))
        out.append((ns, n1, n2, nw, nc))
    sym, r1, r2, wt, code = (np.concatenate([o[i] for o in out]) for i in range(5))
    if prune:
        keep = wt != 0.0
        if not np.all(keep):
            sym, r1, r2, wt, code = sym[keep], r1[keep], r2[keep], wt[keep], code[keep]
    return sym, r1, r2, wt, code


def _make_f(f, y: Word, n: int) -> Callable:
    if f is None:
        return lambda code, sym, r1, r2: np.ones(code.shape)
    if isinstance(f, str):
        f = parse_word(f)
    if isinstance(f, Word):
        if f.is_infinite:
            raise DomainError("indicator needs a finite cylinder word")
        c = f.prefix
        m = len(c)
        if m > n:
            tail = y.symbols(m - n)
            if tuple(c[n:]) != tuple(tail):
                return lambda code, sym, r1, r2: np.zeros(code.shape)
            c = c[:n]
            m = n
        target = 0
        for bit in c:
            target = (target << 1) | bit
        shift = np.uint64(n - m)
        mask = np.uint64((1 << m) - 1)
        tgt = np.uint64(target)
        return lambda code, sym, r1, r2: ((code >> shift) & mask == tgt).astype(float)
    if callable(f):
        return f
    raise DomainError("f must be None, a cylinder word or a callable")


def apply_power_bruteforce(pot: Potential, f, y: Word | str, n: int,
                           return_leaves: bool = False, prune: bool = True):
    """L^n f (y) by summing over all 2^n preimages of y.

    Parameters
    ----------
    pot : Potential
        Supplies exp(potential) from two-run point data.
    f : None, Word/str or callable
        None is the constant 1, a finite word is its cylinder indicator, and
        a callable receives (code, sym, run1, run2) arrays for the leaves.
    y : Word or str
        Infinite evaluation point.
    n : int
        Power, at most 24.
    """
    if isinstance(y, str):
        y = parse_word(y)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > MAX_DEPTH:
        raise BudgetError(f"brute force capped at depth {MAX_DEPTH}")
    if return_leaves and n > 20:
        raise BudgetError("leaf tables are limited to depth 20")
    s0, a0, b0 = _point_state(y)
    fe = _make_f(f, y, n)
    sym = np.array([s0], dtype=np.int8)
    r1 = np.array([a0], dtype=np.int64)
    r2 = np.array([b0], dtype=np.int64)
    wt = np.ones(1)
    code = np.zeros(1, dtype=np.uint64)

    def fold(sym, r1, r2, wt, code, level):
        while level < n and len(wt) * 2 <= _FULL_EXPAND:
            sym, r1, r2, wt, code = _expand(pot, sym, r1, r2, wt, code, level, prune)
            level += 1
        if level == n:
            vals = wt * fe(code, sym, r1, r2)
            return math.fsum(vals), (code, wt)
        half = len(wt) // 2 or 1
        total = 0.0
        for lo in range(0, len(wt), half):
            sl = slice(lo, lo + half)
            sub, _ = fold(*_expand(pot, sym[sl], r1[sl], r2[sl], wt[sl], code[sl], level, prune),
                          level + 1)
            total += sub
        return total, None

    total, leaves = fold(sym, r1, r2, wt, code, 0)
    if return_leaves:
        return total, LeafTable(leaves[0], leaves[1], n)
    return total


def finite_volume_prob(pot: Potential, y: Word | str, n: int, F: Word | str) -> float:
    """Finite-volume probability of cylinder F with boundary condition y.

    mu_n^y(F) = L^n(1_F)(sigma^n y) / L^n(1)(sigma^n y).
    """
    if isinstance(y, str):
        y = parse_word(y)
    z = y.shift(n)
    num = apply_power_bruteforce(pot, F, z, n)
    den = apply_power_bruteforce(pot, None, z, n)
    return num / den


# ---------------------------------------------------------------------------
# DLR identity


class BernoulliMeasure:
    """Product measure with P(0) = p0, the negative control for DLR checks."""

    def __init__(self, p0: float = 0.5):
        if not 0 < p0 < 1:
            raise DomainError("p0 must lie in (0, 1)")
        self.p0 = p0

    def mass(self, w: str) -> float:
        z = w.count("0")
        return self.p0**z * (1 - self.p0) ** (len(w) - z)

    __call__ = mass

    def run_masses(self, sym: int, r: np.ndarray) -> np.ndarray:
        pc = self.p0 if sym == 0 else 1 - self.p0
        return pc ** r * (1 - pc)

    def constant_mass(self, sym: int, k: int) -> float:
        pc = self.p0 if sym == 0 else 1 - self.p0
        return pc**k


class InvariantMeasure:
    """Normalized invariant measure phi*nu on cylinders, evaluated lazily."""

    def __init__(self, p: Params):
        self.es = EigenSystem(p)
        self.total = self.es.mu_total()
        self.p = p

    def mass(self, w: str) -> float:
        return self.es.mu_mass(w) / self.total

    __call__ = mass

    def run_masses(self, sym: int, r: np.ndarray) -> np.ndarray:
        """Masses of c^r cbar for an array of run lengths r."""
        r = np.asarray(r, dtype=np.int64)
        if self.es.critical:
            e = self.p.exponent(sym)
            t = hurwitz_table(e, int(r.max()))
            scale = 1.0 if sym == 0 else self.es.nu10 * self.es.b
            return scale * t[r] / self.total
        return np.array([self.mass(str(sym) * int(k) + str(1 - sym)) for k in r])

    def constant_mass(self, sym: int, k: int) -> float:
        return self.es._constant_mu(sym, k) / self.total


@dataclass(frozen=True)
class DLRResult:
    residual: float
    lhs: float
    rhs: float
    tail_bound: float


def _conditional_values(pot: Potential, a: tuple[int, ...], z_sym: int, z_run: np.ndarray,
                        z_run2: np.ndarray) -> np.ndarray:
    """L^n(1_a)(z) for points z with leading symbol z_sym and run lengths z_run.

    Only the branch with prefix a contributes, so the value is the product
    of the potential weights along the orbit of a z.
    """
    n = len(a)
    sym = np.full(z_run.shape, z_sym, dtype=np.int8)
    r1 = z_run.astype(np.int64)
    r2 = z_run2.astype(np.int64)
    val = np.ones(z_run.shape)
    for i in range(n - 1, -1, -1):
        c = a[i]
        same = sym == c
        n1 = np.where(same, np.where(r1 >= INF_RUN, r1, r1 + 1), 1)
        n2 = np.where(same, r2, r1)
        sym = np.full(z_run.shape, c, dtype=np.int8)
        r1, r2 = n1, n2
        val = val * pot.weights(sym, r1, r2)
    return val


def dlr_residual(pot: Potential, m, a: str, b: str, run_cut: int = 10**6) -> DLRResult:
    """|m(a b) - integral over [b] of L^n(1_a) dm| with n = |a|.

    For shift-invariant m this is the DLR consistency of m with the kernel
    defined by ``pot``.  L^n(1_a)(z) depends on z only through its leading
    symbol and run length, so the integral is the stored mass of [b] times a
    constant when b is not a constant word.  A constant b = c^k is split
    into the cylinders c^r cbar (r >= k); terms up to ``run_cut`` are summed
    and the remainder is replaced by its limit value times the mass of
    [c^{run_cut+1}].  ``tail_bound`` reports |v_cut - v_inf| times that mass.
    """
    if any(ch not in "01" for ch in a + b) or not b:
        raise DomainError("a must be a binary word and b a nonempty binary word")
    bits_a = tuple(int(ch) for ch in a)
    lhs = m.mass(a + b)
    if not bits_a:
        return DLRResult(abs(lhs - m.mass(b)), lhs, m.mass(b), 0.0)
    c = int(b[0])
    k = len(b) - len(b.lstrip(b[0]))
    if k < len(b):
        # leading run of z fixed by b; the second run is never needed
        v = _conditional_values(pot, bits_a, c, np.array([k]), np.array([0]))[0]
        rhs = v * m.mass(b)
        return DLRResult(abs(lhs - rhs), lhs, rhs, 0.0)
    if not hasattr(m, "run_masses"):
        raise MassLookupError("constant conditioning word needs run-refined masses")
    r = np.arange(k, run_cut + 1, dtype=np.int64)
    # second run after c^r is cbar^*, at least 1; it is only read if the
    # orbit starts a run of length one right before z, which needs r2 of z:
    # that never happens because prepending to z either extends z's run or
    # makes z's run the second run.
    vals = _conditional_values(pot, bits_a, c, r, np.ones_like(r))
    masses = m.run_masses(c, r)
    head = math.fsum(vals * masses)
    v_inf = _conditional_values(pot, bits_a, c, np.array([INF_RUN]), np.array([0]))[0]
    rest = m.constant_mass(c, run_cut + 1)
    rhs = head + v_inf * rest
    tail_bound = abs(vals[-1] - v_inf) * rest
    return DLRResult(abs(lhs - rhs), lhs, rhs, tail_bound)
