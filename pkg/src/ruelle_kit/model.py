"""Binary shift space, two-run point classes and the double Hofbauer potential.

Points and cylinders are both represented by :class:`Word`.  A word is a
finite prefix optionally followed by a periodic tail repeated forever.
A word without a tail stands for the cylinder of all points starting
with the prefix.

The potential depends on a point only through its leading run (symbol and
length); the normalized Jacobian additionally looks at the second run when
the leading run has length one.  :class:`PointClass` stores exactly that
information.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import ClassificationError, DomainError, MassLookupError
from .specfun import zeta

INF = math.inf

__all__ = [
    "INF",
    "Params",
    "Word",
    "PointClass",
    "WaltersData",
    "RenormReport",
    "parse_word",
    "classify",
    "potential_value",
    "potential_array",
    "walters_data",
    "renormalize",
    "extend_two_sided",
]


@dataclass(frozen=True)
class Params:
    """Model parameters: flatness exponents at 0^inf and 1^inf, inverse temperature."""

    gamma: float
    delta: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("gamma", "delta", "beta"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or math.isnan(v):
                raise DomainError(f"{name} must be a real number")
        if not self.gamma > 1:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.delta > 1:
            raise DomainError(f"delta must exceed 1, got {self.delta}")
        if self.delta > self.gamma:
            raise DomainError(f"expected delta <= gamma, got delta={self.delta} > gamma={self.gamma}")
        if self.beta < 0:
            raise DomainError(f"beta must be nonnegative, got {self.beta}")

    def with_beta(self, beta: float) -> "Params":
        return Params(self.gamma, self.delta, beta)

    @property
    def symmetric(self) -> bool:
        return self.gamma == self.delta

    def exponent(self, symbol: int) -> float:
        """Flatness exponent governing runs of ``symbol``."""
        return self.gamma if symbol == 0 else self.delta

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "delta": self.delta, "beta": self.beta}


# ---------------------------------------------------------------------------
# Words


def _primitive(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class Word:
    """Finite cylinder word, or an eventually periodic point.

    ``cycle`` is ``None`` for a finite cylinder.  Otherwise the point is
    ``prefix`` followed by ``cycle`` repeated forever.  Infinite words are
    normalized (primitive cycle, shortest prefix) so that equal points
    compare equal.
    """

    prefix: tuple[int, ...]
    cycle: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        prefix = tuple(int(b) for b in self.prefix)
        if any(b not in (0, 1) for b in prefix):
            raise DomainError("words are over the alphabet {0, 1}")
        cycle = self.cycle
        if cycle is not None:
            cycle = tuple(int(b) for b in cycle)
            if not cycle or any(b not in (0, 1) for b in cycle):
                raise DomainError("periodic tail must be a nonempty binary word")
            cycle = _primitive(cycle)
            while prefix and prefix[-1] == cycle[-1]:
                prefix = prefix[:-1]
                cycle = (cycle[-1],) + cycle[:-1]
        elif not prefix:
            raise DomainError("empty word")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def finite(cls, bits: Iterable[int] | str) -> "Word":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        return cls(tuple(bits), None)

    @classmethod
    def periodic(cls, cycle: Iterable[int] | str, prefix: Iterable[int] | str = ()) -> "Word":
        if isinstance(cycle, str):
            cycle = [int(c) for c in cycle]
        if isinstance(prefix, str):
            prefix = [int(c) for c in prefix]
        return cls(tuple(prefix), tuple(cycle))

    @property
    def is_infinite(self) -> bool:
        return self.cycle is not None

    @property
    def is_periodic(self) -> bool:
        return self.cycle is not None and not self.prefix

    def __len__(self) -> int:
        if self.cycle is not None:
            raise TypeError("infinite word has no length")
        return len(self.prefix)

    def symbols(self, n: int) -> tuple[int, ...]:
        """First n symbols (raises for a finite word shorter than n)."""
        if self.cycle is None:
            if n > len(self.prefix):
                raise ClassificationError(f"word {self} has fewer than {n} symbols")
            return self.prefix[:n]
        out = list(self.prefix[:n])
        c = self.cycle
        i = 0
        while len(out) < n:
            out.append(c[i % len(c)])
            i += 1
        return tuple(out)

    def shift(self, k: int = 1) -> "Word":
        """Apply the left shift k times."""
        if k < 0:
            raise DomainError("shift count must be nonnegative")
        if self.cycle is None:
            if k >= len(self.prefix):
                raise DomainError("shifted a finite word past its end")
            return Word(self.prefix[k:])
        p = len(self.prefix)
        if k <= p:
            return Word(self.prefix[k:], self.cycle)
        r = (k - p) % len(self.cycle)
        return Word((), self.cycle[r:] + self.cycle[:r])

    def prepend(self, bits: Iterable[int] | str) -> "Word":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        return Word(tuple(bits) + self.prefix, self.cycle)

    def concat(self, other: "Word") -> "Word":
        if self.cycle is not None:
            raise DomainError("cannot append to an infinite word")
        return Word(self.prefix + other.prefix, other.cycle)

    def literal(self) -> str:
        head = "".join(map(str, self.prefix))
        if self.cycle is None:
            return head
        if len(self.cycle) == 1:
            return head + str(self.cycle[0]) + "*"
        return head + "(" + "".join(map(str, self.cycle)) + ")*"

    def __str__(self) -> str:
        return self.literal()

    def runs(self, count: int = 2) -> list[tuple[int, float, bool]]:
        """Leading runs as (symbol, length, exact) triples.

        ``exact`` is False when a finite word ends inside the run, in which
        case ``length`` is only a lower bound.  An infinite run has length
        ``INF`` and ends the list.
        """
        out: list[tuple[int, float, bool]] = []
        p = len(self.prefix)
        const_sym = None
        if self.cycle is not None and len(self.cycle) == 1:
            const_sym = self.cycle[0]
        pos = 0
        while len(out) < count:
            if self.cycle is None and pos >= p:
                break
            sym = self._at(pos)
            start = pos
            while True:
                if self.cycle is None and pos >= p:
                    out.append((sym, pos - start, False))
                    return out
                if self._at(pos) != sym:
                    break
                if pos >= p and const_sym == sym:
                    out.append((sym, INF, True))
                    return out
                pos += 1
            out.append((sym, pos - start, True))
        return out

    def _at(self, i: int) -> int:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        c = self.cycle
        return c[(i - p) % len(c)]


_LITERAL = re.compile(r"^([01]*)(?:\(([01]+)\)\*|([01])\*)?$")


def parse_word(text: str) -> Word:
    """Parse a word literal.

    ``"0110"`` is a cylinder, ``"0001*"`` is 000 followed by 1 forever,
    ``"(011)*"`` is periodic and ``"1(01)*"`` eventually periodic.

    >>> parse_word("0001*").runs()
    [(0, 3, True), (1, inf, True)]
    """
    if not isinstance(text, str):
        raise DomainError("word literal must be a string")
    m = _LITERAL.match(text.strip())
    if not m or not text.strip():
        raise DomainError(f"bad word literal {text!r}")
    prefix, cyc, last = m.groups()
    if cyc is not None:
        return Word.periodic(cyc, prefix)
    if last is not None:
        return Word.periodic(last, prefix)
    return Word.finite(prefix)


# ---------------------------------------------------------------------------
# Point classes


@dataclass(frozen=True)
class PointClass:
    """Two-run description of a point.

    ``second_run`` is ``None`` when it is unknown (a finite word ending
    inside or right after the leading run) or irrelevant (infinite leading
    run).  ``leading_exact`` is False if the leading run might continue
    past the end of a finite word.
    """

    leading_symbol: int
    leading_run: float
    second_run: float | None = None
    leading_exact: bool = True

    @property
    def is_fixed_point(self) -> bool:
        return self.leading_run == INF

    @property
    def name(self) -> str:
        s, n = self.leading_symbol, self.leading_run
        if n == INF:
            return "0^inf" if s == 0 else "1^inf"
        base = ("L" if s == 0 else "R") + (str(int(n)) if self.leading_exact else f">={int(n)}")
        if n == 1 and self.second_run is not None:
            sr = "inf" if self.second_run == INF else str(int(self.second_run))
            return f"{base}[{sr}]"
        return base

    def require_leading(self) -> int:
        if not self.leading_exact:
            raise ClassificationError(f"leading run of {self.name} not determined")
        return self.leading_run

    def require_second(self) -> float:
        if self.second_run is None:
            raise ClassificationError(f"second run of {self.name} not determined")
        return self.second_run


def classify(w: Word | str) -> PointClass:
    """Two-run class of a point or cylinder word.

    >>> classify("1001*").name
    'R1[2]'
    """
    if isinstance(w, str):
        w = parse_word(w)
    runs = w.runs(2)
    if not runs:
        raise DomainError("empty word")
    sym, n, exact = runs[0]
    if n == INF:
        return PointClass(sym, INF, None, True)
    second = None
    if exact and len(runs) > 1 and runs[1][2]:
        second = runs[1][1]
    return PointClass(sym, n, second, exact)


# ---------------------------------------------------------------------------
# Potential


def potential_value(p: Params, c: PointClass | Word | str) -> float:
    """beta * g at a point of the given class."""
    if not isinstance(c, PointClass):
        c = classify(c)
    if c.leading_run == INF:
        return 0.0
    n = c.leading_run
    if not c.leading_exact:
        raise ClassificationError(f"potential needs the exact leading run, got {c.name}")
    exp = p.exponent(c.leading_symbol)
    if n == 1:
        return -p.beta * math.log(zeta(exp))
    return -p.beta * exp * math.log(n / (n - 1.0))


def potential_array(p: Params, symbol: np.ndarray, run: np.ndarray) -> np.ndarray:
    """Vectorized beta*g from leading symbols and leading run lengths.

    Infinite runs are encoded by any value >= 2**62 (or ``np.inf``).
    """
    symbol = np.asarray(symbol)
    run = np.asarray(run, dtype=float)
    exp = np.where(symbol == 0, p.gamma, p.delta)
    out = np.zeros(run.shape)
    finite = run < 2.0**62
    many = finite & (run >= 2)
    out[many] = -p.beta * exp[many] * np.log(run[many] / (run[many] - 1.0))
    one = finite & (run == 1)
    if np.any(one):
        lz = np.where(symbol[one] == 0, math.log(zeta(p.gamma)), math.log(zeta(p.delta)))
        out[one] = -p.beta * lz
    return out


# ---------------------------------------------------------------------------
# Walters-class data


@dataclass(frozen=True)
class WaltersData:
    """Four sequences with limits describing a potential of Walters type.

    The potential equals a_n on 0^n 1 (or b_n when n = 1 is reached
    through the other branch); see :func:`walters_data` for the mapping.
    """

    a_n: Callable[[int], float]
    b_n: Callable[[int], float]
    c_n: Callable[[int], float]
    d_n: Callable[[int], float]
    a: float
    b: float
    c: float
    d: float

    def check_limits(self, window: range = range(10**6, 10**6 + 10), tol: float = 1e-5) -> bool:
        """Verify each sequence is within ``tol`` of its limit on ``window``."""
        for seq, lim in ((self.a_n, self.a), (self.b_n, self.b), (self.c_n, self.c), (self.d_n, self.d)):
            if any(abs(seq(n) - lim) > tol for n in window):
                return False
        return True


def walters_data(p: Params) -> WaltersData:
    """Walters data of beta*g.

    a_1 and c_1 are undefined by the run-length formula; they are set to
    the L_1 / R_1 constants of the potential.
    """
    lz_g = math.log(zeta(p.gamma))
    lz_d = math.log(zeta(p.delta))
    beta = p.beta

    def run_term(exp: float, lz: float) -> Callable[[int], float]:
        def f(n: int) -> float:
            if n < 1:
                raise DomainError("sequence index starts at 1")
            if n == 1:
                return -beta * lz
            return -beta * exp * math.log(n / (n - 1.0))
        return f

    return WaltersData(
        a_n=run_term(p.gamma, lz_g),
        b_n=lambda n: -beta * lz_g,
        c_n=run_term(p.delta, lz_d),
        d_n=lambda n: -beta * lz_d,
        a=0.0,
        b=-beta * lz_g,
        c=0.0,
        d=-beta * lz_d,
    )


# ---------------------------------------------------------------------------
# Renormalization


@dataclass(frozen=True)
class RenormReport:
    max_residual: float
    residuals: Mapping[str, float] = field(default_factory=dict)


def renormalize(
    p: Params,
    class_grid: Iterable[int],
    potential: Callable[[PointClass], float] | None = None,
) -> RenormReport:
    """Residual of one renormalization step against the input potential.

    For x with leading run c >= 2 the renormalized potential is
    V(sigma(Hx)) + V(Hx), where H doubles the leading run; on
    leading-run-one classes it is left unchanged.
    """
    if potential is None:
        def potential(c: PointClass) -> float:
            return potential_value(p, c)
    grid = list(class_grid)
    if any(c < 2 for c in grid):
        raise DomainError("renormalization grid needs run lengths >= 2")
    res: dict[str, float] = {}
    for sym in (0, 1):
        for c in grid:
            here = PointClass(sym, c)
            v2 = potential(PointClass(sym, 2 * c - 1)) + potential(PointClass(sym, 2 * c))
            res[here.name] = abs(v2 - potential(here))
        # leading-run-one classes are fixed by definition
        res[PointClass(sym, 1).name] = 0.0
    return RenormReport(max(res.values()), res)


# ---------------------------------------------------------------------------
# Natural extension


def extend_two_sided(m, past: Word | str | None, future: Word | str) -> float:
    """Mass of the two-sided cylinder [past | future].

    ``m`` is any callable or mapping from cylinder words (or their literal
    strings) to masses; the result is the one-sided mass of the
    concatenated word.
    """
    future = parse_word(future) if isinstance(future, str) else future
    if past is None or past == "":
        word = future
    else:
        past = parse_word(past) if isinstance(past, str) else past
        word = past.concat(future)
    try:
        if callable(m):
            return float(m(word))
        if word.literal() in m:
            return float(m[word.literal()])
        return float(m[word])
    except KeyError as exc:
        raise MassLookupError(f"no mass for cylinder {word}") from exc
