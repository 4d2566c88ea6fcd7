"""
Exact rational arithmetic and the boundary sequences of the symmetric
MIMO-IBC.

Finite values are plain :class:`fractions.Fraction` objects. The single
non-finite value needed here is ``+inf`` (the first element of the A-side
C-sequence), represented by the :data:`INF` singleton so that ``x / INF``
is an exact zero and ``x < INF`` holds for every finite ``x``.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "INF", "Infinity", "Rat", "Side", "PQPair", "SequenceError",
    "as_rat", "parse_rat", "format_rat", "rat_div", "is_finite_sequence",
    "kbar", "pq_sequence", "iter_pq", "c_sequence", "c_limit", "d_boundary",
]


class Infinity:
    """Positive infinity, comparable against any Fraction or int."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("ibcdof.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __rtruediv__(self, other):
        # finite / inf
        return Fraction(0)

    def __float__(self):
        return math.inf

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

Rat = Union[Fraction, Infinity]


class SequenceError(ValueError):
    """Invalid sequence parameters or an index outside the produced range."""


class Side(enum.Enum):
    A = "A"
    B = "B"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PQPair:
    n: int
    p: int
    q: int

    @property
    def ratio(self) -> Rat:
        """``q/p`` with ``q/0 = INF`` (only ``q > 0`` reaches that case)."""
        if self.p == 0:
            return INF
        return Fraction(self.q, self.p)


def as_rat(x) -> Rat:
    if x is INF:
        return INF
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return INF
    return Fraction(x)


def parse_rat(text: str) -> Rat:
    """Parse ``"7"``, ``"7/2"`` or ``"inf"``."""
    s = str(text).strip()
    if s.lower() in ("inf", "+inf", "infinity"):
        return INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rat(x: Rat) -> str:
    """Render as ``"num/den"`` (denominator always shown) or ``"inf"``."""
    if x is INF:
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rat_div(a: Rat, b: Rat) -> Rat:
    """``a / b`` for a finite, nonnegative ``a``; ``a/INF = 0``, ``a/0 = INF``."""
    if b is INF:
        return Fraction(0)
    if b == 0:
        if a == 0:
            raise ZeroDivisionError("0/0")
        return INF
    return Fraction(a) / Fraction(b)


def _check(G: int, K: int) -> None:
    if int(G) != G or G < 2:
        raise SequenceError(f"G must be an integer >= 2, got {G!r}")
    if int(K) != K or K < 1:
        raise SequenceError(f"K must be a positive integer, got {K!r}")


def is_finite_sequence(G: int, K: int) -> bool:
    """True when the C-sequences terminate (G = 2 and K < 4)."""
    return G == 2 and K < 4


def kbar(K: int, n: int) -> int:
    """K for even ``n``, 1 for odd ``n``."""
    return K if n % 2 == 0 else 1


_SEEDS = {
    Side.A: ((-1, 0), (0, 1)),   # (p_{-1}, q_{-1}), (p_0, q_0)
    Side.B: ((0, -1), (1, 0)),
}


def _generate_pq(G: int, K: int, side: Side):
    (p2, q2), (p1, q1) = _SEEDS[side]
    yield PQPair(-1, p2, q2)
    yield PQPair(0, p1, q1)
    n = 1
    while True:
        coef = (G - 1) * kbar(K, n - 1 if side is Side.A else n)
        p, q = coef * p1 - p2, coef * q1 - q2
        if p < 0 or q < 0:
            return
        yield PQPair(n, p, q)
        p2, q2, p1, q1 = p1, q1, p, q
        n += 1


class _PairCache:
    """Memoized prefixes of the pair sequences, shared across threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def get(self, G: int, K: int, side: Side, index: int):
        """Pair with list position ``index`` (n = index - 1), or None past the end."""
        key = (G, K, side)
        entry = self._store.get(key)
        if entry is not None and index < len(entry[0]):
            return entry[0][index]
        with self._lock:
            entry = self._store.get(key)
            if entry is None:
                entry = self._store[key] = ([], _generate_pq(G, K, side), [False])
            pairs, gen, done = entry
            while len(pairs) <= index and not done[0]:
                nxt = next(gen, None)
                if nxt is None:
                    done[0] = True
                else:
                    pairs.append(nxt)
            return pairs[index] if index < len(pairs) else None

    def prefix(self, G: int, K: int, side: Side, count: int) -> list:
        """The first ``count`` pairs (fewer if the sequence stops)."""
        entry = self._store.get((G, K, side))
        if entry is None or (len(entry[0]) < count and not entry[2][0]):
            self.get(G, K, side, count - 1)
            entry = self._store[(G, K, side)]
        return entry[0][:count]


_PAIRS = _PairCache()


def iter_pq(G: int, K: int, side: Side):
    """Yield ``PQPair`` for n = -1, 0, 1, ... until a negative entry appears.

    The generator is unbounded for infinite sequences. Values are memoized.
    """
    _check(G, K)
    side = Side(side)
    index = 0
    while True:
        pair = _PAIRS.get(G, K, side, index)
        if pair is None:
            return
        yield pair
        index += 1


def pq_sequence(G: int, K: int, side: Side, n_max: int) -> list[PQPair]:
    """Generalized Fibonacci pairs for n = -1..n_max (or until truncation)."""
    if n_max < 0:
        raise SequenceError("n_max must be >= 0")
    _check(G, K)
    return _PAIRS.prefix(G, K, Side(side), n_max + 2)


def c_sequence(G: int, K: int, side: Side, n_max: int) -> list[Rat]:
    """C_0..C_n computed by the fractional recursion, checked against q_n/p_n.

    The list stops early when the pair sequence stops.
    """
    side = Side(side)
    pairs = [pr for pr in pq_sequence(G, K, side, n_max) if pr.n >= 0]
    seq: list[Rat] = [INF if side is Side.A else Fraction(0)]
    for _ in pairs[1:]:
        prev = seq[-1]
        if side is Side.A:
            cur = (G - 1) * K - rat_div(K, prev)
        else:
            den = (G - 1) - (INF if prev is INF else Fraction(prev) / K)
            cur = rat_div(1, den)
        seq.append(cur)
    for pr, c in zip(pairs, seq):
        if pr.ratio != c:
            raise ArithmeticError(
                f"recursion and convergent disagree at n={pr.n}: {c} vs {pr.ratio}")
    return seq


def c_limit(G: int, K: int, side: Side) -> float:
    """Limit of the (infinite) C-sequence, as a float."""
    _check(G, K)
    if is_finite_sequence(G, K):
        raise SequenceError(f"C-sequence for G={G}, K={K} is finite; no limit")
    disc = (G - 1) ** 2 * K ** 2 - 4 * K
    root = math.sqrt(disc)
    sign = 1 if Side(side) is Side.A else -1
    return ((G - 1) * K + sign * root) / 2


def d_boundary(G: int, K: int, side: Side, n: int) -> Rat:
    """Touch point D_n where the quantity bound meets the proper bound."""
    side = Side(side)
    if n < 0:
        raise SequenceError("n must be >= 0")
    seq = c_sequence(G, K, side, n + 1)
    if len(seq) < n + 2:
        raise SequenceError(
            f"D_{n}^{side} needs C_{n + 1}, beyond the sequence end (length {len(seq)})")
    if side is Side.A:
        num, den = K + seq[n + 1], 1 + rat_div(K, seq[n])
    else:
        num, den = K + seq[n], 1 + rat_div(K, seq[n + 1])
    if num is INF:
        return INF
    if den is INF:
        return Fraction(0)
    return Fraction(num) / Fraction(den)
