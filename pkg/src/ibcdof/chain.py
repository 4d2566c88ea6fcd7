"""
Irresolvable-subspace chains and the genie-chain upper bound.

This module is an oracle independent of the closed forms in
:mod:`ibcdof.bounds`: the DoF bound is recovered here by solving the genie
inequality system directly, and the two must agree exactly.

Notation (side A; side B swaps the roles of BS and user):

* ``S_m`` is the dimension of the m-th irresolvable subspace, with
  ``S_{-1} = M`` and ``S_0 = N``.
* ``G_m`` is the dimension of the genie placed in that subspace, with
  ``G_{-1} = M - K d`` and ``G_0 = d``. The inequalities are

  .. math::

     c_m G_{m-1} \\le G_{m-2} + G_m \\quad (m = 1..n), \\qquad
     G_m \\le S_m \\quad (m = 0..n)

  where ``c_m = (G-1) K̄_{m-1}`` and ``S_n = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .bounds import classify_region
from .config import SystemConfig
from .rational import Side, iter_pq, kbar

__all__ = [
    "ChainReport", "GenieProfile", "NonTerminatingChainError",
    "GenieBoundExceeded", "subspace_chain", "genie_bound_recursive",
    "genie_dims",
]


class NonTerminatingChainError(ValueError):
    """The subspace chain never reaches zero (Region I or the limit ratio)."""


class GenieBoundExceeded(ValueError):
    """A requested d violates the genie inequality system."""

    def __init__(self, message: str, bound: Fraction, cap_index: int):
        super().__init__(message)
        self.bound = bound
        self.cap_index = cap_index


@dataclass(frozen=True)
class GenieProfile:
    """Maximal genie dimensions for a given d.

    ``dims[m-1]`` is the maximal ``|G_m|`` for ``m = 1..n-1``. ``chain_slack[m-1]``
    is ``G_{m-2} + G_m - c_m G_{m-1}`` for ``m = 1..n`` and ``cap_slack[m]`` is
    ``S_m - G_m`` for ``m = 0..n-1``.
    """

    d: Fraction
    root: tuple[Fraction, Fraction]
    dims: list[Fraction]
    chain_slack: list[Fraction]
    cap_slack: list[Fraction]


@dataclass(frozen=True)
class ChainReport:
    """Subspace-chain dimensions indexed from ``n = -1``.

    ``dims[0]`` is ``S_{-1}``, ``dims[1]`` is ``S_0`` and ``dims[-1]`` is the
    terminating zero ``S_length``.
    """

    side: Side
    dims: list[Fraction]
    length: int
    genie_dims: Optional[list[Fraction]] = field(default=None)

    @property
    def after_seeds(self) -> list[Fraction]:
        return self.dims[2:]

    def dim(self, n: int) -> Fraction:
        return self.dims[n + 1]


def _chain_coef(G: int, K: int, side: Side, m: int) -> int:
    return (G - 1) * kbar(K, m - 1 if side is Side.A else m)


def _side_of(cfg: SystemConfig) -> Side:
    region = classify_region(cfg)
    if region.is_region_one:
        raise NonTerminatingChainError(f"non-terminating (Region I) for {cfg}")
    if region.at_limit:
        raise NonTerminatingChainError(
            f"non-terminating (ratio equals the sequence limit) for {cfg}")
    return region.side


def subspace_chain(cfg: SystemConfig, d=None) -> ChainReport:
    """Irresolvable-subspace dimensions until the first zero.

    Both the recursion and the closed form ``(qN - pM)^+`` (side A) or
    ``(pM - qN)^+`` (side B) are evaluated and must agree. When ``d`` is
    given, the maximal genie dimensions for that d are attached.
    """
    side = _side_of(cfg)
    M, N = cfg.M, cfg.N
    seeds = (M, N) if side is Side.A else (N, M)
    dims = [seeds[0], seeds[1]]
    for pair in iter_pq(cfg.G, cfg.K, side):
        if side is Side.A:
            closed = max(pair.q * N - pair.p * M, 0)
        else:
            closed = max(pair.p * M - pair.q * N, 0)
        if pair.n >= 1:
            coef = _chain_coef(cfg.G, cfg.K, side, pair.n)
            dims.append(max(coef * dims[-1] - dims[-2], 0))
        if dims[pair.n + 1] != closed:
            raise ArithmeticError(
                f"chain recursion and closed form disagree at n={pair.n}")
        if pair.n >= 0 and closed == 0:
            break
    else:
        raise NonTerminatingChainError(f"sequence ended before the chain for {cfg}")
    length = len(dims) - 2
    genie = genie_dims(cfg, d).dims if d is not None else None
    return ChainReport(side, [Fraction(x) for x in dims], length, genie)


@dataclass(frozen=True)
class _Cap:
    """Affine ceiling ``G_m <= alpha * G_{m-1} + gamma * S_k`` from cap ``k``.

    Slopes and scale factors depend only on ``(G, K, side, n)``, never on the
    antenna counts, so they are computed once per chain shape.
    """

    alpha: Fraction
    gamma: Fraction
    origin: int


@lru_cache(maxsize=4096)
def _ceiling_shape(G: int, K: int, side: Side, n: int) -> tuple[tuple[_Cap, ...], ...]:
    """``out[m]`` holds the ceilings on ``G_m`` in terms of ``G_{m-1}``, m = 1..n.

    Built backwards from ``G_n <= S_n = 0``: each ceiling on ``G_m`` turns the
    chain inequality ``c_m G_{m-1} <= G_{m-2} + G_m`` into a ceiling on
    ``G_{m-1}``, and the subspace cap ``G_{m-1} <= S_{m-1}`` is added.
    """
    current = (_Cap(Fraction(0), Fraction(1), n),)
    out: list = [()] * (n + 1)
    out[n] = current
    for m in range(n, 1, -1):
        c = _chain_coef(G, K, side, m)
        nxt = []
        for cap in current:
            slope = c - cap.alpha
            if slope > 0:
                nxt.append(_Cap(1 / slope, cap.gamma / slope, cap.origin))
            elif slope < 0:
                raise ArithmeticError(
                    f"negative chain slope at m={m} for G={G}, K={K}, side {side}")
            # slope == 0 leaves G_{m-2} + beta >= 0, always true
        nxt.append(_Cap(Fraction(0), Fraction(1), m - 1))
        current = tuple(nxt)
        out[m - 1] = current
    return tuple(out)


def _ceilings(cfg: SystemConfig, chain: ChainReport) -> tuple[tuple[_Cap, ...], ...]:
    return _ceiling_shape(cfg.G, cfg.K, chain.side, chain.length)


def _root(cfg: SystemConfig, side: Side, d: Fraction) -> tuple[Fraction, Fraction]:
    if side is Side.A:
        return Fraction(cfg.M) - cfg.K * d, d
    return Fraction(cfg.N) - d, cfg.K * d


def _solve(cfg: SystemConfig, chain: ChainReport, caps1: list[_Cap]) -> tuple[Fraction, int]:
    """Largest d allowed by the m = 1 constraints and the cap on ``G_0``."""
    K, side = cfg.K, chain.side
    c1 = _chain_coef(cfg.G, K, side, 1)
    # G_0 <= S_0
    best = (Fraction(chain.dim(0)) / (1 if side is Side.A else K), 0)
    for cap in caps1:
        slope = c1 - cap.alpha
        beta = cap.gamma * chain.dim(cap.origin)
        if side is Side.A:
            # slope * d <= M - K d + beta
            bound = (cfg.M + beta) / (slope + K)
        else:
            # slope * K d <= N - d + beta
            bound = (cfg.N + beta) / (slope * K + 1)
        if bound < best[0]:
            best = (bound, cap.origin)
    return best


def genie_bound_recursive(cfg: SystemConfig) -> Fraction:
    """Maximal d admitted by the genie inequality system."""
    chain = subspace_chain(cfg)
    caps = _ceilings(cfg, chain)
    return _solve(cfg, chain, caps[1])[0]


def genie_dims(cfg: SystemConfig, d) -> GenieProfile:
    """Maximal genie dimensions ``|G_1| .. |G_{n-1}|`` for stream count ``d``.

    Raises
    ------
    GenieBoundExceeded
        If ``d`` exceeds :func:`genie_bound_recursive`; the exception names
        the subspace cap whose ceiling breaks.
    """
    d = Fraction(d)
    if d < 0:
        raise ValueError("d must be nonnegative")
    chain = subspace_chain(cfg)
    n, side = chain.length, chain.side
    caps = _ceilings(cfg, chain)
    bound, origin = _solve(cfg, chain, caps[1])
    if d > bound:
        raise GenieBoundExceeded(
            f"d={d} exceeds the genie bound {bound}; "
            f"the ceiling from |G_{origin}| <= |S_{origin}| breaks first",
            bound, origin)
    g = list(_root(cfg, side, d))  # G_{-1}, G_0
    for m in range(1, n):
        g.append(min(cap.alpha * g[-1] + cap.gamma * chain.dim(cap.origin)
                     for cap in caps[m]))
    g.append(Fraction(0))  # G_n
    chain_slack = []
    for m in range(1, n + 1):
        c = _chain_coef(cfg.G, cfg.K, side, m)
        chain_slack.append(g[m - 1] + g[m + 1] - c * g[m])
    cap_slack = [chain.dim(m) - g[m + 1] for m in range(0, n)]
    return GenieProfile(d, (g[0], g[1]), g[2:n + 1], chain_slack, cap_slack)
