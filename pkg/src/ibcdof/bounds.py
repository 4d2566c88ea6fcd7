"""
DoF bounds, region classification and the information-theoretic upper
bound for the symmetric MIMO-IBC.

All quantities are exact. Region I membership is decided by the sign of
``M**2 - (G-1)*K*M*N + K*N**2``, whose roots in ``M/N`` are the two
limits of the C-sequences, so no square roots are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .config import SystemConfig
from .rational import Rat, Side, is_finite_sequence, iter_pq, rat_div

__all__ = [
    "RegionClass", "DoFReport", "M_LIMITED", "N_LIMITED",
    "dof_decomposition", "dof_proper", "classify_region", "dof_quantity",
    "dof_upper", "region_quadratic", "bracket",
]

M_LIMITED = "M-limited"
N_LIMITED = "N-limited"


@dataclass(frozen=True)
class RegionClass:
    """Region I, or Region II-A/II-B with chain index ``n``.

    ``at_limit`` marks a ratio equal to a (rational) C-sequence limit; such
    a point is in Region II but lies in no finite bracket, so ``n`` is None.
    ``subcase`` names the term attaining the quantity bound: M-limited when
    the BS-antenna term is the minimum (ties included, i.e. ``M/N <= D_{n-1}``),
    N-limited otherwise.
    """

    region: str
    n: Optional[int] = None
    subcase: Optional[str] = None
    at_limit: bool = False

    @property
    def side(self) -> Optional[Side]:
        if self.region == "II-A":
            return Side.A
        if self.region == "II-B":
            return Side.B
        return None

    @property
    def is_region_one(self) -> bool:
        return self.region == "I"

    def label(self) -> str:
        if self.region == "I":
            return "I"
        if self.at_limit:
            return f"{self.region}(limit)"
        return f"{self.region}({self.n}, {self.subcase})"


@dataclass(frozen=True)
class DoFReport:
    d_decom: Fraction
    d_proper: Fraction
    d_quantity: Optional[Fraction]
    d_upper: Fraction
    region: RegionClass
    achievable_by: str


def dof_decomposition(cfg: SystemConfig) -> Fraction:
    return Fraction(cfg.M * cfg.N, cfg.M + cfg.K * cfg.N)


def dof_proper(cfg: SystemConfig) -> Fraction:
    return Fraction(cfg.M + cfg.N, cfg.G * cfg.K + 1)


def region_quadratic(cfg: SystemConfig) -> int:
    """``(M - C_inf^A N)(M - C_inf^B N)`` expanded; negative iff Region I."""
    G, K, M, N = cfg.G, cfg.K, cfg.M, cfg.N
    return M * M - (G - 1) * K * M * N + K * N * N


def bracket(G: int, K: int, side: Side, n: int) -> tuple[Rat, Rat]:
    """``(C_{n-1}, C_n)`` for the given side and index ``n >= 1``."""
    prev = None
    for pair in iter_pq(G, K, side):
        if pair.n == n - 1:
            prev = pair.ratio
        elif pair.n == n:
            return prev, pair.ratio
    raise IndexError(f"index {n} beyond the {side}-sequence for G={G}, K={K}")


def _scan(cfg: SystemConfig, side: Side) -> Optional[int]:
    # integer cross-multiplication: q/p <= M/N  <=>  q N <= p M  (p >= 0)
    M, N = cfg.M, cfg.N
    prev = None
    for pair in iter_pq(cfg.G, cfg.K, side):
        if pair.n < 0:
            continue
        if pair.n >= 1:
            if side is Side.A:
                if pair.q * N <= pair.p * M and M * prev.p < N * prev.q:
                    return pair.n
            elif prev.q * N < prev.p * M and M * pair.p <= N * pair.q:
                return pair.n
        prev = pair
    return None


def _subcase(cfg: SystemConfig, side: Side, n: int) -> str:
    c_prev, c_n = bracket(cfg.G, cfg.K, side, n)
    K = cfg.K
    if side is Side.A:
        num, den = K + c_n, 1 + rat_div(K, c_prev)
    else:
        num, den = K + c_prev, 1 + rat_div(K, c_n)
    # M-term <= N-term  <=>  M * den <= N * num  <=>  rho <= D_{n-1}
    return M_LIMITED if cfg.M * den <= cfg.N * num else N_LIMITED


@lru_cache(maxsize=65536)
def classify_region(cfg: SystemConfig) -> RegionClass:
    s = region_quadratic(cfg)
    if s < 0:
        return RegionClass("I")
    if is_finite_sequence(cfg.G, cfg.K):
        sides = (Side.A, Side.B)
    else:
        vertex_side = Side.A if 2 * cfg.M > (cfg.G - 1) * cfg.K * cfg.N else Side.B
        if 2 * cfg.M == (cfg.G - 1) * cfg.K * cfg.N:
            vertex_side = Side.A
        if s == 0:
            name = "II-A" if vertex_side is Side.A else "II-B"
            return RegionClass(name, at_limit=True)
        sides = (vertex_side,)
    for side in sides:
        n = _scan(cfg, side)
        if n is not None:
            return RegionClass("II-" + side.value, n, _subcase(cfg, side, n))
    raise AssertionError(f"ratio {cfg.ratio} not covered for {cfg}")


def _quantity_terms(cfg: SystemConfig, region: RegionClass) -> tuple[Fraction, Fraction]:
    """The M-term and N-term of the quantity bound."""
    c_prev, c_n = bracket(cfg.G, cfg.K, region.side, region.n)
    K = cfg.K
    if region.side is Side.A:
        m_den, n_den = K + c_n, 1 + rat_div(K, c_prev)
    else:
        m_den, n_den = K + c_prev, 1 + rat_div(K, c_n)
    return Fraction(cfg.M) / m_den, Fraction(cfg.N) / n_den


def dof_quantity(cfg: SystemConfig, region: Optional[RegionClass] = None) -> Optional[Fraction]:
    region = region or classify_region(cfg)
    if region.is_region_one:
        return None
    if region.at_limit:
        # the bracket collapses onto C_inf, where both terms equal the
        # decomposition bound
        return dof_decomposition(cfg)
    return min(_quantity_terms(cfg, region))


def dof_upper(cfg: SystemConfig) -> DoFReport:
    region = classify_region(cfg)
    decom, proper = dof_decomposition(cfg), dof_proper(cfg)
    quantity = dof_quantity(cfg, region)
    if region.is_region_one:
        return DoFReport(decom, proper, None, decom, region, "asymptotic-only")
    return DoFReport(decom, proper, quantity, quantity, region, "linear")

