"""
Exact bookkeeping for the linear IA construction: which side aligns, which
(p, q) pair sizes the aligned matrices, how many there are, and how many
null-space columns each one must supply.

Two routes exist. The V route stacks transmit vectors of several BSs into
the right null space of an aligned matrix and leaves the users to cancel
the remaining interference. The U route mirrors it: stacked receive vectors
live in the left null space and the BSs zero-force what is left. Chain
index 1 degenerates to plain zero-forcing with no alignment at all (t = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bounds import _scan, bracket, classify_region, dof_quantity
from .config import SystemConfig
from .rational import Side, is_finite_sequence, pq_sequence, rat_div

__all__ = ["NotAchievableError", "SynthesisPlan", "synthesis_plan"]


class NotAchievableError(ValueError):
    """No finite linear construction exists for this configuration."""


@dataclass(frozen=True)
class SynthesisPlan:
    """Sizes of the aligned matrices for one configuration and stream count.

    Attributes
    ----------
    route : {"V", "U"}
        Transmit-side (V) or receive-side (U) alignment.
    side : Side
        Sequence side of the region.
    n : int
        Region (chain) index.
    t : int
        Index of the (p, q) pair sizing each aligned matrix, whose shape is
        ``q*N x p*M``. ``t = 0`` means plain zero-forcing.
    root : {"user", "bs"}
        Node type each aligned matrix is rooted at. There is one aligned
        matrix per node of that type, so ``n_specs`` is ``G*K`` or ``G``.
    columns : Fraction
        Null-space columns each aligned matrix must contribute.
    """

    route: str
    side: Side
    n: int
    t: int
    p: int
    q: int
    root: str
    n_specs: int
    d: Fraction
    columns: Fraction

    def nullity_for(self, cfg: SystemConfig) -> int:
        """Generic null-space dimension of one aligned matrix."""
        if self.route == "V":
            return self.p * cfg.M - self.q * cfg.N
        return self.q * cfg.N - self.p * cfg.M

    def is_integral(self) -> bool:
        return self.d.denominator == 1 and self.columns.denominator == 1


def _v_route_preferred(cfg: SystemConfig, side: Side, n: int) -> bool:
    """True when ``M/N >= D_{n-1}``, where transmit-side alignment fits."""
    c_prev, c_n = bracket(cfg.G, cfg.K, side, n)
    K = cfg.K
    if side is Side.A:
        num, den = K + c_n, 1 + rat_div(K, c_prev)
    else:
        num, den = K + c_prev, 1 + rat_div(K, c_n)
    return cfg.M * den >= cfg.N * num


def synthesis_plan(cfg: SystemConfig, d: Optional[Fraction] = None) -> SynthesisPlan:
    """Construction plan for ``cfg`` at stream count ``d`` (default: the bound).

    Raises
    ------
    NotAchievableError
        In Region I and at a ratio equal to a sequence limit, where no finite
        chain exists.
    """
    region = classify_region(cfg)
    if region.is_region_one:
        raise NotAchievableError(
            f"Region I: the bound of {cfg} needs infinite symbol extension")
    if region.at_limit:
        raise NotAchievableError(
            f"M/N of {cfg} equals a sequence limit; the alignment chain never closes")
    side, n = region.side, region.n
    d = dof_quantity(cfg, region) if d is None else Fraction(d)
    if is_finite_sequence(cfg.G, cfg.K):
        # both sides may bracket the ratio here; build on the shorter chain
        other = _scan(cfg, Side.B)
        if other is not None and other < n:
            side, n = Side.B, other
    if n == 1:
        # zero-forcing at the node with the spare antennas
        route = "U" if side is Side.A else "V"
        t = 0
    else:
        v_route = _v_route_preferred(cfg, side, n)
        route = "V" if v_route else "U"
        if side is Side.A:
            t = n if v_route else n - 1
        else:
            t = n - 1 if v_route else n
    pair = pq_sequence(cfg.G, cfg.K, side, t)[-1]
    assert pair.n == t
    # the tree behind an aligned matrix alternates node types; its root is a
    # user exactly when the K-weighted hop sits at the root
    user_root = (t % 2 == 0) if side is Side.A else (t % 2 == 1)
    n_specs = cfg.G * cfg.K if user_root else cfg.G
    per = pair.p if route == "V" else pair.q
    columns = Fraction(cfg.G * cfg.K) * d / (n_specs * per)
    return SynthesisPlan(route, side, n, t, pair.p, pair.q,
                         "user" if user_root else "bs", n_specs, d, columns)
