"""
IA feasibility for a requested per-user stream count.

In Region II a stream count ``d`` is linearly feasible iff every pair
``(p, q)`` of both boundary sequences satisfies
``max(p*M, q*N) >= (p*K + q)*d``. Only pairs up to one index past the
region index need checking; ``debug=True`` extends the scan to cross-check
that cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from .bounds import RegionClass, classify_region, dof_decomposition
from .config import SystemConfig
from .plan import synthesis_plan
from .rational import PQPair, Side, iter_pq, pq_sequence

__all__ = [
    "FEASIBLE", "INFEASIBLE", "CONJECTURED", "FeasibilityVerdict",
    "feasible_linear", "feasible_asymptotic", "min_spatial_extension",
    "pair_condition",
]

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
CONJECTURED = "conjectured-feasible"

#: extra indices scanned in debug mode, beyond the normal cutoff
DEBUG_EXTRA_PAIRS = 24
#: safety cap on the pair scan at a sequence-limit ratio
LIMIT_SCAN_CAP = 100_000


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of a feasibility query.

    ``binding_pair`` is the first ``(p, q)`` found violating the pair
    condition; it is set only for Region II configurations that fail.
    """

    linear: str
    asymptotic: str
    binding_pair: Optional[tuple[int, int]]
    proper_holds: bool
    d: Fraction
    region: RegionClass
    binding_side: Optional[Side] = None
    binding_index: Optional[int] = None


def _as_positive(d) -> Fraction:
    try:
        value = Fraction(d)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"d must be a rational number, got {d!r}") from exc
    if value <= 0:
        raise ValueError(f"d must be positive, got {value}")
    return value


def pair_condition(cfg: SystemConfig, pair: PQPair, d: Fraction) -> bool:
    """``max(p*M, q*N) >= (p*K + q) * d``."""
    return max(pair.p * cfg.M, pair.q * cfg.N) >= (pair.p * cfg.K + pair.q) * d


def _first_violation(cfg: SystemConfig, d: Fraction, upto: int,
                     sides: tuple[Side, ...]):
    # integer form of the pair condition: max(pM, qN) * den >= (pK + q) * num
    M, N, K = cfg.M, cfg.N, cfg.K
    num, den = d.numerator, d.denominator
    for side in sides:
        for pair in pq_sequence(cfg.G, cfg.K, side, upto)[1:]:
            p, q = pair.p, pair.q
            if max(p * M, q * N) * den < (p * K + q) * num:
                return side, pair
    return None


def _limit_violation(cfg: SystemConfig, d: Fraction, region: RegionClass):
    """Violating pair at a ratio equal to the sequence limit, if any.

    There the pair conditions tighten monotonically towards the
    decomposition bound, so a violation exists iff ``d`` exceeds it.
    """
    if d <= dof_decomposition(cfg):
        return None
    for side in (region.side, _other(region.side)):
        for pair in iter_pq(cfg.G, cfg.K, side):
            if pair.n > LIMIT_SCAN_CAP:
                break
            if pair.n >= 0 and not pair_condition(cfg, pair, d):
                return side, pair
    raise ArithmeticError(f"no violating pair within {LIMIT_SCAN_CAP} indices")


def _other(side: Side) -> Side:
    return Side.B if side is Side.A else Side.A


def feasible_linear(cfg: SystemConfig, d, debug: bool = False) -> FeasibilityVerdict:
    """Linear IA feasibility of ``d`` streams per user.

    Parameters
    ----------
    cfg : SystemConfig
    d : int, Fraction or str
        Stream count; non-integer values model spatially extended systems.
    debug : bool
        Scan extra pairs beyond the cutoff and fail loudly if they change
        the verdict.

    Raises
    ------
    ValueError
        If ``d <= 0``.
    """
    d = _as_positive(d)
    region = classify_region(cfg)
    proper = (cfg.M + cfg.N) * d.denominator >= (cfg.G * cfg.K + 1) * d.numerator
    if region.is_region_one:
        linear = CONJECTURED if proper else INFEASIBLE
        return FeasibilityVerdict(linear, _asymptotic_region_one(cfg, d), None,
                                  proper, d, region)
    if region.at_limit:
        found = _limit_violation(cfg, d, region)
    else:
        upto = region.n + 1
        sides = (region.side, _other(region.side))
        found = _first_violation(cfg, d, upto, sides)
        if debug:
            deep = _first_violation(cfg, d, upto + DEBUG_EXTRA_PAIRS, sides)
            if (deep is None) != (found is None):
                raise AssertionError(
                    f"pair cutoff {upto} changes the verdict for {cfg}, d={d}")
    if found is None:
        return FeasibilityVerdict(FEASIBLE, FEASIBLE, None, proper, d, region)
    side, pair = found
    return FeasibilityVerdict(INFEASIBLE, INFEASIBLE, (pair.p, pair.q), proper, d,
                              region, side, pair.n)


def _asymptotic_region_one(cfg: SystemConfig, d: Fraction) -> str:
    return FEASIBLE if cfg.M * cfg.N >= (cfg.M + cfg.K * cfg.N) * d else INFEASIBLE


def feasible_asymptotic(cfg: SystemConfig, d) -> str:
    """Asymptotic IA verdict: the decomposition test in Region I, else the linear one."""
    d = _as_positive(d)
    if classify_region(cfg).is_region_one:
        return _asymptotic_region_one(cfg, d)
    return feasible_linear(cfg, d).asymptotic


def min_spatial_extension(cfg: SystemConfig) -> int:
    """Smallest antenna scaling ``m`` making the construction integral.

    Both ``m * d`` and the per-aligned-matrix column count of the route the
    synthesizer takes must be integers.

    Raises
    ------
    NotAchievableError
        In Region I and at a sequence-limit ratio.
    """
    plan = synthesis_plan(cfg)
    return lcm(plan.d.denominator, plan.columns.denominator)
