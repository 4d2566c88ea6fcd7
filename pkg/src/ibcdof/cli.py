"""
Command-line front end.

Commands
--------
dof        bounds, region and achievability for one configuration
feasible   linear and asymptotic verdicts for a stream count ``--d``
chain      irresolvable-subspace chain and genie bound
sequences  (p, q) pairs, C-values and D-values of both sequence sides
synth      build transceivers on random channels and verify them
sweep      one record per grid point, as CSV (default) or JSON

Every command except ``sweep`` prints one JSON document. Exact rationals are
rendered as ``"num/den"`` strings with a parallel ``*_approx`` float.

Exit codes: 0 success, 2 usage error, 3 infeasible or refused,
4 verification or construction failure. Errors are reported as a JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from .alignment import AlignedMatrixSearchError, gen_channels
from .bounds import DoFReport, RegionClass, dof_upper
from .chain import (GenieBoundExceeded, NonTerminatingChainError, genie_bound_recursive,
                    genie_dims, subspace_chain)
from .config import SystemConfig
from .feasibility import FeasibilityVerdict, feasible_linear, min_spatial_extension
from .plan import NotAchievableError, synthesis_plan
from .rational import INF, SequenceError, Side, d_boundary, format_rat, pq_sequence
from .synth import (DEFAULT_RANK_TOL, DEFAULT_ZF_TOL, SynthesisError,
                    dump_transceiver, synthesize, verify_ia)

__all__ = ["main", "build_parser", "BOUNDS_COLUMNS", "FEASIBILITY_COLUMNS"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REFUSED = 3
EXIT_FAILED = 4

#: CSV header of ``sweep --mode bounds``
BOUNDS_COLUMNS = ("M", "N", "region", "n", "subcase", "d_decom", "d_proper",
                  "d_quantity", "d_upper", "d_upper_approx", "achievable_by")
#: CSV header of ``sweep --mode feasibility``
FEASIBILITY_COLUMNS = ("M", "N", "d", "region", "linear", "asymptotic",
                       "proper_holds", "binding_p", "binding_q")

THREADS_ENV = "IA_DOF_THREADS"


class UsageError(Exception):
    """Malformed flags; maps to exit code 2."""


class _Refused(Exception):
    """Infeasible or refused request; maps to exit code 3."""

    def __init__(self, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.detail = detail or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- value parsing ------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _positive_rat(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an integer or 'p/q', got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
    return value


def _int_range(text: str) -> tuple[int, int]:
    """``"a..b"`` (inclusive) or a single integer."""
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b', got {text!r}")
    if lo < 1:
        raise argparse.ArgumentTypeError(f"range must start at 1 or above, got {text!r}")
    return lo, hi


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive tolerance, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {text!r}")
    return value


# -- serialization ------------------------------------------------------------

def _rat(record: dict, key: str, value) -> None:
    """Store ``value`` under ``key`` as ``"num/den"`` plus ``key_approx``."""
    if value is None:
        record[key] = None
        record[f"{key}_approx"] = None
    elif value is INF:
        record[key] = "inf"
        record[f"{key}_approx"] = None
    else:
        record[key] = format_rat(value)
        record[f"{key}_approx"] = float(value)


def _cfg_dict(cfg: SystemConfig) -> dict:
    return {"G": cfg.G, "K": cfg.K, "M": cfg.M, "N": cfg.N}


def _region_dict(region: RegionClass) -> dict:
    return {"region": region.region, "n": region.n, "subcase": region.subcase,
            "at_limit": region.at_limit, "label": region.label()}


def report_dict(cfg: SystemConfig, report: DoFReport) -> dict:
    out = {"config": _cfg_dict(cfg), **_region_dict(report.region)}
    _rat(out, "d_decom", report.d_decom)
    _rat(out, "d_proper", report.d_proper)
    _rat(out, "d_quantity", report.d_quantity)
    _rat(out, "d_upper", report.d_upper)
    out["achievable_by"] = report.achievable_by
    return out


def verdict_dict(cfg: SystemConfig, verdict: FeasibilityVerdict) -> dict:
    out = {"config": _cfg_dict(cfg)}
    _rat(out, "d", verdict.d)
    out.update(_region_dict(verdict.region))
    out["linear"] = verdict.linear
    out["asymptotic"] = verdict.asymptotic
    out["proper_holds"] = verdict.proper_holds
    if verdict.binding_pair is None:
        out["binding_pair"] = None
    else:
        out["binding_pair"] = {"p": verdict.binding_pair[0], "q": verdict.binding_pair[1],
                               "side": str(verdict.binding_side.value),
                               "n": verdict.binding_index}
    return out


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2)


# -- commands -----------------------------------------------------------------

def _cfg(args) -> SystemConfig:
    try:
        return SystemConfig(args.G, args.K, args.M, args.N)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_dof(args) -> tuple[int, str]:
    cfg = _cfg(args)
    return EXIT_OK, _dumps(report_dict(cfg, dof_upper(cfg)))


def cmd_feasible(args) -> tuple[int, str]:
    cfg = _cfg(args)
    verdict = feasible_linear(cfg, args.d, debug=args.debug)
    return EXIT_OK, _dumps(verdict_dict(cfg, verdict))


def cmd_chain(args) -> tuple[int, str]:
    cfg = _cfg(args)
    try:
        chain = subspace_chain(cfg)
        bound = genie_bound_recursive(cfg)
    except NonTerminatingChainError as exc:
        detail = {"config": _cfg_dict(cfg), **_region_dict(dof_upper(cfg).region)}
        raise _Refused(str(exc), detail)
    out = {"config": _cfg_dict(cfg), "side": chain.side.value, "length": chain.length,
           "dims": [format_rat(x) for x in chain.dims[2:]],
           "seeds": [format_rat(x) for x in chain.dims[:2]]}
    _rat(out, "genie_bound", bound)
    if args.d is not None:
        try:
            profile = genie_dims(cfg, args.d)
        except GenieBoundExceeded as exc:
            raise _Refused(str(exc), {"genie_bound": format_rat(exc.bound),
                                      "cap_index": exc.cap_index})
        out["genie"] = {"d": format_rat(profile.d),
                        "dims": [format_rat(x) for x in profile.dims]}
    return EXIT_OK, _dumps(out)


def _side_table(G: int, K: int, side: Side, n_max: int) -> list[dict]:
    rows = []
    for pair in pq_sequence(G, K, side, n_max):
        if pair.n < 0:
            continue
        row = {"n": pair.n, "p": pair.p, "q": pair.q}
        _rat(row, "C", pair.ratio)
        try:
            _rat(row, "D", d_boundary(G, K, side, pair.n))
        except SequenceError:
            _rat(row, "D", None)
        rows.append(row)
    return rows


def cmd_sequences(args) -> tuple[int, str]:
    if args.G < 2:
        raise UsageError(f"G must be >= 2, got {args.G}")
    out = {"G": args.G, "K": args.K,
           "A": _side_table(args.G, args.K, Side.A, args.n_max),
           "B": _side_table(args.G, args.K, Side.B, args.n_max)}
    return EXIT_OK, _dumps(out)


def cmd_synth(args) -> tuple[int, str]:
    cfg = _cfg(args)
    try:
        m_min = min_spatial_extension(cfg)
    except NotAchievableError as exc:
        report = dof_upper(cfg)
        verdict = feasible_linear(cfg, report.d_upper)
        raise _Refused(str(exc), {"dof": report_dict(cfg, report),
                                  "verdict": verdict_dict(cfg, verdict)})
    m = m_min if args.extension is None else args.extension
    if m % m_min:
        raise UsageError(
            f"extension {m} leaves fractional streams; use a multiple of {m_min}")
    ext = cfg.extended(m)
    plan = synthesis_plan(ext)
    channels = gen_channels(ext, args.seed)
    try:
        transceiver = synthesize(ext, channels, rank_tol=args.rank_tol)
    except (SynthesisError, AlignedMatrixSearchError) as exc:
        return EXIT_FAILED, _dumps({"config": _cfg_dict(cfg), "extension": m,
                                    "pass": False, "error": str(exc)})
    report = verify_ia(ext, channels, transceiver, zf_tol=args.zf_tol, rank_tol=args.rank_tol)
    out = {"config": _cfg_dict(cfg), "extension": m, "extended": _cfg_dict(ext),
           "d": int(plan.d), "seed": args.seed,
           "plan": {"route": plan.route, "side": plan.side.value, "n": plan.n,
                    "t": plan.t, "aligned_matrices": transceiver.diagnostics["aligned"],
                    "columns": format_rat(plan.columns)}}
    out.update(report.as_dict())
    if args.dump is not None:
        out["files"] = dump_transceiver(args.dump, transceiver)
    return (EXIT_OK if report.passed else EXIT_FAILED), _dumps(out)


def _bounds_row(cfg: SystemConfig) -> dict:
    report = dof_upper(cfg)
    region = report.region
    return {"M": cfg.M, "N": cfg.N, "region": region.region,
            "n": "" if region.n is None else region.n,
            "subcase": region.subcase or "",
            "d_decom": format_rat(report.d_decom), "d_proper": format_rat(report.d_proper),
            "d_quantity": "" if report.d_quantity is None else format_rat(report.d_quantity),
            "d_upper": format_rat(report.d_upper), "d_upper_approx": float(report.d_upper),
            "achievable_by": report.achievable_by}


def _feasibility_row(cfg: SystemConfig, d: Fraction) -> dict:
    v = feasible_linear(cfg, d)
    p, q = v.binding_pair if v.binding_pair else ("", "")
    return {"M": cfg.M, "N": cfg.N, "d": format_rat(d), "region": v.region.region,
            "linear": v.linear, "asymptotic": v.asymptotic,
            "proper_holds": v.proper_holds, "binding_p": p, "binding_q": q}


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def sweep_rows(G: int, K: int, M_range: tuple[int, int], N_range: tuple[int, int],
               mode: str = "bounds", d: Optional[Fraction] = None,
               threads: int = 1) -> list[dict]:
    """Records in M-major, then N, order; computed on up to ``threads`` workers."""
    if M_range[0] > M_range[1] or N_range[0] > N_range[1]:
        raise UsageError("empty M or N range")
    cfgs = [SystemConfig(G, K, M, N)
            for M in range(M_range[0], M_range[1] + 1)
            for N in range(N_range[0], N_range[1] + 1)]
    if mode == "bounds":
        work = _bounds_row
    else:
        if d is None:
            raise UsageError("--mode feasibility needs --d")
        work = lambda cfg: _feasibility_row(cfg, d)  # noqa: E731
    if threads <= 1:
        return [work(cfg) for cfg in cfgs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, cfgs))


def cmd_sweep(args) -> tuple[int, str]:
    if args.G < 2:
        raise UsageError(f"G must be >= 2, got {args.G}")
    rows = sweep_rows(args.G, args.K, args.M, args.N, args.mode, args.d, _threads())
    if args.json or args.format == "json":
        return EXIT_OK, _dumps(rows)
    columns = BOUNDS_COLUMNS if args.mode == "bounds" else FEASIBILITY_COLUMNS
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return EXIT_OK, buf.getvalue().rstrip("\n")


# -- parser -------------------------------------------------------------------

_SWEEP_HELP = (
    "CSV columns, bounds mode: " + ",".join(BOUNDS_COLUMNS) + ". "
    "CSV columns, feasibility mode: " + ",".join(FEASIBILITY_COLUMNS) + ". "
    "Rows are ordered by M, then N. Set " + THREADS_ENV + " to cap worker threads.")


def _add_cfg(p: argparse.ArgumentParser, antennas: bool = True) -> None:
    p.add_argument("--G", type=_positive_int, required=True, help="number of cells")
    p.add_argument("--K", type=_positive_int, required=True, help="users per cell")
    if antennas:
        p.add_argument("--M", type=_positive_int, required=True, help="antennas per BS")
        p.add_argument("--N", type=_positive_int, required=True, help="antennas per user")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ibcdof", description=__doc__.split("\n\n")[0].strip(),
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--json", action="store_true",
                        help="force JSON output (sweep defaults to CSV)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dof", help="DoF bounds and region")
    _add_cfg(p)
    p.set_defaults(func=cmd_dof)

    p = sub.add_parser("feasible", help="IA feasibility of d streams per user")
    _add_cfg(p)
    p.add_argument("--d", type=_positive_rat, required=True, help="integer or 'p/q'")
    p.add_argument("--debug", action="store_true",
                   help="scan extra (p, q) pairs past the cutoff as a cross-check")
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("chain", help="irresolvable-subspace chain and genie bound")
    _add_cfg(p)
    p.add_argument("--d", type=_positive_rat, default=None,
                   help="also report maximal genie dimensions at this d")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("sequences", help="(p, q), C and D values of both sides")
    _add_cfg(p, antennas=False)
    p.add_argument("--n-max", type=_positive_int, default=10, dest="n_max")
    p.set_defaults(func=cmd_sequences)

    p = sub.add_parser("synth", help="synthesize and verify IA transceivers")
    _add_cfg(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--zf-tol", type=_nonneg_float, default=DEFAULT_ZF_TOL, dest="zf_tol")
    p.add_argument("--rank-tol", type=_nonneg_float, default=DEFAULT_RANK_TOL, dest="rank_tol")
    p.add_argument("--dump", default=None, metavar="DIR",
                   help="write V_j.txt and U_i_k.txt matrix files into DIR")
    p.add_argument("--extension", type=_positive_int, default=None,
                   help="spatial extension factor (default: the minimal one)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sweep", help="grid of bounds or feasibility verdicts",
                       description=_SWEEP_HELP)
    _add_cfg(p, antennas=False)
    p.add_argument("--M", type=_int_range, required=True, help="inclusive range 'a..b'")
    p.add_argument("--N", type=_int_range, required=True, help="inclusive range 'a..b'")
    p.add_argument("--mode", choices=("bounds", "feasibility"), default="bounds")
    p.add_argument("--d", type=_positive_rat, default=None,
                   help="stream count for feasibility mode")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="same as --format json")
    p.set_defaults(func=cmd_sweep)
    return parser


def _error(code: int, kind: str, message: str, detail: Optional[dict] = None) -> int:
    doc = {"error": kind, "message": message, "exit_code": code}
    if detail:
        doc["detail"] = detail
    print(json.dumps(doc), file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, text = args.func(args)
    except UsageError as exc:
        return _error(EXIT_USAGE, "usage", str(exc))
    except _Refused as exc:
        return _error(EXIT_REFUSED, "refused", str(exc), exc.detail)
    print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
