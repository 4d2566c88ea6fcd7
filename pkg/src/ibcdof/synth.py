"""
Closed-form linear IA transceivers and their numerical audit.

``synthesize`` follows the plan of :mod:`ibcdof.plan`:

* V route: each aligned matrix contributes null-space columns that are
  unstacked into transmit vectors of the BSs owning its block columns; each
  user then keeps the orthogonal complement of its residual interference.
* U route: the mirror, with receive vectors taken from left null spaces and
  each BS zero-forcing the interference it still causes.
* Chain index 1: no alignment; one side draws random subspaces and the
  other zero-forces.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .alignment import (PROBE_SEED, AlignedMatrixSpec, ChannelSet,
                        aligned_matrix_specs, gen_channels, numerical_rank)
from .config import SystemConfig
from .plan import SynthesisPlan, synthesis_plan

__all__ = [
    "Transceiver", "VerificationReport", "SynthesisError", "synthesize",
    "verify_ia", "probe_synthesis_ok", "write_matrix", "read_matrix",
    "dump_transceiver",
]

DEFAULT_ZF_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-6


class SynthesisError(RuntimeError):
    """The construction cannot proceed (bad precondition or rank deficiency)."""


@dataclass
class Transceiver:
    """Transmit matrices ``V[j]`` (``M x K d``) and receive matrices ``U[i][k]`` (``N x d``)."""

    V: list
    U: list
    d: int
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VerificationReport:
    zf_residual: float
    direct_rank_ok: list
    v_ranks: list
    u_ranks: list
    passed: bool
    zf_tol: float
    rank_tol: float

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "zf_residual": self.zf_residual,
            "direct_rank_ok": list(self.direct_rank_ok),
            "v_ranks": list(self.v_ranks),
            "u_ranks": [list(r) for r in self.u_ranks],
            "tolerance": {"zf_tol": self.zf_tol, "rank_tol": self.rank_tol},
        }


def _rng(channels: ChannelSet) -> np.random.Generator:
    # separate stream from the one that drew the channels
    return np.random.default_rng(np.random.SeedSequence(channels.rng_seed, spawn_key=(1,)))


def _crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _right_null(A: np.ndarray, rank_tol: float) -> tuple[np.ndarray, int]:
    """Orthonormal basis of the right null space and the measured rank."""
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=complex), 0
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].conj().T, rank


def _pick(basis: np.ndarray, count: int, rng: np.random.Generator, what: str) -> np.ndarray:
    """``count`` orthonormal columns from the span of ``basis``."""
    have = basis.shape[1]
    if have < count:
        raise SynthesisError(f"{what}: null space has dimension {have}, need {count}")
    if have == count:
        return basis
    q, _ = np.linalg.qr(basis @ _crandn(rng, have, count))
    return q


def _normalize(A: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise SynthesisError("zero column in a transceiver matrix")
    return A / norms


def _check_plan(cfg: SystemConfig, d: Optional[int]) -> SynthesisPlan:
    plan = synthesis_plan(cfg, d)
    if plan.d > synthesis_plan(cfg).d:
        raise SynthesisError(f"d={plan.d} exceeds the DoF bound {synthesis_plan(cfg).d} of {cfg}")
    if not plan.is_integral():
        raise SynthesisError(
            f"{cfg} is not integral at d={plan.d} (columns per aligned matrix "
            f"{plan.columns}); apply spatial extension first")
    return plan


def synthesize(cfg: SystemConfig, channels: ChannelSet, d: Optional[int] = None,
               rank_tol: float = DEFAULT_RANK_TOL,
               specs: Optional[list[AlignedMatrixSpec]] = None) -> Transceiver:
    """Build transmit and receive matrices for ``d`` streams per user.

    Parameters
    ----------
    cfg : SystemConfig
        Region II system, already spatially extended so that ``d`` and the
        per-aligned-matrix column count are integers.
    channels : ChannelSet
    d : int, optional
        Streams per user; defaults to the DoF bound.
    specs : list of AlignedMatrixSpec, optional
        Layouts to use instead of :func:`aligned_matrix_specs`.

    Raises
    ------
    NotAchievableError
        Region I or a sequence-limit ratio.
    SynthesisError
        Non-integral sizes or a rank deficiency during construction.
    """
    plan = _check_plan(cfg, d)
    if channels.H.shape != (cfg.G, cfg.K, cfg.G, cfg.N, cfg.M):
        raise SynthesisError(f"channel shape {channels.H.shape} does not match {cfg}")
    if specs is None:
        specs = aligned_matrix_specs(cfg, rank_tol=rank_tol)
    rng = _rng(channels)
    dd, cols = int(plan.d), int(plan.columns)
    G, K, M, N = cfg.G, cfg.K, cfg.M, cfg.N
    H = channels.H
    diag = {"route": plan.route, "side": str(plan.side), "n": plan.n, "t": plan.t,
            "aligned": len(specs), "aligned_nullities": [], "residual_ranks": []}

    if plan.route == "V":
        pieces = [[] for _ in range(G)]
        if plan.t == 0:
            for j in range(G):
                pieces[j].append(_pick(np.eye(M, dtype=complex), K * dd, rng, f"BS {j}"))
        for spec in specs:
            basis, rank = _right_null(spec.matrix(cfg, channels), rank_tol)
            diag["aligned_nullities"].append(basis.shape[1])
            W = _pick(basis, cols, rng, f"aligned matrix rooted at {spec.root}")
            for b, j in enumerate(spec.col_blocks):
                pieces[j].append(W[b * M:(b + 1) * M])
        V = []
        for j in range(G):
            Vj = np.hstack(pieces[j])
            if Vj.shape[1] != K * dd:
                raise SynthesisError(f"BS {j} collected {Vj.shape[1]} vectors, expected {K * dd}")
            V.append(_normalize(Vj))
        U = []
        for i in range(G):
            row = []
            for k in range(K):
                Q = np.hstack([H[i, k, j] @ V[j] for j in range(G) if j != i])
                basis, rank = _right_null(Q.conj().T, rank_tol)
                diag["residual_ranks"].append(rank)
                row.append(_normalize(_pick(basis, dd, rng, f"user ({i},{k})")))
            U.append(row)
    else:
        pieces = {(i, k): [] for i in range(G) for k in range(K)}
        if plan.t == 0:
            for key in pieces:
                pieces[key].append(_pick(np.eye(N, dtype=complex), dd, rng, f"user {key}"))
        for spec in specs:
            basis, rank = _right_null(spec.matrix(cfg, channels).conj().T, rank_tol)
            diag["aligned_nullities"].append(basis.shape[1])
            Z = _pick(basis, cols, rng, f"aligned matrix rooted at {spec.root}")
            for r, user in enumerate(spec.row_blocks):
                pieces[tuple(user)].append(Z[r * N:(r + 1) * N])
        U = []
        for i in range(G):
            row = []
            for k in range(K):
                Uik = np.hstack(pieces[(i, k)])
                if Uik.shape[1] != dd:
                    raise SynthesisError(
                        f"user ({i},{k}) collected {Uik.shape[1]} vectors, expected {dd}")
                row.append(_normalize(Uik))
            U.append(row)
        V = []
        for j in range(G):
            Q = np.vstack([U[i][k].conj().T @ H[i, k, j]
                           for i in range(G) if i != j for k in range(K)])
            basis, rank = _right_null(Q, rank_tol)
            diag["residual_ranks"].append(rank)
            V.append(_normalize(_pick(basis, K * dd, rng, f"BS {j}")))
    return Transceiver(V, U, dd, diag)


def verify_ia(cfg: SystemConfig, channels: ChannelSet, t: Transceiver,
              zf_tol: float = DEFAULT_ZF_TOL,
              rank_tol: float = DEFAULT_RANK_TOL) -> VerificationReport:
    """Audit the zero-forcing and rank conditions; failures are reported, not raised."""
    G, K = cfg.G, cfg.K
    H = channels.H
    worst = 0.0
    for i in range(G):
        for k in range(K):
            Uik = t.U[i][k]
            nu = np.linalg.norm(Uik, 2)
            for j in range(G):
                if j == i:
                    continue
                Hij = H[i, k, j]
                denom = nu * np.linalg.norm(Hij, 2) * np.linalg.norm(t.V[j], 2)
                num = np.linalg.norm(Uik.conj().T @ Hij @ t.V[j], 2)
                worst = max(worst, float(num / denom) if denom > 0 else float("inf"))
    v_ranks = [numerical_rank(Vj, rank_tol) for Vj in t.V]
    u_ranks = [[numerical_rank(t.U[i][k], rank_tol) for k in range(K)] for i in range(G)]
    direct = []
    for i in range(G):
        block = np.vstack([t.U[i][k].conj().T @ H[i, k, i] @ t.V[i] for k in range(K)])
        direct.append(numerical_rank(block, rank_tol) == K * t.d)
    ranks_ok = (all(r == K * t.d for r in v_ranks)
                and all(r == t.d for row in u_ranks for r in row)
                and all(direct))
    passed = bool(worst <= zf_tol and ranks_ok)
    return VerificationReport(worst, direct, v_ranks, u_ranks, passed, zf_tol, rank_tol)


def probe_synthesis_ok(cfg: SystemConfig, specs) -> bool:
    """Whether a full synthesis with ``specs`` verifies on the probe channel."""
    channels = gen_channels(cfg, PROBE_SEED)
    try:
        t = synthesize(cfg, channels, specs=list(specs))
    except SynthesisError:
        return False
    return verify_ia(cfg, channels, t).passed


# -- text dump ---------------------------------------------------------------

def write_matrix(path, A: np.ndarray) -> None:
    """Write ``A`` as UTF-8 text: ``rows cols`` then one line per row of ``re,im`` pairs."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8").split("\n")
    rows, cols = (int(x) for x in text[0].split())
    A = np.zeros((rows, cols), dtype=complex)
    for r in range(rows):
        entries = text[r + 1].split()
        if len(entries) != cols:
            raise ValueError(f"{path}: row {r} has {len(entries)} entries, expected {cols}")
        for c, item in enumerate(entries):
            re, im = item.split(",")
            A[r, c] = complex(float(re), float(im))
    return A


def dump_transceiver(directory, t: Transceiver) -> list[str]:
    """Write every ``V[j]`` and ``U[i][k]`` into ``directory``; returns the file names."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for j, Vj in enumerate(t.V):
        name = f"V_{j + 1}.txt"
        write_matrix(os.path.join(directory, name), Vj)
        names.append(name)
    for i, row in enumerate(t.U):
        for k, Uik in enumerate(row):
            name = f"U_{i + 1}_{k + 1}.txt"
            write_matrix(os.path.join(directory, name), Uik)
            names.append(name)
    return names
