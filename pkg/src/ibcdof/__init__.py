"""
Exact DoF bounds, feasibility tests and linear interference-alignment
transceivers for the G-cell, K-user-per-cell MIMO interference broadcast
channel (BS antennas ``M``, user antennas ``N``).
"""

from .alignment import (AlignedMatrixSearchError, AlignedMatrixSpec, ChannelSet,
                        aligned_matrix_specs, gen_channels, numerical_rank)
from .bounds import (DoFReport, RegionClass, classify_region, dof_decomposition,
                     dof_proper, dof_quantity, dof_upper)
from .chain import (ChainReport, GenieBoundExceeded, GenieProfile,
                    NonTerminatingChainError, genie_bound_recursive, genie_dims,
                    subspace_chain)
from .config import SystemConfig
from .feasibility import (CONJECTURED, FEASIBLE, INFEASIBLE, FeasibilityVerdict,
                          feasible_asymptotic, feasible_linear, min_spatial_extension)
from .plan import NotAchievableError, SynthesisPlan, synthesis_plan
from .rational import (INF, PQPair, SequenceError, Side, c_limit, c_sequence,
                       d_boundary, format_rat, kbar, parse_rat, pq_sequence)
from .synth import (SynthesisError, Transceiver, VerificationReport,
                    dump_transceiver, read_matrix, synthesize, verify_ia)

__version__ = "0.1.0"

__all__ = [
    "AlignedMatrixSearchError", "AlignedMatrixSpec", "ChannelSet",
    "aligned_matrix_specs", "gen_channels", "numerical_rank",
    "DoFReport", "RegionClass", "classify_region", "dof_decomposition",
    "dof_proper", "dof_quantity", "dof_upper",
    "ChainReport", "GenieBoundExceeded", "GenieProfile", "NonTerminatingChainError",
    "genie_bound_recursive", "genie_dims", "subspace_chain",
    "SystemConfig",
    "CONJECTURED", "FEASIBLE", "INFEASIBLE", "FeasibilityVerdict",
    "feasible_asymptotic", "feasible_linear", "min_spatial_extension",
    "NotAchievableError", "SynthesisPlan", "synthesis_plan",
    "INF", "PQPair", "SequenceError", "Side", "c_limit", "c_sequence",
    "d_boundary", "format_rat", "kbar", "parse_rat", "pq_sequence",
    "SynthesisError", "Transceiver", "VerificationReport", "dump_transceiver",
    "read_matrix", "synthesize", "verify_ia",
]
