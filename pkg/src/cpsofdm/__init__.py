"""CPS-OFDM link-level simulator with cubic-metric-reducing constellation
shaping."""

from .waveform import (
    GiMode,
    WaveformParams,
    build_precoder,
    build_synthesis,
    transmit_block,
    serialize_blocks,
    paper_params,
)
from .metrics import CmParams, OsbRegion, ccdf, cm_db, esd, evm, osbee_direct, rcm
from .ematrix import EMatrix, build_E_matrix, build_u_vector
from .shaper import ShapingProblem, ShapingSolution, SolverOptions, solve_offset
from .config import Scenario

__all__ = [
    "GiMode", "WaveformParams", "build_precoder", "build_synthesis",
    "transmit_block", "serialize_blocks", "paper_params",
    "CmParams", "OsbRegion", "ccdf", "cm_db", "esd", "evm", "osbee_direct", "rcm",
    "EMatrix", "build_E_matrix", "build_u_vector",
    "ShapingProblem", "ShapingSolution", "SolverOptions", "solve_offset",
    "Scenario",
]

__version__ = "0.1.0"
