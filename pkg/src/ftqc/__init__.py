"""Fault-tolerant quantum computation workbench: CSS codes built from
classical dual-containing codes, cat-state syndrome extraction,
transversal logical gates, a measurement-conditioned Toffoli, and Monte
Carlo harnesses, all on a sparse state-vector simulator with injectable
per-gate noise."""

from .errors import (
    CapacityError,
    DecodeFailure,
    GadgetAbort,
    LeakageError,
    SyndromeFailure,
    UnsupportedCodeError,
)
from .f2linalg import LinearCode, load_code_file, min_distance, puncture, reed_muller
from .csscode import BlockLayout, CssCode, build_css_code
from .gadgets import ToffoliAncilla, WorkRegion
from .montecarlo import ExperimentConfig, memory_experiment, gadget_experiment
from .noise import ErrorLog, NoiseModel, ScriptedFault, make_rng
from .statevec import SparseState, basis_state, fidelity

__all__ = [
    "BlockLayout",
    "CapacityError",
    "CssCode",
    "DecodeFailure",
    "ErrorLog",
    "ExperimentConfig",
    "GadgetAbort",
    "LeakageError",
    "LinearCode",
    "NoiseModel",
    "ScriptedFault",
    "SparseState",
    "SyndromeFailure",
    "ToffoliAncilla",
    "UnsupportedCodeError",
    "WorkRegion",
    "basis_state",
    "build_css_code",
    "fidelity",
    "gadget_experiment",
    "load_code_file",
    "make_rng",
    "memory_experiment",
    "min_distance",
    "puncture",
    "reed_muller",
]

__version__ = "0.1.0"
