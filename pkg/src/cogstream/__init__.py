"""Cognitive-load-aware adaptive text streaming.

The package models per-passage comfortable reading speeds as log-normal
distributions, scores passage difficulty (readability indices or inline
load tags), splits a global word-rate budget across concurrent readers,
calibrates individual speeds with a PEST staircase, and serves paced word
streams over newline-delimited JSON.
"""

from .allocator import AllocationPlan, Join, Leave, Rescore, allocate, reallocate
from .cogload import (
    FogBreakdown,
    flesch_kincaid_grade,
    fog_to_score,
    gunning_fog,
    scan_chunk,
    scan_text,
    TagScanState,
)
from .errors import CogstreamError
from .pest import PestConfig, PestState, accept_same, simulate_reader, start, step
from .readmodel import (
    FitReport,
    LogNormalModel,
    SpeedSample,
    density_intersection,
    evaluate_fit,
    fit,
    ks_test,
    paired_t_test,
)
from .savings import GroupSpec, SavingsReport, optimize_split, savings_at
from .simulator import (
    PassageRecord,
    SimPoint,
    budget_for_srar,
    monte_carlo_srar,
    savings_table,
    srar_at_budget,
    synthetic_passages,
)
from .server import CogstreamServer, ServerConfig

__version__ = "0.1.0"

__all__ = [
    "AllocationPlan",
    "CogstreamError",
    "CogstreamServer",
    "FitReport",
    "FogBreakdown",
    "GroupSpec",
    "Join",
    "Leave",
    "LogNormalModel",
    "PassageRecord",
    "PestConfig",
    "PestState",
    "Rescore",
    "SavingsReport",
    "ServerConfig",
    "SimPoint",
    "SpeedSample",
    "TagScanState",
    "accept_same",
    "allocate",
    "budget_for_srar",
    "density_intersection",
    "evaluate_fit",
    "fit",
    "flesch_kincaid_grade",
    "fog_to_score",
    "gunning_fog",
    "ks_test",
    "monte_carlo_srar",
    "optimize_split",
    "paired_t_test",
    "reallocate",
    "savings_at",
    "savings_table",
    "scan_chunk",
    "scan_text",
    "simulate_reader",
    "srar_at_budget",
    "start",
    "step",
    "synthetic_passages",
]
