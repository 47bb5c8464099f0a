"""Load analysis and simulation for federated history-synchronization messaging.

Represents a federation as a tripartite user/room/server structure, computes
exact analytical per-server transaction loads, validates them by seeded
stochastic simulation, generates synthetic federations with matching
marginal statistics, and recommends per-room group-communication mechanisms.
"""

__version__ = "0.1.0"

from .analytics import (
    CumulativeSeries,
    LogHistogram,
    RankTable,
    SummaryStats,
    cumulative_fractions,
    log_histogram,
    room_rank_table,
    server_rank_table,
    summary,
)
from .generate import Empirical, GeneratorConfig, LogNormal, Zipf, fit, generate
from .io import load, save
from .loadmodel import (
    LoadProfile,
    ModelParams,
    TrafficMatrix,
    full_decentralization,
    load_profile,
    pairwise_rate,
    split_user,
    traffic_matrix,
)
from .mechanisms import FullMesh, Gossip, Hub, MechanismSpec, SpanningTree
from .structure import NetworkStructure, ValidationReport, validate

__all__ = [
    "CumulativeSeries",
    "Empirical",
    "FullMesh",
    "GeneratorConfig",
    "Gossip",
    "Hub",
    "LoadProfile",
    "LogHistogram",
    "LogNormal",
    "MechanismSpec",
    "ModelParams",
    "NetworkStructure",
    "RankTable",
    "SpanningTree",
    "SummaryStats",
    "TrafficMatrix",
    "ValidationReport",
    "Zipf",
    "__version__",
    "cumulative_fractions",
    "fit",
    "full_decentralization",
    "generate",
    "load",
    "load_profile",
    "log_histogram",
    "pairwise_rate",
    "room_rank_table",
    "save",
    "server_rank_table",
    "split_user",
    "summary",
    "traffic_matrix",
    "validate",
]
