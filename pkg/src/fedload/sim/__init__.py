"""Event simulation: seeded replications, per-event costs, model cross-check."""

from ._backend import BACKEND
from .core import (
    CrossCheckRow,
    CrossCheckTable,
    SimReport,
    cross_check,
    per_event_cost,
    per_event_cost_hub,
    resolve_assignment,
    select_hub,
    simulate,
)

__all__ = [
    "BACKEND",
    "CrossCheckRow",
    "CrossCheckTable",
    "SimReport",
    "cross_check",
    "per_event_cost",
    "per_event_cost_hub",
    "resolve_assignment",
    "select_hub",
    "simulate",
]
