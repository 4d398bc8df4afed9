"""Inverted-threshold anti-coordination dynamics: simulation, potentials, solvers, enumeration."""

__version__ = "0.1.0"

from .core import (
    BudgetError,
    Graph,
    Mode,
    PreconditionError,
    ThresholdSystem,
    UsageError,
    is_fixed_point,
    successor,
)
from .dynamics import FixedPoint, LongCycle, Sequential, Synchronous, Trace, TwoCycle, Unconverged, simulate
from .enumeration import count_fixed_points, enumerate_fixed_points, enumerate_sync_cycles
from .solvers import Found, NoEquilibrium, NotApplicable, solve_auto

__all__ = [
    "BudgetError", "Graph", "Mode", "PreconditionError", "ThresholdSystem", "UsageError",
    "is_fixed_point", "successor", "FixedPoint", "LongCycle", "Sequential", "Synchronous",
    "Trace", "TwoCycle", "Unconverged", "simulate", "count_fixed_points",
    "enumerate_fixed_points", "enumerate_sync_cycles", "Found", "NoEquilibrium",
    "NotApplicable", "solve_auto",
]
