"""Exact minimum-energy scheduling with speed scaling and power-down for agreeable deadlines."""

from ._backend import NAME as BACKEND
from .dp import FHTables, OTable, Solution, compute_f, compute_fh, compute_h, dp_solve, reconstruct, solve
from .model import (
    OFF,
    ON,
    CostBreakdown,
    EnergyModel,
    InfeasibleError,
    Instance,
    InstanceError,
    InvalidScheduleError,
    Job,
    NonAgreeableError,
    Schedule,
    Segment,
    Subinstance,
    Violation,
    critical_speed,
    density,
    evaluate_cost,
    g_star,
    validate_schedule,
)
from .squeeze import YTable, build_y_table
from .yds import extract_dense_regions, yds_schedule

__all__ = [
    "BACKEND", "OFF", "ON", "CostBreakdown", "EnergyModel", "FHTables", "InfeasibleError", "Instance",
    "InstanceError", "InvalidScheduleError", "Job", "NonAgreeableError", "OTable", "Schedule", "Segment",
    "Solution", "Subinstance", "Violation", "YTable", "build_y_table", "compute_f", "compute_fh", "compute_h",
    "critical_speed", "density", "dp_solve", "evaluate_cost", "extract_dense_regions", "g_star", "reconstruct",
    "solve", "validate_schedule", "yds_schedule",
]
