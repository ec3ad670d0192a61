"""Coflow makespan scheduling on parallel switch cores."""

from .lowerbound import LowerBounds, lb_heterogeneous, lb_identical, lower_bounds
from .model import Assignment, Coflow, Flow, Granularity, Instance, MakespanResult, NetworkSpec, port_loads
from .oracle import OracleLimits, OracleResult, brute_force_coflow, brute_force_flow
from .realizer import CoreScheduleSlice, RealizedSchedule, realize, realize_core, simulate_discrete
from .schedulers import SchedulerKind, cls, cls_h, flpt, flpt_h, fls, predicted_makespan, schedule, weaver

__all__ = [
    "Assignment", "Coflow", "CoreScheduleSlice", "Flow", "Granularity", "Instance", "LowerBounds",
    "MakespanResult", "NetworkSpec", "OracleLimits", "OracleResult", "RealizedSchedule", "SchedulerKind",
    "brute_force_coflow", "brute_force_flow", "cls", "cls_h", "flpt", "flpt_h", "fls",
    "lb_heterogeneous", "lb_identical", "lower_bounds", "port_loads", "predicted_makespan",
    "realize", "realize_core", "schedule", "simulate_discrete", "weaver",
]
