"""
Core-assignment schedulers
==========================
Flow-level list scheduling (FLS), its longest-first variant (FLPT), coflow-level
list scheduling (CLS), the speed-aware FLPT-h / CLS-h, and a reconstruction of
the Weaver baseline.

Every scheduler returns an :class:`Assignment`. Argmin ties always go to the
lowest core index; longest-first orders are stable on instance order.
"""

from __future__ import annotations

import logging
from enum import Enum
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .model import (
    Assignment,
    Flow,
    Granularity,
    Instance,
    Load,
    MakespanResult,
    service_time,
)

if TYPE_CHECKING:
    from .realizer import RealizedSchedule

logger = logging.getLogger("coflow-schedulers")


class SchedulerKind(str, Enum):
    FLS = "fls"
    FLPT = "flpt"
    CLS = "cls"
    FLPT_H = "flpt-h"
    CLS_H = "cls-h"
    WEAVER = "weaver"

    @property
    def granularity(self) -> Granularity:
        if self in (SchedulerKind.CLS, SchedulerKind.CLS_H):
            return Granularity.COFLOW
        return Granularity.FLOW

    @property
    def requires_identical(self) -> bool:
        return self in (SchedulerKind.FLS, SchedulerKind.FLPT, SchedulerKind.CLS)


# ─── Helpers ────────────────────────────────────────────────


def _argmin(values: Sequence[Load]) -> int:
    """Lowest index holding the minimum."""
    best = 0
    for h in range(1, len(values)):
        if values[h] < values[best]:
            best = h
    return best


def _require_identical(instance: Instance, name: str) -> None:
    if not instance.network.is_identical:
        raise ValueError(f"{name} requires an identical network (all speed factors 1)")


def longest_first(flows: Iterable[Flow]) -> list[Flow]:
    """Non-increasing size; equal sizes keep their instance order."""
    return sorted(flows, key=lambda f: -f.size)


def _list_schedule(instance: Instance, flows: Iterable[Flow], self_term: bool) -> Assignment:
    network = instance.network
    assignment = Assignment(network, Granularity.FLOW)
    cores = range(network.cores)
    for flow in flows:
        i, j = flow.input - 1, flow.output - 1
        objective = []
        for h in cores:
            value = assignment.input_row(h)[i] + assignment.output_row(h)[j]
            if self_term:
                value += service_time(flow.size, network.speeds[h])
            objective.append(value)
        core = _argmin(objective)
        logger.debug("Flow %s -> core %d | objective=%s", flow, core, objective[core])
        assignment.place_flow(flow, core)
    return assignment


def _coflow_list_schedule(instance: Instance) -> Assignment:
    network = instance.network
    assignment = Assignment(network, Granularity.COFLOW)
    for coflow in instance.coflows:
        objective = []
        for h in range(network.cores):
            speed = network.speeds[h]
            row_in, row_out = assignment.input_row(h), assignment.output_row(h)
            # max over (i, j) of in_i + out_j splits into max_i in_i + max_j out_j
            max_in = max(row_in)
            for port, load in coflow.input_loads.items():
                max_in = max(max_in, row_in[port - 1] + service_time(load, speed))
            max_out = max(row_out)
            for port, load in coflow.output_loads.items():
                max_out = max(max_out, row_out[port - 1] + service_time(load, speed))
            objective.append(max_in + max_out)
        core = _argmin(objective)
        logger.debug("Coflow %d -> core %d | objective=%s", coflow.id, core, objective[core])
        assignment.place_coflow(coflow, core)
    return assignment


# ─── Schedulers ─────────────────────────────────────────────


def fls(instance: Instance) -> Assignment:
    _require_identical(instance, "FLS")
    return _list_schedule(instance, instance.flows, self_term=False)


def flpt(instance: Instance) -> Assignment:
    _require_identical(instance, "FLPT")
    return _list_schedule(instance, longest_first(instance.flows), self_term=False)


def cls(instance: Instance) -> Assignment:
    _require_identical(instance, "CLS")
    return _coflow_list_schedule(instance)


def flpt_h(instance: Instance) -> Assignment:
    return _list_schedule(instance, longest_first(instance.flows), self_term=True)


def cls_h(instance: Instance) -> Assignment:
    return _coflow_list_schedule(instance)


def weaver(instance: Instance) -> Assignment:
    """Reimplementation of the Weaver baseline.

    Flows go longest first. A coflow's completion on a core is the largest
    load *of that coflow alone* on any port it uses there. A flow is critical
    when every core would push its coflow's completion past the current one;
    critical flows take the core with the smallest tentative completion, the
    rest go to the core with the least ``load_I + load_O + d/s``.
    """
    network = instance.network
    assignment = Assignment(network, Granularity.FLOW)
    cores = range(network.cores)
    # coflow -> per core (input port -> own load, output port -> own load)
    own: dict[int, list[tuple[dict[int, Load], dict[int, Load]]]] = {}

    for flow in longest_first(instance.flows):
        ledgers = own.setdefault(flow.coflow, [({}, {}) for _ in cores])
        current: Load = 0
        tentative: list[Load] = []
        balance: list[Load] = []
        for h in cores:
            own_in, own_out = ledgers[h]
            on_core = max(max(own_in.values(), default=0), max(own_out.values(), default=0))
            current = max(current, on_core)
            t = service_time(flow.size, network.speeds[h])
            tentative.append(max(
                on_core,
                own_in.get(flow.input, 0) + t,
                own_out.get(flow.output, 0) + t,
            ))
            balance.append(assignment.input_row(h)[flow.input - 1] + assignment.output_row(h)[flow.output - 1] + t)

        best = _argmin(tentative)
        if tentative[best] > current:
            core = best
            logger.debug("Critical flow %s -> core %d | completion=%s", flow, core, tentative[core])
        else:
            core = _argmin(balance)
            logger.debug("Non-critical flow %s -> core %d | balance=%s", flow, core, balance[core])
        assignment.place_flow(flow, core)
        own_in, own_out = ledgers[core]
        t = service_time(flow.size, network.speeds[core])
        own_in[flow.input] = own_in.get(flow.input, 0) + t
        own_out[flow.output] = own_out.get(flow.output, 0) + t
    return assignment


SCHEDULERS: dict[SchedulerKind, Callable[[Instance], Assignment]] = {
    SchedulerKind.FLS: fls,
    SchedulerKind.FLPT: flpt,
    SchedulerKind.CLS: cls,
    SchedulerKind.FLPT_H: flpt_h,
    SchedulerKind.CLS_H: cls_h,
    SchedulerKind.WEAVER: weaver,
}


def schedule(kind: SchedulerKind | str, instance: Instance) -> Assignment:
    kind = SchedulerKind(kind)
    assignment = SCHEDULERS[kind](instance)
    logger.debug("Scheduled | kind=%s flows=%d %r", kind.value, instance.flow_count, assignment)
    return assignment


# ─── Makespan ───────────────────────────────────────────────


def predicted_makespan(
    assignment: Assignment,
    instance: Instance,
    realized: "RealizedSchedule | None" = None,
) -> MakespanResult:
    """Per-core completion from the ledgers; per-coflow from the realized
    schedule when given, else from the ledgers of the ports each coflow uses."""
    missing = assignment.missing_flows(instance)
    if missing:
        raise ValueError(
            f"Assignment is incomplete: {len(missing)} flow(s) unassigned, first {missing[0]}"
        )

    per_core = {h: assignment.core_load(h) for h in range(instance.cores)}
    if realized is not None:
        per_coflow = realized.coflow_completion()
    else:
        per_coflow = {}
        for coflow in instance.coflows:
            completion: Load = 0
            for flow in coflow.flows:
                h = assignment.core_of(flow)
                completion = max(
                    completion,
                    assignment.input_load(flow.input, h),
                    assignment.output_load(flow.output, h),
                )
            per_coflow[coflow.id] = completion
    return MakespanResult(per_core=per_core, per_coflow=per_coflow)
