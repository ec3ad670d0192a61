"""
Exhaustive optimum for tiny instances.

Each core's cost is its max port load over its speed, which the realizer
always achieves, so the optimum is a pure assignment search.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .config import get_settings
from .model import Assignment, Flow, Granularity, Instance

logger = logging.getLogger("coflow-oracle")


@dataclass(frozen=True)
class OracleLimits:
    max_states: int = field(default_factory=lambda: get_settings().oracle_max_states)


@dataclass(frozen=True)
class OracleResult:
    optimum: Fraction
    witness: Assignment
    explored: int


def _makespan(groups: Sequence[Sequence[Flow]], choice: Sequence[int], instance: Instance) -> Fraction:
    n, speeds = instance.ports, instance.network.speeds
    load_in = [[0] * n for _ in speeds]
    load_out = [[0] * n for _ in speeds]
    for flows, h in zip(groups, choice):
        for flow in flows:
            load_in[h][flow.input - 1] += flow.size
            load_out[h][flow.output - 1] += flow.size
    return max(
        Fraction(max(max(load_in[h]), max(load_out[h]))) / speeds[h]
        for h in range(len(speeds))
    )


def _search(
    groups: Sequence[Sequence[Flow]],
    instance: Instance,
    limits: OracleLimits,
    symmetry: bool,
) -> tuple[Fraction, tuple[int, ...], int]:
    m = instance.cores
    states = m ** len(groups)
    if states > limits.max_states:
        raise ValueError(
            f"Refusing to enumerate {m}^{len(groups)} = {states} assignments "
            f"(limit {limits.max_states})"
        )
    if not groups:
        return Fraction(0), (), 1

    fixed = symmetry and instance.network.is_identical
    prefix: tuple[int, ...] = (0,) if fixed else ()
    best: Optional[Fraction] = None
    best_choice: tuple[int, ...] = ()
    explored = 0
    for rest in itertools.product(range(m), repeat=len(groups) - len(prefix)):
        choice = prefix + rest
        explored += 1
        value = _makespan(groups, choice, instance)
        if best is None or value < best:
            best, best_choice = value, choice
    return best, best_choice, explored


def brute_force_flow(
    instance: Instance,
    limits: Optional[OracleLimits] = None,
    symmetry: bool = True,
) -> OracleResult:
    limits = limits or OracleLimits()
    flows = instance.flows
    optimum, choice, explored = _search([[f] for f in flows], instance, limits, symmetry)

    witness = Assignment(instance.network, Granularity.FLOW)
    for flow, h in zip(flows, choice):
        witness.place_flow(flow, h)
    logger.debug("Flow-level optimum | flows=%d optimum=%s explored=%d", len(flows), optimum, explored)
    return OracleResult(optimum, witness, explored)


def brute_force_coflow(
    instance: Instance,
    limits: Optional[OracleLimits] = None,
    symmetry: bool = True,
) -> OracleResult:
    limits = limits or OracleLimits()
    coflows = instance.coflows
    optimum, choice, explored = _search([c.flows for c in coflows], instance, limits, symmetry)

    witness = Assignment(instance.network, Granularity.COFLOW)
    for coflow, h in zip(coflows, choice):
        witness.place_coflow(coflow, h)
    logger.debug("Coflow-level optimum | coflows=%d optimum=%s explored=%d", len(coflows), optimum, explored)
    return OracleResult(optimum, witness, explored)
