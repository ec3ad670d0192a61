"""
Lower bounds on the optimal makespan
====================================
``port_lb``  the busiest port's total demand spread over the aggregate speed.
``flow_lb``  the largest single flow on the fastest core (flows never split).
``combined`` the larger of the two; the safe denominator for bound checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, port_loads


@dataclass(frozen=True)
class LowerBounds:
    port_lb: Fraction
    flow_lb: Fraction

    @property
    def combined(self) -> Fraction:
        return max(self.port_lb, self.flow_lb)


def _max_port_load(instance: Instance) -> int:
    inputs, outputs = port_loads(instance)
    return max(max(inputs.values()), max(outputs.values()))


def _max_flow(instance: Instance) -> int:
    return max((f.size for f in instance.flows), default=0)


def lb_identical(instance: Instance) -> LowerBounds:
    if not instance.network.is_identical:
        raise ValueError("lb_identical requires unit speed factors on every core")
    return LowerBounds(
        port_lb=Fraction(_max_port_load(instance), instance.cores),
        flow_lb=Fraction(_max_flow(instance)),
    )


def lb_heterogeneous(instance: Instance) -> LowerBounds:
    network = instance.network
    return LowerBounds(
        port_lb=Fraction(_max_port_load(instance)) / network.total_speed,
        flow_lb=Fraction(_max_flow(instance)) / network.max_speed,
    )


def lower_bounds(instance: Instance) -> LowerBounds:
    if instance.network.is_identical:
        return lb_identical(instance)
    return lb_heterogeneous(instance)


# Approximation factors proven for the identical-network algorithms.

def list_scheduling_factor(cores: int) -> Fraction:
    return 3 - Fraction(2, cores)


def lpt_factor(cores: int) -> Fraction:
    return Fraction(8, 3) - Fraction(2, 3 * cores)


def coflow_factor(cores: int) -> Fraction:
    return Fraction(2 * cores)
