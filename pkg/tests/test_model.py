"""
Tests: domain types, port loads and assignment ledgers.
"""

from fractions import Fraction

import pytest

from conftest import build, network, single_link
from coflowsched.model import (
    Assignment,
    Coflow,
    Flow,
    Granularity,
    Instance,
    MakespanResult,
    NetworkSpec,
    format_load,
    parse_load,
    port_loads,
    service_time,
)


class TestFlowAndCoflow:
    """Validation of flows and coflows."""

    def test_flow_key_and_str(self):
        flow = Flow(2, 3, 7, 5)
        assert flow.key == (2, 3, 7)
        assert str(flow) == "2->3@7"

    @pytest.mark.parametrize("size", [0, -1, 2.5])
    def test_flow_rejects_bad_size(self, size):
        with pytest.raises(ValueError):
            Flow(1, 1, 1, size)

    def test_flow_rejects_zero_port(self):
        with pytest.raises(ValueError):
            Flow(0, 1, 1, 3)

    def test_coflow_rejects_foreign_flow(self):
        with pytest.raises(ValueError, match="does not belong"):
            Coflow(1, (Flow(1, 1, 2, 3),))

    def test_coflow_rejects_duplicate_link(self):
        with pytest.raises(ValueError, match="Duplicate"):
            Coflow(1, (Flow(1, 1, 1, 3), Flow(1, 1, 1, 4)))

    def test_from_demands_drops_zero_entries(self):
        coflow = Coflow.from_demands(4, {(1, 2): 3, (2, 2): 0, (3, 1): 5})
        assert coflow.width == 2
        assert coflow.total_size == 8

    def test_port_loads_per_coflow(self):
        coflow = Coflow.from_demands(1, {(1, 1): 2, (1, 2): 3, (2, 2): 4})
        assert coflow.input_loads == {1: 5, 2: 4}
        assert coflow.output_loads == {1: 2, 2: 7}


class TestNetworkAndInstance:
    """Network specs and instance validation."""

    def test_default_speeds_are_unit(self):
        spec = NetworkSpec(3, 4)
        assert spec.speeds == (1, 1, 1)
        assert spec.is_identical
        assert spec.total_speed == 3

    def test_speeds_become_fractions(self):
        spec = NetworkSpec(2, 4, (1, Fraction(5, 2)))
        assert spec.speeds == (Fraction(1), Fraction(5, 2))
        assert not spec.is_identical
        assert spec.max_speed == Fraction(5, 2)

    @pytest.mark.parametrize("kwargs", [
        dict(cores=0, ports=2),
        dict(cores=2, ports=0),
        dict(cores=2, ports=2, speeds=(1,)),
        dict(cores=2, ports=2, speeds=(1, 0)),
    ])
    def test_network_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            NetworkSpec(**kwargs)

    def test_instance_rejects_port_outside_switch(self):
        with pytest.raises(ValueError, match="outside"):
            build(2, {1: {(5, 1): 3}}, ports=4)

    def test_instance_rejects_duplicate_coflow_id(self):
        coflow = Coflow.from_demands(1, {(1, 1): 1})
        with pytest.raises(ValueError, match="Duplicate coflow"):
            Instance(network(2), (coflow, coflow))

    def test_flows_in_instance_order(self):
        instance = build(2, {2: {(1, 1): 1, (2, 2): 2}, 1: {(3, 3): 3}})
        assert [f.key for f in instance.flows] == [(1, 1, 2), (2, 2, 2), (3, 3, 1)]
        assert instance.flow_count == 3

    def test_with_network_keeps_coflows(self):
        instance = single_link([3, 4])
        faster = instance.with_network(network(2, 2, (1, 2)))
        assert faster.coflows == instance.coflows
        assert faster.network.speeds == (1, 2)


class TestPortLoads:
    """Total demand per port across coflows."""

    def test_single_flow(self):
        inputs, outputs = port_loads(build(1, {1: {(1, 1): 10}}))
        assert inputs[1] == 10
        assert outputs[1] == 10

    def test_additive_across_coflows(self):
        inputs, outputs = port_loads(build(1, {1: {(1, 1): 3}, 2: {(1, 2): 4}}))
        assert inputs[1] == 7
        assert outputs[1] == 3
        assert outputs[2] == 4

    def test_empty_instance_all_zero(self):
        inputs, outputs = port_loads(Instance(network(2, 3)))
        assert inputs == {1: 0, 2: 0, 3: 0}
        assert outputs == {1: 0, 2: 0, 3: 0}


class TestAssignment:
    """Ledger bookkeeping."""

    def test_place_flow_updates_ledgers(self):
        assignment = Assignment(network(2, 3), Granularity.FLOW)
        assignment.place_flow(Flow(1, 2, 1, 4), 1)
        assignment.place_flow(Flow(1, 3, 1, 2), 1)
        assert assignment.input_load(1, 1) == 6
        assert assignment.output_load(2, 1) == 4
        assert assignment.load_in == {(1, 1): 6}
        assert assignment.core_load(1) == 6
        assert assignment.core_load(0) == 0
        assert assignment.ledgers_consistent()

    def test_speed_scaled_ledger(self):
        assignment = Assignment(network(2, 2, (1, 3)), Granularity.FLOW)
        assignment.place_flow(Flow(1, 1, 1, 4), 1)
        assert assignment.input_load(1, 1) == Fraction(4, 3)

    def test_duplicate_placement_rejected(self):
        assignment = Assignment(network(2), Granularity.FLOW)
        flow = Flow(1, 1, 1, 1)
        assignment.place_flow(flow, 0)
        with pytest.raises(ValueError, match="already assigned"):
            assignment.place_flow(flow, 1)

    def test_core_out_of_range_rejected(self):
        assignment = Assignment(network(2), Granularity.FLOW)
        with pytest.raises(ValueError, match="outside"):
            assignment.place_flow(Flow(1, 1, 1, 1), 2)

    def test_completeness(self):
        instance = build(2, {1: {(1, 1): 1, (2, 2): 1}})
        assignment = Assignment(instance.network, Granularity.COFLOW)
        assert not assignment.is_complete(instance)
        assignment.place_coflow(instance.coflows[0], 1)
        assert assignment.is_complete(instance)
        assert assignment.missing_flows(instance) == []

    def test_coflow_granularity_requires_one_core(self):
        instance = build(2, {1: {(1, 1): 1, (2, 2): 1}})
        assignment = Assignment(instance.network, Granularity.COFLOW)
        first, second = instance.coflows[0].flows
        assignment.place_flow(first, 0)
        assignment.place_flow(second, 1)
        assert not assignment.is_complete(instance)

    def test_snapshot_is_sorted(self):
        assignment = Assignment(network(2), Granularity.FLOW)
        assignment.place_flow(Flow(2, 2, 1, 1), 0)
        assignment.place_flow(Flow(1, 1, 1, 1), 1)
        assert assignment.snapshot() == (((1, 1, 1), 1), ((2, 2, 1), 0))


class TestLoadFormatting:
    """Exact text form of loads."""

    def test_overall_is_max(self):
        assert MakespanResult({0: 3, 1: Fraction(7, 2)}).overall == Fraction(7, 2)
        assert MakespanResult({}).overall == 0

    @pytest.mark.parametrize("value,text", [(5, "5"), (Fraction(6, 3), "2"), (Fraction(16, 3), "16/3")])
    def test_format_load(self, value, text):
        assert format_load(value) == text

    def test_parse_load(self):
        assert parse_load(" 16/3 ") == Fraction(16, 3)
        with pytest.raises(ValueError):
            parse_load("x/3")

    def test_service_time(self):
        assert service_time(6, Fraction(1)) == 6
        assert service_time(6, Fraction(4)) == Fraction(3, 2)
