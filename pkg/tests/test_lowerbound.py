"""
Tests: lower bounds and approximation factors.
"""

from fractions import Fraction

import pytest

from conftest import build, network, random_instance, single_link
from coflowsched.lowerbound import (
    coflow_factor,
    lb_heterogeneous,
    lb_identical,
    list_scheduling_factor,
    lower_bounds,
    lpt_factor,
)
from coflowsched.model import Instance


class TestIdenticalBound:

    def test_single_flow_cannot_split(self):
        bounds = lb_identical(single_link([10], cores=2))
        assert bounds.port_lb == 5
        assert bounds.flow_lb == 10
        assert bounds.combined == 10

    def test_single_core_equals_max_port_load(self):
        instance = build(1, {1: {(1, 1): 3, (1, 2): 4}, 2: {(2, 2): 9}})
        assert lb_identical(instance).combined == 13

    def test_port_and_flow_bounds_tie(self):
        instance = build(2, {1: {(1, 1): 4, (1, 2): 4}})
        bounds = lb_identical(instance)
        assert (bounds.port_lb, bounds.flow_lb, bounds.combined) == (4, 4, 4)

    def test_empty_instance(self):
        bounds = lb_identical(Instance(network(3)))
        assert bounds.combined == 0

    def test_rejects_heterogeneous(self):
        with pytest.raises(ValueError):
            lb_identical(single_link([3], speeds=(1, 2)))


class TestHeterogeneousBound:

    def test_single_flow_on_fast_core(self):
        bounds = lb_heterogeneous(single_link([12], speeds=(1, 3)))
        assert bounds.port_lb == 3
        assert bounds.flow_lb == 4
        assert bounds.combined == 4

    def test_unit_speeds_match_identical(self):
        for seed in range(20):
            instance = random_instance(seed, cores=3)
            assert lb_heterogeneous(instance) == lb_identical(instance)

    def test_aggregate_speed(self):
        instance = build(3, {1: {(1, 1): 2, (1, 2): 2}, 2: {(1, 3): 2, (1, 4): 2}}, speeds=(1, 1, 2))
        bounds = lb_heterogeneous(instance)
        assert bounds.port_lb == 2
        assert bounds.flow_lb == 1
        assert bounds.combined == 2

    def test_dispatch(self):
        assert lower_bounds(single_link([12], speeds=(1, 3))).combined == 4
        assert lower_bounds(single_link([12])).combined == 12

    def test_combined_never_below_port_bound(self):
        for seed in range(20):
            bounds = lower_bounds(random_instance(seed, cores=5))
            assert bounds.combined >= bounds.port_lb


class TestFactors:

    @pytest.mark.parametrize("m,ls,lpt,cf", [
        (1, Fraction(1), Fraction(2), Fraction(2)),
        (2, Fraction(2), Fraction(7, 3), Fraction(4)),
        (3, Fraction(7, 3), Fraction(22, 9), Fraction(6)),
    ])
    def test_values(self, m, ls, lpt, cf):
        assert list_scheduling_factor(m) == ls
        assert lpt_factor(m) == lpt
        assert coflow_factor(m) == cf
