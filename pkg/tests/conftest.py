"""
Shared pytest fixtures for the coflowsched test suite.

Provides:
  - COFLOW_* environment pinned before the package is imported
  - Small instance builders (single link, demand dicts)
  - The three-coflow CLS walk-through instance
  - Seeded random instances
  - A tiny coflow-benchmark trace written to tmp_path
"""

import os
from fractions import Fraction

import pytest

# ── Environment Setup ─────────────────────────
# Set env vars BEFORE importing the package so Settings picks them up

os.environ.update({
    "COFLOW_LOG_LEVEL": "DEBUG",
    "COFLOW_DEFAULT_TRIALS": "3",
    "COFLOW_WORKERS": "1",
    "COFLOW_ORACLE_MAX_STATES": "200000",
})

from coflowsched.config import get_settings  # noqa: E402
from coflowsched.model import Coflow, Flow, Instance, NetworkSpec  # noqa: E402
from coflowsched.workload import Mixture, derive_rng, gen_instance  # noqa: E402


# ── Helpers ───────────────────────────────────

def network(cores: int, ports: int = 4, speeds=()) -> NetworkSpec:
    return NetworkSpec(cores, ports, tuple(Fraction(s) for s in speeds))


def single_link(sizes, cores: int = 2, speeds=()) -> Instance:
    """One flow per coflow, all on link 1->1; coflow ids 1..len(sizes)."""
    coflows = tuple(Coflow(k, (Flow(1, 1, k, size),)) for k, size in enumerate(sizes, start=1))
    return Instance(network(cores, 2, speeds), coflows)


def build(cores: int, demands: dict, ports: int = 4, speeds=()) -> Instance:
    """``demands`` maps coflow id -> {(i, j): size}."""
    coflows = tuple(Coflow.from_demands(k, d) for k, d in demands.items())
    return Instance(network(cores, ports, speeds), coflows)


def random_instance(seed: int, cores: int, coflows: int = 3, ports: int = 6, mixture: str = "sparse") -> Instance:
    return gen_instance(coflows, ports, cores, Mixture.named(mixture, ports), derive_rng(seed, cores, coflows))


# ── Fixtures ──────────────────────────────────

@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def cls_instance() -> Instance:
    """A={(1,1)=6}, B={(1,2)=2,(2,1)=2}, C={(1,1)=3} on two identical cores."""
    return build(2, {
        1: {(1, 1): 6},
        2: {(1, 2): 2, (2, 1): 2},
        3: {(1, 1): 3},
    })


@pytest.fixture
def tiny_trace(tmp_path):
    """Three coflows over 10 racks; widths 1, 4 and 6 after merging."""
    path = tmp_path / "trace.txt"
    path.write_text(
        "10 3\n"
        "1 0 1 5 1 9:10\n"
        "2 100 2 0 1 2 3:4 4:7\n"
        "3 250 3 2 5 7 2 0:1 8:9.5\n",
        encoding="utf-8",
    )
    return path
