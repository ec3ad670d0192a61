"""
Domain types
============
Flows, coflows, the parallel-core network, instances, assignments with their
per-port load ledgers, and makespan results.

Ports are 1-based (``1..N``), cores are 0-based (``0..m-1``). Flow sizes are
integers; service times on a core of speed ``s`` are ``size / s`` kept as
exact ``Fraction`` values whenever ``s != 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Union

Load = Union[int, Fraction]
FlowKey = tuple[int, int, int]          # (input, output, coflow)


def service_time(size: int, speed: Fraction) -> Load:
    """Time a flow of ``size`` data units occupies its ports on a core of ``speed``."""
    if speed == 1:
        return size
    return Fraction(size) / speed


# ─── Flows & coflows ────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class Flow:
    input: int
    output: int
    coflow: int
    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 1:
            raise ValueError(f"Flow size must be an integer >= 1, got {self.size!r}")
        if self.input < 1 or self.output < 1:
            raise ValueError(f"Port indices are 1-based, got ({self.input}, {self.output})")

    @property
    def key(self) -> FlowKey:
        return (self.input, self.output, self.coflow)

    def __str__(self) -> str:
        return f"{self.input}->{self.output}@{self.coflow}"


@dataclass(frozen=True)
class Coflow:
    id: int
    flows: tuple[Flow, ...]

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        for flow in self.flows:
            if flow.coflow != self.id:
                raise ValueError(f"Flow {flow} does not belong to coflow {self.id}")
            link = (flow.input, flow.output)
            if link in seen:
                raise ValueError(f"Duplicate flow {flow} in coflow {self.id}")
            seen.add(link)

    @classmethod
    def from_demands(cls, coflow_id: int, demands: Mapping[tuple[int, int], int]) -> "Coflow":
        """Build a coflow from a sparse demand matrix; zero entries are dropped."""
        flows = tuple(
            Flow(i, j, coflow_id, size)
            for (i, j), size in demands.items()
            if size != 0
        )
        return cls(coflow_id, flows)

    @property
    def width(self) -> int:
        return len(self.flows)

    @cached_property
    def input_loads(self) -> dict[int, int]:
        """L_{i,k}: data this coflow sends through each input port it touches."""
        loads: dict[int, int] = {}
        for flow in self.flows:
            loads[flow.input] = loads.get(flow.input, 0) + flow.size
        return loads

    @cached_property
    def output_loads(self) -> dict[int, int]:
        """L_{j,k}: data this coflow receives through each output port it touches."""
        loads: dict[int, int] = {}
        for flow in self.flows:
            loads[flow.output] = loads.get(flow.output, 0) + flow.size
        return loads

    @property
    def total_size(self) -> int:
        return sum(flow.size for flow in self.flows)


# ─── Network & instance ─────────────────────────────────────


@dataclass(frozen=True)
class NetworkSpec:
    cores: int
    ports: int
    speeds: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if self.cores < 1:
            raise ValueError(f"Need at least one core, got {self.cores}")
        if self.ports < 1:
            raise ValueError(f"Need at least one port, got {self.ports}")
        if not self.speeds:
            object.__setattr__(self, "speeds", (Fraction(1),) * self.cores)
        else:
            object.__setattr__(self, "speeds", tuple(Fraction(s) for s in self.speeds))
        if len(self.speeds) != self.cores:
            raise ValueError(f"Expected {self.cores} speed factors, got {len(self.speeds)}")
        if any(s <= 0 for s in self.speeds):
            raise ValueError(f"Speed factors must be positive, got {self.speeds}")

    @property
    def is_identical(self) -> bool:
        return all(s == 1 for s in self.speeds)

    @property
    def total_speed(self) -> Fraction:
        return sum(self.speeds, Fraction(0))

    @property
    def max_speed(self) -> Fraction:
        return max(self.speeds)


@dataclass(frozen=True)
class Instance:
    network: NetworkSpec
    coflows: tuple[Coflow, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coflows", tuple(self.coflows))
        ids: set[int] = set()
        n = self.network.ports
        for coflow in self.coflows:
            if coflow.id in ids:
                raise ValueError(f"Duplicate coflow id {coflow.id}")
            ids.add(coflow.id)
            for flow in coflow.flows:
                if flow.input > n or flow.output > n:
                    raise ValueError(f"Flow {flow} uses a port outside 1..{n}")

    @cached_property
    def flows(self) -> tuple[Flow, ...]:
        """F in instance order: coflow order, then flow order inside each coflow."""
        return tuple(flow for coflow in self.coflows for flow in coflow.flows)

    @property
    def flow_count(self) -> int:
        return len(self.flows)

    @property
    def cores(self) -> int:
        return self.network.cores

    @property
    def ports(self) -> int:
        return self.network.ports

    def with_network(self, network: NetworkSpec) -> "Instance":
        return Instance(network, self.coflows)


def port_loads(instance: Instance) -> tuple[dict[int, int], dict[int, int]]:
    """Total demand per input port and per output port across all coflows.

    Every port ``1..N`` is present in both maps; untouched ports map to 0.
    """
    inputs = {p: 0 for p in range(1, instance.ports + 1)}
    outputs = dict(inputs)
    for flow in instance.flows:
        inputs[flow.input] += flow.size
        outputs[flow.output] += flow.size
    return inputs, outputs


# ─── Assignment & ledgers ───────────────────────────────────


class Granularity(str, Enum):
    FLOW = "flow"
    COFLOW = "coflow"


class Assignment:
    """Flow->core (or coflow->core) mapping plus per-port per-core load ledgers.

    ``load_in[h][i-1]`` is the accumulated service time on input ``i`` of core
    ``h``; ``load_out`` likewise for outputs. Ledgers grow only through
    :meth:`place_flow` / :meth:`place_coflow`.
    """

    def __init__(self, network: NetworkSpec, granularity: Granularity) -> None:
        self.network = network
        self.granularity = granularity
        self.flow_to_core: dict[FlowKey, int] = {}
        self.coflow_to_core: dict[int, int] = {}
        self.core_flows: list[list[Flow]] = [[] for _ in range(network.cores)]
        self._load_in: list[list[Load]] = [[0] * network.ports for _ in range(network.cores)]
        self._load_out: list[list[Load]] = [[0] * network.ports for _ in range(network.cores)]

    # ── Mutation ──

    def place_flow(self, flow: Flow, core: int) -> None:
        if flow.key in self.flow_to_core:
            raise ValueError(f"Flow {flow} is already assigned to core {self.flow_to_core[flow.key]}")
        if not 0 <= core < self.network.cores:
            raise ValueError(f"Core {core} outside 0..{self.network.cores - 1}")
        self.flow_to_core[flow.key] = core
        self.core_flows[core].append(flow)
        t = service_time(flow.size, self.network.speeds[core])
        self._load_in[core][flow.input - 1] += t
        self._load_out[core][flow.output - 1] += t

    def place_coflow(self, coflow: Coflow, core: int) -> None:
        if coflow.id in self.coflow_to_core:
            raise ValueError(f"Coflow {coflow.id} is already assigned")
        self.coflow_to_core[coflow.id] = core
        for flow in coflow.flows:
            self.place_flow(flow, core)

    # ── Ledger reads ──

    def input_load(self, port: int, core: int) -> Load:
        return self._load_in[core][port - 1]

    def output_load(self, port: int, core: int) -> Load:
        return self._load_out[core][port - 1]

    def input_row(self, core: int) -> list[Load]:
        return self._load_in[core]

    def output_row(self, core: int) -> list[Load]:
        return self._load_out[core]

    @property
    def load_in(self) -> dict[tuple[int, int], Load]:
        """Non-zero ledger entries keyed by (input port, core)."""
        return {
            (p + 1, h): v
            for h, row in enumerate(self._load_in)
            for p, v in enumerate(row)
            if v
        }

    @property
    def load_out(self) -> dict[tuple[int, int], Load]:
        return {
            (p + 1, h): v
            for h, row in enumerate(self._load_out)
            for p, v in enumerate(row)
            if v
        }

    def core_load(self, core: int) -> Load:
        """Max port load on a core: its achievable completion time."""
        return max(max(self._load_in[core]), max(self._load_out[core]))

    def core_of(self, flow: Flow | FlowKey) -> int:
        key = flow.key if isinstance(flow, Flow) else flow
        return self.flow_to_core[key]

    # ── Checks ──

    def recompute_ledgers(self) -> tuple[list[list[Load]], list[list[Load]]]:
        """Ledgers rebuilt from scratch out of the per-core flow lists."""
        m, n = self.network.cores, self.network.ports
        load_in: list[list[Load]] = [[0] * n for _ in range(m)]
        load_out: list[list[Load]] = [[0] * n for _ in range(m)]
        for h, flows in enumerate(self.core_flows):
            speed = self.network.speeds[h]
            for flow in flows:
                t = service_time(flow.size, speed)
                load_in[h][flow.input - 1] += t
                load_out[h][flow.output - 1] += t
        return load_in, load_out

    def ledgers_consistent(self) -> bool:
        load_in, load_out = self.recompute_ledgers()
        return load_in == self._load_in and load_out == self._load_out

    def missing_flows(self, instance: Instance) -> list[FlowKey]:
        return [f.key for f in instance.flows if f.key not in self.flow_to_core]

    def is_complete(self, instance: Instance) -> bool:
        if self.missing_flows(instance):
            return False
        if self.granularity is Granularity.COFLOW:
            for coflow in instance.coflows:
                cores = {self.flow_to_core[f.key] for f in coflow.flows}
                if len(cores) > 1 or (coflow.flows and coflow.id not in self.coflow_to_core):
                    return False
        return True

    def snapshot(self) -> tuple[tuple[FlowKey, int], ...]:
        """Canonical, order-independent view used for determinism comparisons."""
        return tuple(sorted(self.flow_to_core.items()))

    def __repr__(self) -> str:
        sizes = [len(flows) for flows in self.core_flows]
        return f"Assignment(granularity={self.granularity.value}, flows_per_core={sizes})"


# ─── Results ────────────────────────────────────────────────


@dataclass(frozen=True)
class MakespanResult:
    per_core: dict[int, Load]
    per_coflow: dict[int, Load] = field(default_factory=dict)

    @property
    def overall(self) -> Load:
        return max(self.per_core.values(), default=0)


def as_fraction(value: Load) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def format_load(value: Load) -> str:
    """Exact text form: integers as-is, other rationals as ``p/q``."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_load(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Not a rational number: {text!r}") from exc
