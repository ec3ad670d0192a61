"""
Workload generation & trace ingestion
=====================================
Synthetic coflows from (w_min, w_max, l_min, l_max) descriptions mixed by
weight, heterogeneous speed factors, the public coflow-benchmark trace format,
and a plain-text instance format.

Randomness always comes from an explicit ``numpy.random.Generator``; use
:func:`derive_rng` to build one per (point, trial) from a root seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import get_settings
from .model import Coflow, Flow, Instance, NetworkSpec, format_load, parse_load

logger = logging.getLogger("coflow-workload")


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for ``key`` under ``seed``; independent of draw order elsewhere."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


# ─── Descriptions & mixtures ────────────────────────────────


@dataclass(frozen=True)
class CoflowDescription:
    w_min: int
    w_max: int
    l_min: int
    l_max: int

    def __post_init__(self) -> None:
        if not 1 <= self.w_min <= self.w_max:
            raise ValueError(f"Need 1 <= w_min <= w_max, got ({self.w_min}, {self.w_max})")
        if not 1 <= self.l_min <= self.l_max:
            raise ValueError(f"Need 1 <= l_min <= l_max, got ({self.l_min}, {self.l_max})")

    def __str__(self) -> str:
        return f"({self.w_min},{self.w_max},{self.l_min},{self.l_max})"


@dataclass(frozen=True)
class Mixture:
    entries: tuple[tuple[CoflowDescription, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("A mixture needs at least one description")
        total = sum(weight for _, weight in self.entries)
        if total != 100 or any(weight < 0 for _, weight in self.entries):
            raise ValueError(f"Mixture weights must be non-negative and sum to 100, got {total}")

    @classmethod
    def default(cls, ports: int) -> "Mixture":
        return cls((
            (CoflowDescription(1, 5, 1, 10), 41),
            (CoflowDescription(1, 5, 10, 1000), 29),
            (CoflowDescription(5, ports, 1, 10), 9),
            (CoflowDescription(5, ports, 10, 1000), 21),
        ))

    @classmethod
    def dense(cls, ports: int) -> "Mixture":
        return cls(((CoflowDescription(math.isqrt(ports - 1) + 1, ports, 1, 100), 100),))

    @classmethod
    def sparse(cls, ports: int) -> "Mixture":
        return cls(((CoflowDescription(1, math.isqrt(ports - 1) + 1, 1, 100), 100),))

    @classmethod
    def combined(cls, ports: int) -> "Mixture":
        (dense, _), = cls.dense(ports).entries
        (sparse, _), = cls.sparse(ports).entries
        return cls(((dense, 50), (sparse, 50)))

    @classmethod
    def named(cls, name: str, ports: int) -> "Mixture":
        builders = {"default": cls.default, "dense": cls.dense, "sparse": cls.sparse, "combined": cls.combined}
        try:
            return builders[name](ports)
        except KeyError as exc:
            raise ValueError(f"Unknown mixture {name!r}; choose from {sorted(builders)}") from exc

    def draw(self, rng: np.random.Generator) -> CoflowDescription:
        weights = np.array([w for _, w in self.entries], dtype=float) / 100.0
        return self.entries[int(rng.choice(len(self.entries), p=weights))][0]


# ─── Generators ─────────────────────────────────────────────


def gen_coflow(desc: CoflowDescription, ports: int, rng: np.random.Generator, coflow_id: int = 1) -> Coflow:
    """w1 x w2 flows between distinct random inputs and outputs, sizes uniform on [l_min, l_max]."""
    if desc.w_max > ports:
        raise ValueError(f"Description {desc} is wider than the {ports}-port switch")
    w1 = int(rng.integers(desc.w_min, desc.w_max, endpoint=True))
    w2 = int(rng.integers(desc.w_min, desc.w_max, endpoint=True))
    inputs = sorted(int(p) + 1 for p in rng.choice(ports, size=w1, replace=False))
    outputs = sorted(int(q) + 1 for q in rng.choice(ports, size=w2, replace=False))
    sizes = rng.integers(desc.l_min, desc.l_max, size=(w1, w2), endpoint=True)
    flows = tuple(
        Flow(i, j, coflow_id, int(sizes[a, b]))
        for a, i in enumerate(inputs)
        for b, j in enumerate(outputs)
    )
    return Coflow(coflow_id, flows)


def gen_instance(
    coflows: int,
    ports: int,
    cores: int,
    mixture: Mixture,
    rng: np.random.Generator,
    speeds: Sequence[Fraction] = (),
) -> Instance:
    network = NetworkSpec(cores, ports, tuple(speeds))
    generated = tuple(gen_coflow(mixture.draw(rng), ports, rng, k) for k in range(1, coflows + 1))
    return Instance(network, generated)


def gen_speeds(cores: int, heterogeneity: int, rng: np.random.Generator,
               grid: Optional[int] = None) -> tuple[Fraction, ...]:
    """Speed factors uniform on [1, m/h], snapped to multiples of 1/grid."""
    if not 1 <= heterogeneity <= cores:
        raise ValueError(f"Heterogeneity factor must lie in 1..{cores}, got {heterogeneity}")
    grid = grid or get_settings().speed_grid
    if heterogeneity == cores:
        return (Fraction(1),) * cores
    upper = Fraction(cores, heterogeneity)
    lo, hi = grid, math.floor(upper * grid)
    draws = rng.uniform(1.0, float(upper), size=cores)
    return tuple(Fraction(min(max(round(x * grid), lo), hi), grid) for x in draws)


# ─── Trace format ───────────────────────────────────────────


@dataclass(frozen=True)
class TraceData:
    ports: int
    coflows: tuple[Coflow, ...]
    widths: dict[int, int] = field(default_factory=dict)   # mappers x reducers before merging


@dataclass(frozen=True)
class TraceStats:
    coflows: int
    min_flows: int
    max_flows: int
    min_size: int
    max_size: int


def _parse_trace_line(text: str, lineno: int, racks: int) -> tuple[Coflow, int]:
    tokens = text.split()
    try:
        coflow_id, _arrival, mapper_count = int(tokens[0]), int(tokens[1]), int(tokens[2])
        mappers = [int(t) for t in tokens[3:3 + mapper_count]]
        reducer_count = int(tokens[3 + mapper_count])
        reducer_tokens = tokens[4 + mapper_count:]
        if len(mappers) != mapper_count or len(reducer_tokens) != reducer_count or mapper_count < 1:
            raise ValueError("mapper/reducer counts do not match the entries")
        reducers = []
        for token in reducer_tokens:
            rack, size = token.split(":")
            reducers.append((int(rack), Fraction(size)))
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"line {lineno}: malformed coflow entry ({exc})") from exc

    for rack in mappers + [r for r, _ in reducers]:
        if not 0 <= rack < racks:
            raise ValueError(f"line {lineno}: rack {rack} outside 0..{racks - 1}")

    demands: dict[tuple[int, int], int] = {}
    for rack, size_mb in reducers:
        piece = max(1, math.ceil(size_mb / mapper_count))
        for mapper in mappers:
            link = (mapper + 1, rack + 1)
            demands[link] = demands.get(link, 0) + piece
    return Coflow.from_demands(coflow_id, demands), mapper_count * reducer_count


def read_trace(path: str | Path) -> TraceData:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValueError(f"Unable to read trace {path}: {exc}") from exc
    if not lines:
        raise ValueError(f"line 1: empty trace file {path}")

    try:
        racks, declared = (int(t) for t in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"line 1: header must be '<numRacks> <numCoflows>' ({exc})") from exc

    coflows: list[Coflow] = []
    widths: dict[int, int] = {}
    for lineno, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        coflow, width = _parse_trace_line(text, lineno, racks)
        if coflow.id in widths:
            raise ValueError(f"line {lineno}: duplicate coflow id {coflow.id}")
        coflows.append(coflow)
        widths[coflow.id] = width

    if len(coflows) != declared:
        logger.warning("Trace header declares %d coflows, found %d | path=%s", declared, len(coflows), path)
    logger.info("Trace parsed | path=%s racks=%d coflows=%d", path, racks, len(coflows))
    return TraceData(racks, tuple(coflows), widths)


def parse_trace(path: str | Path) -> tuple[Coflow, ...]:
    return read_trace(path).coflows


def filter_by_flow_count(coflows: Iterable[Coflow], threshold: float) -> tuple[Coflow, ...]:
    """Keep coflows with at least ``threshold`` flows."""
    if threshold < 0:
        raise ValueError(f"Threshold must be >= 0, got {threshold}")
    return tuple(c for c in coflows if c.width >= threshold)


def trace_stats(coflows: Sequence[Coflow]) -> TraceStats:
    sizes = [f.size for c in coflows for f in c.flows]
    widths = [c.width for c in coflows]
    return TraceStats(
        coflows=len(coflows),
        min_flows=min(widths, default=0),
        max_flows=max(widths, default=0),
        min_size=min(sizes, default=0),
        max_size=max(sizes, default=0),
    )


# ─── Instance text format ───────────────────────────────────


def write_instance(instance: Instance, path: str | Path) -> None:
    """``N m`` header, ``s: ...`` speeds line, then one ``k i j size`` line per flow."""
    network = instance.network
    lines = [f"{network.ports} {network.cores}", "s: " + " ".join(format_load(s) for s in network.speeds)]
    lines += [f"{f.coflow} {f.input} {f.output} {f.size}" for f in instance.flows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_instance(path: str | Path) -> Instance:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValueError(f"Unable to read instance {path}: {exc}") from exc

    body = [(n, line.strip()) for n, line in enumerate(lines, start=1) if line.strip()]
    if not body:
        raise ValueError(f"line 1: empty instance file {path}")
    try:
        ports, cores = (int(t) for t in body[0][1].split())
    except ValueError as exc:
        raise ValueError(f"line {body[0][0]}: header must be 'N m'") from exc

    speeds: tuple[Fraction, ...] = ()
    demands: dict[int, dict[tuple[int, int], int]] = {}
    for lineno, text in body[1:]:
        if text.startswith("s:"):
            speeds = tuple(parse_load(t) for t in text[2:].split())
            continue
        try:
            k, i, j, size = (int(t) for t in text.split())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: expected 'k i j size', got {text!r}") from exc
        if size < 1:
            raise ValueError(f"line {lineno}: flow size must be >= 1, got {size}")
        coflow = demands.setdefault(k, {})
        if (i, j) in coflow:
            raise ValueError(f"line {lineno}: duplicate flow {i}->{j}@{k}")
        coflow[(i, j)] = size

    network = NetworkSpec(cores, ports, speeds)
    try:
        return Instance(network, tuple(Coflow.from_demands(k, d) for k, d in demands.items()))
    except ValueError as exc:
        raise ValueError(f"Invalid instance in {path}: {exc}") from exc
