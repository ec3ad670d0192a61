"""
Schedule realization
====================
Turns a core's flow set into an explicit time-sliced schedule whose length
equals the core's max port load over its speed.

The aggregated demand matrix is padded with slack until every row and column
sums to the max port load T, then peeled with perfect matchings
(Birkhoff-von Neumann): each matching runs for the smallest entry it covers.
A second backend, :func:`simulate_discrete`, serves one greedy maximal
matching per integer time step and feeds the completion-time CDFs.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, TextIO

import networkx as nx

from .model import Assignment, Flow, FlowKey, Instance, format_load

logger = logging.getLogger("coflow-realizer")


@dataclass(frozen=True)
class CoreScheduleSlice:
    """Flows served in parallel for ``duration``; ``term`` is the matching it came from."""

    matching: tuple[FlowKey, ...]
    duration: Fraction
    term: int = 0


@dataclass
class RealizedSchedule:
    per_core: dict[int, list[CoreScheduleSlice]]
    finish: dict[FlowKey, Fraction] = field(default_factory=dict)

    def core_completion(self, core: int) -> Fraction:
        return sum((s.duration for s in self.per_core.get(core, [])), Fraction(0))

    @property
    def makespan(self) -> Fraction:
        return max((self.core_completion(h) for h in self.per_core), default=Fraction(0))

    def coflow_completion(self) -> dict[int, Fraction]:
        """C_k: latest finish among the coflow's flows."""
        completion: dict[int, Fraction] = {}
        for (_, _, k), t in self.finish.items():
            if t > completion.get(k, Fraction(-1)):
                completion[k] = t
        return completion

    def term_count(self, core: int) -> int:
        slices = self.per_core.get(core, [])
        return slices[-1].term + 1 if slices else 0


def birkhoff_bound(dimension: int) -> int:
    """Most matchings a greedy decomposition of an n x n matrix can need."""
    return max(dimension * dimension - 2 * dimension + 2, 0)


# ─── Demand matrix ──────────────────────────────────────────


class _Entry:
    """Queue of (flow, remaining) items sharing one matrix cell; ``None`` marks slack."""

    __slots__ = ("items",)

    def __init__(self) -> None:
        self.items: deque[list] = deque()

    def consume(self, amount: int) -> list[tuple[int, int, Optional[Flow]]]:
        """Take ``amount`` units off the front; returns (start, end, flow) pieces."""
        pieces = []
        offset = 0
        while offset < amount:
            item = self.items[0]
            take = min(item[1], amount - offset)
            pieces.append((offset, offset + take, item[0]))
            offset += take
            item[1] -= take
            if item[1] == 0:
                self.items.popleft()
        return pieces


def _validate(flows: Sequence[Flow], speed: Fraction) -> None:
    if speed <= 0:
        raise ValueError(f"Core speed must be positive, got {speed}")
    seen: set[FlowKey] = set()
    for flow in flows:
        if not isinstance(flow.size, int):
            raise ValueError(f"Demand of {flow} is not integral: {flow.size!r}")
        if flow.key in seen:
            raise ValueError(f"Flow {flow} appears twice on one core")
        seen.add(flow.key)


def _build_matrix(flows: Sequence[Flow]) -> tuple[list[int], list[int], list[list[int]], list[list[_Entry]]]:
    rows = sorted({f.input for f in flows})
    cols = sorted({f.output for f in flows})
    n = max(len(rows), len(cols))
    # dummy ports (0) pad the active sub-matrix to a square
    rows += [0] * (n - len(rows))
    cols += [0] * (n - len(cols))
    row_of = {p: r for r, p in enumerate(rows) if p}
    col_of = {q: c for c, q in enumerate(cols) if q}

    matrix = [[0] * n for _ in range(n)]
    entries = [[_Entry() for _ in range(n)] for _ in range(n)]
    for flow in flows:
        r, c = row_of[flow.input], col_of[flow.output]
        matrix[r][c] += flow.size
        entries[r][c].items.append([flow, flow.size])
    return rows, cols, matrix, entries


def _add_slack(matrix: list[list[int]], entries: list[list[_Entry]]) -> int:
    """Pad rows and columns up to T; returns T."""
    n = len(matrix)
    row_sum = [sum(row) for row in matrix]
    col_sum = [sum(matrix[r][c] for r in range(n)) for c in range(n)]
    target = max(max(row_sum), max(col_sum))
    row_def = [target - v for v in row_sum]
    col_def = [target - v for v in col_sum]

    # empty cells first keeps real entries unsplit where possible
    for only_empty in (True, False):
        for r in range(n):
            if not row_def[r]:
                continue
            for c in range(n):
                if not col_def[c] or (only_empty and matrix[r][c]):
                    continue
                amount = min(row_def[r], col_def[c])
                matrix[r][c] += amount
                entries[r][c].items.append([None, amount])
                row_def[r] -= amount
                col_def[c] -= amount
                if not row_def[r]:
                    break
    if any(row_def) or any(col_def):
        raise RuntimeError("Slack placement left a deficient row or column")
    return target


# ─── Matching ───────────────────────────────────────────────


def _initial_matching(matrix: list[list[int]]) -> list[Optional[int]]:
    n = len(matrix)
    graph = nx.Graph()
    top = [("i", r) for r in range(n)]
    graph.add_nodes_from(top)
    graph.add_nodes_from(("o", c) for c in range(n))
    graph.add_edges_from(
        (("i", r), ("o", c)) for r in range(n) for c in range(n) if matrix[r][c]
    )
    pairs = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    match_row: list[Optional[int]] = [None] * n
    for r in range(n):
        partner = pairs.get(("i", r))
        if partner is not None:
            match_row[r] = partner[1]
    return match_row


def _augment(root: int, matrix: list[list[int]], match_row: list[Optional[int]],
             match_col: list[Optional[int]]) -> bool:
    n = len(matrix)
    parent: dict[int, int] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for c in range(n):
            if not matrix[u][c] or c in parent:
                continue
            parent[c] = u
            v = match_col[c]
            if v is None:
                while c is not None:
                    u = parent[c]
                    previous = match_row[u]
                    match_row[u], match_col[c] = c, u
                    c = previous
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def _repair(matrix, match_row, match_col) -> None:
    for r, c in enumerate(match_row):
        if c is None and not _augment(r, matrix, match_row, match_col):
            raise RuntimeError(f"No perfect matching on the remaining support (row {r})")


# ─── Realization ────────────────────────────────────────────


def realize_core(flows: Sequence[Flow], speed: Fraction = Fraction(1)) -> list[CoreScheduleSlice]:
    speed = Fraction(speed)
    _validate(flows, speed)
    if not flows:
        return []

    rows, cols, matrix, entries = _build_matrix(flows)
    target = _add_slack(matrix, entries)
    n = len(matrix)

    match_row = _initial_matching(matrix)
    match_col: list[Optional[int]] = [None] * n
    for r, c in enumerate(match_row):
        if c is not None:
            match_col[c] = r
    _repair(matrix, match_row, match_col)

    slices: list[CoreScheduleSlice] = []
    remaining = target
    term = 0
    while remaining:
        edges = [(r, match_row[r]) for r in range(n)]
        delta = min(matrix[r][c] for r, c in edges)

        pieces = [(rows[r], cols[c], entries[r][c].consume(delta)) for r, c in edges]
        cuts = sorted({end for _, _, ps in pieces for _, end, _ in ps})
        cursors = [0] * len(pieces)
        start = 0
        for end in cuts:
            matched = []
            for idx, (_, _, ps) in enumerate(pieces):
                while ps[cursors[idx]][1] <= start:
                    cursors[idx] += 1
                flow = ps[cursors[idx]][2]
                if flow is not None:
                    matched.append(flow.key)
            slices.append(CoreScheduleSlice(tuple(sorted(matched)), Fraction(end - start) / speed, term))
            start = end

        remaining -= delta
        for r, c in edges:
            matrix[r][c] -= delta
            if not matrix[r][c]:
                match_row[r] = None
                match_col[c] = None
        if remaining:
            _repair(matrix, match_row, match_col)
        term += 1

    if term > birkhoff_bound(n):
        raise RuntimeError(f"Decomposition used {term} matchings, more than the bound {birkhoff_bound(n)}")
    logger.debug("Core realized | flows=%d dim=%d T=%d matchings=%d slices=%d",
                 len(flows), n, target, term, len(slices))
    return slices


def realize(assignment: Assignment, instance: Instance) -> RealizedSchedule:
    missing = assignment.missing_flows(instance)
    if missing:
        raise ValueError(f"Cannot realize an incomplete assignment: {len(missing)} flow(s) unassigned")

    schedule = RealizedSchedule(per_core={})
    for h, flows in enumerate(assignment.core_flows):
        slices = realize_core(flows, instance.network.speeds[h])
        schedule.per_core[h] = slices
        clock = Fraction(0)
        for piece in slices:
            clock += piece.duration
            for key in piece.matching:
                schedule.finish[key] = clock
        logger.debug("Core realized | core=%d flows=%d slices=%d terms=%d",
                     h, len(flows), len(slices), schedule.term_count(h))
    return schedule


def dump_schedule(schedule: RealizedSchedule, stream: TextIO) -> int:
    """Write ``core,start,duration,i->j@k[,...]`` lines (1-based cores); returns the line count."""
    lines = 0
    for h in sorted(schedule.per_core):
        clock = Fraction(0)
        for piece in schedule.per_core[h]:
            served = ",".join(f"{i}->{j}@{k}" for i, j, k in piece.matching)
            stream.write(f"{h + 1},{format_load(clock)},{format_load(piece.duration)},{served}\n")
            clock += piece.duration
            lines += 1
    return lines


# ─── Discrete simulation ────────────────────────────────────


@dataclass
class DiscreteRun:
    completion: dict[int, int]
    utilization: dict[int, list[Fraction]]

    @property
    def makespan(self) -> int:
        return max(self.completion.values(), default=0)


def simulate_discrete(assignment: Assignment, instance: Instance) -> DiscreteRun:
    """Per time step, serve a largest-remaining-first maximal matching on every core.

    ``utilization[h][t]`` is the share of the N ports matched during step ``t``.
    """
    speeds = instance.network.speeds
    for speed in speeds:
        if speed.denominator != 1:
            raise ValueError(f"Discrete simulation needs integral speed factors, got {speed}")

    order = {flow.key: idx for idx, flow in enumerate(instance.flows)}
    run = DiscreteRun(completion={}, utilization={})
    for h, flows in enumerate(assignment.core_flows):
        rate = int(speeds[h])
        remaining = {flow.key: flow.size for flow in flows}
        busy: list[Fraction] = []
        step = 0
        while remaining:
            step += 1
            used_in: set[int] = set()
            used_out: set[int] = set()
            for key in sorted(remaining, key=lambda k: (-remaining[k], order[k])):
                i, j, _ = key
                if i in used_in or j in used_out:
                    continue
                used_in.add(i)
                used_out.add(j)
                remaining[key] -= min(rate, remaining[key])
            for key in [k for k, v in remaining.items() if not v]:
                del remaining[key]
            busy.append(Fraction(len(used_in), instance.ports))
        run.completion[h] = step
        run.utilization[h] = busy
        logger.debug("Discrete core done | core=%d steps=%d", h, step)
    return run
