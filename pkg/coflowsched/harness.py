"""
Experiment harness
==================
Sweeps scenario points (cores x coflows x heterogeneity x trace threshold),
runs every scheduler on seeded instances, and reports makespan ratios against
two lower bounds:

``ratio_port``      makespan / port_lb, the ratio the sweeps plot.
``ratio_combined``  makespan / max(port_lb, flow_lb), the one the proven factors bound.

On identical networks the proven factors are enforced on every row; a
violation aborts the run.
"""

from __future__ import annotations

import csv
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import get_settings
from .lowerbound import LowerBounds, coflow_factor, list_scheduling_factor, lower_bounds
from .model import Instance, Load, NetworkSpec
from .realizer import realize, simulate_discrete
from .schedulers import SchedulerKind, predicted_makespan, schedule
from .workload import Mixture, derive_rng, filter_by_flow_count, gen_instance, gen_speeds, read_trace

logger = logging.getLogger("coflow-harness")

CSV_FIELDS = [
    "scenario", "point", "scheduler", "trial",
    "makespan", "port_lb", "combined_lb", "ratio_port", "ratio_combined",
]
CDF_FIELDS = ["scenario", "point", "scheduler", "trial", "core", "backend", "completion"]
SUMMARY_FIELDS = ["scenario", "point", "scheduler", "metric", "count", "mean", "q1", "q2", "q3", "min", "max"]

IDENTICAL_SCHEDULERS = [SchedulerKind.FLS, SchedulerKind.FLPT, SchedulerKind.CLS, SchedulerKind.WEAVER]
HETEROGENEOUS_SCHEDULERS = [SchedulerKind.FLPT_H, SchedulerKind.CLS_H, SchedulerKind.WEAVER]


# ─── Scenario ───────────────────────────────────────────────


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    cores: list[int] = Field(min_length=1)
    coflows: list[int] = Field(default_factory=lambda: [25], min_length=1)
    ports: int = Field(10, ge=1)
    mixture: str = "default"
    trace: Optional[Path] = None
    thresholds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    heterogeneity: list[int] = Field(default_factory=list)   # empty: identical network
    trials: int = Field(default_factory=lambda: get_settings().default_trials, ge=1)
    seed: int = Field(0, ge=0)
    schedulers: list[SchedulerKind] = Field(default_factory=lambda: list(IDENTICAL_SCHEDULERS), min_length=1)
    realize: bool = True
    discrete: bool = False

    @field_validator("cores", "coflows", "thresholds", "heterogeneity", "schedulers", mode="before")
    @classmethod
    def _split_lists(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("cores", "heterogeneity")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if any(v < 1 for v in value):
            raise ValueError(f"values must be >= 1, got {value}")
        return value

    @field_validator("coflows", "thresholds")
    @classmethod
    def _non_negative(cls, value: list[int]) -> list[int]:
        if any(v < 0 for v in value):
            raise ValueError(f"values must be >= 0, got {value}")
        return value

    @model_validator(mode="after")
    def _check_mixture(self) -> "Scenario":
        if self.trace is None:
            Mixture.named(self.mixture, self.ports)
        return self

    def points(self) -> list["ScenarioPoint"]:
        coflows = [0] if self.trace is not None else self.coflows
        thresholds = self.thresholds if self.trace is not None else [0]
        levels: Sequence[Optional[int]] = self.heterogeneity or [None]
        return [
            ScenarioPoint(m, k, h, thr, from_trace=self.trace is not None)
            for m, k, h, thr in itertools.product(self.cores, coflows, levels, thresholds)
        ]


@dataclass(frozen=True)
class ScenarioPoint:
    cores: int
    coflows: int
    heterogeneity: Optional[int] = None
    threshold: int = 0
    from_trace: bool = False

    @property
    def label(self) -> str:
        h = "-" if self.heterogeneity is None else str(self.heterogeneity)
        k = "trace" if self.from_trace else str(self.coflows)
        return f"m={self.cores};K={k};h={h};thr={self.threshold}"

    def seed_key(self, trial: int, stream: int) -> tuple[int, ...]:
        return (self.cores, self.coflows, self.heterogeneity or 0, self.threshold, trial, stream)


def load_scenario(path: str | Path, **overrides) -> Scenario:
    """Parse a ``key = value`` scenario file; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"Unable to read scenario {path}: {exc}") from exc

    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path} line {lineno}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Scenario.model_validate(values)
    except ValidationError as exc:
        raise ValueError(f"Invalid scenario {path}: {exc}") from exc


# ─── Presets ────────────────────────────────────────────────

_SWEEP = [5, 10, 15, 20, 25]

PRESETS: dict[str, dict] = {
    "cores": dict(cores=_SWEEP, coflows=[25]),
    "coflows": dict(cores=[5], coflows=_SWEEP),
    "dense": dict(cores=[5], coflows=[25], mixture="dense"),
    "combined": dict(cores=[5], coflows=[25], mixture="combined"),
    "boxplot": dict(cores=[25], coflows=[25]),
    "cdf": dict(cores=[5], coflows=[15], discrete=True),
    "hetero-cores": dict(cores=_SWEEP, coflows=[25], heterogeneity=[5],
                         schedulers=[SchedulerKind.FLPT_H, SchedulerKind.WEAVER]),
    "hetero-cores-cls": dict(cores=_SWEEP, coflows=[25], heterogeneity=[1],
                             schedulers=[SchedulerKind.CLS_H]),
    "hetero-boxplot": dict(cores=[50], coflows=[25], heterogeneity=[5], schedulers=HETEROGENEOUS_SCHEDULERS),
    "hetero-factor": dict(cores=[20], coflows=[25], heterogeneity=[1, 2, 3, 4, 5],
                          schedulers=HETEROGENEOUS_SCHEDULERS),
    "trace": dict(cores=[5], ports=150, thresholds=[200, 400, 600, 800, 1000], trials=1, realize=False),
}


def preset(name: str, **overrides) -> Scenario:
    try:
        values = dict(PRESETS[name])
    except KeyError as exc:
        raise ValueError(f"Unknown preset {name!r}; choose from {sorted(PRESETS)}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    values.setdefault("name", name)
    if name == "trace" and values.get("trace") is None:
        raise ValueError("Preset 'trace' needs a trace file")
    return Scenario.model_validate(values)


# ─── Report ─────────────────────────────────────────────────


def _ratio(makespan: Load, bound: Fraction) -> Fraction:
    if bound == 0:
        return Fraction(1)         # no demand: every schedule is optimal
    return Fraction(makespan) / bound


@dataclass(frozen=True)
class ExperimentRow:
    scenario: str
    point: str
    scheduler: str
    trial: int
    makespan: Fraction
    port_lb: Fraction
    combined_lb: Fraction

    @property
    def ratio_port(self) -> Fraction:
        return _ratio(self.makespan, self.port_lb)

    @property
    def ratio_combined(self) -> Fraction:
        return _ratio(self.makespan, self.combined_lb)

    def as_record(self, precision: int) -> dict[str, str]:
        def num(value: Fraction) -> str:
            return f"{float(value):.{precision}f}"

        return {
            "scenario": self.scenario,
            "point": self.point,
            "scheduler": self.scheduler,
            "trial": str(self.trial),
            "makespan": num(self.makespan),
            "port_lb": num(self.port_lb),
            "combined_lb": num(self.combined_lb),
            "ratio_port": num(self.ratio_port),
            "ratio_combined": num(self.ratio_combined),
        }


@dataclass(frozen=True)
class CdfSample:
    scenario: str
    point: str
    scheduler: str
    trial: int
    core: int
    backend: str          # "bvn" or "discrete"
    completion: Fraction


@dataclass(frozen=True)
class TrialError:
    point: str
    scheduler: str
    trial: int
    reason: str


@dataclass(frozen=True)
class Aggregate:
    scenario: str
    point: str
    scheduler: str
    metric: str
    count: int
    mean: float
    q1: float
    q2: float
    q3: float
    min: float
    max: float


@dataclass
class ExperimentReport:
    scenario: str
    rows: list[ExperimentRow] = field(default_factory=list)
    cdf: list[CdfSample] = field(default_factory=list)
    errors: list[TrialError] = field(default_factory=list)

    def aggregates(self) -> list[Aggregate]:
        """Per (point, scheduler, metric) statistics, recomputed from the rows."""
        groups: dict[tuple[str, str], list[ExperimentRow]] = {}
        for row in self.rows:
            groups.setdefault((row.point, row.scheduler), []).append(row)
        out = []
        for (point, scheduler), rows in groups.items():
            for metric in ("ratio_port", "ratio_combined"):
                samples = [float(getattr(r, metric)) for r in rows]
                q1, q2, q3, lo, hi = quartiles(samples)
                out.append(Aggregate(self.scenario, point, scheduler, metric, len(samples),
                                     float(np.mean(samples)), q1, q2, q3, lo, hi))
        return out


def quartiles(samples: Sequence[float]) -> tuple[float, float, float, float, float]:
    """(Q1, Q2, Q3, min, max) with linear interpolation between order statistics."""
    if len(samples) == 0:
        raise ValueError("quartiles() needs at least one sample")
    q1, q2, q3 = np.percentile(np.asarray(samples, dtype=float), [25, 50, 75], method="linear")
    return float(q1), float(q2), float(q3), float(min(samples)), float(max(samples))


# ─── Bound checks ───────────────────────────────────────────


def check_bounds(kind: SchedulerKind, makespan: Load, bounds: LowerBounds, cores: int) -> None:
    """Enforce the proven factors on an identical network."""
    if kind in (SchedulerKind.FLS, SchedulerKind.FLPT):
        limit = list_scheduling_factor(cores) * bounds.combined
        if makespan > limit:
            raise RuntimeError(f"{kind.value} makespan {makespan} exceeds (3-2/m) bound {limit}")
    elif kind is SchedulerKind.CLS:
        limit = coflow_factor(cores) * bounds.port_lb
        if makespan > limit:
            raise RuntimeError(f"cls makespan {makespan} exceeds 2m bound {limit}")


# ─── Trials ─────────────────────────────────────────────────


@lru_cache(maxsize=8)
def _trace_coflows(path: Path, threshold: int):
    trace = read_trace(path)
    return trace.ports, filter_by_flow_count(trace.coflows, threshold)


def build_instance(scenario: Scenario, point: ScenarioPoint, trial: int) -> Instance:
    """Demand from stream 0 (or the trace); speed factors from stream 1 re-target it."""
    if scenario.trace is not None:
        ports, coflows = _trace_coflows(scenario.trace, point.threshold)
        instance = Instance(NetworkSpec(point.cores, ports), coflows)
    else:
        mixture = Mixture.named(scenario.mixture, scenario.ports)
        rng = derive_rng(scenario.seed, *point.seed_key(trial, 0))
        instance = gen_instance(point.coflows, scenario.ports, point.cores, mixture, rng)
    if point.heterogeneity is None:
        return instance
    speeds = gen_speeds(point.cores, point.heterogeneity, derive_rng(scenario.seed, *point.seed_key(trial, 1)))
    return instance.with_network(NetworkSpec(point.cores, instance.ports, speeds))


@dataclass
class TrialOutcome:
    rows: list[ExperimentRow] = field(default_factory=list)
    cdf: list[CdfSample] = field(default_factory=list)
    errors: list[TrialError] = field(default_factory=list)


def run_trial(scenario: Scenario, point: ScenarioPoint, trial: int) -> TrialOutcome:
    outcome = TrialOutcome()
    try:
        instance = build_instance(scenario, point, trial)
    except ValueError as exc:
        logger.warning("Instance skipped | point=%s trial=%d reason=%s", point.label, trial, exc)
        outcome.errors.append(TrialError(point.label, "-", trial, str(exc)))
        return outcome

    bounds = lower_bounds(instance)
    identical = instance.network.is_identical
    for kind in scenario.schedulers:
        try:
            assignment = schedule(kind, instance)
            realized = realize(assignment, instance) if scenario.realize else None
            result = predicted_makespan(assignment, instance, realized)
        except ValueError as exc:
            logger.warning("Row skipped | point=%s scheduler=%s trial=%d reason=%s",
                           point.label, kind.value, trial, exc)
            outcome.errors.append(TrialError(point.label, kind.value, trial, str(exc)))
            continue

        makespan = result.overall
        if realized is not None:
            if realized.makespan != makespan:
                raise RuntimeError(
                    f"Realized makespan {realized.makespan} differs from predicted {makespan} "
                    f"({point.label}, {kind.value}, trial {trial})"
                )
            outcome.cdf.extend(
                CdfSample(scenario.name, point.label, kind.value, trial, h, "bvn", realized.core_completion(h))
                for h in range(instance.cores)
            )
        if identical:
            check_bounds(kind, makespan, bounds, instance.cores)

        if scenario.discrete:
            try:
                run = simulate_discrete(assignment, instance)
            except ValueError as exc:
                logger.warning("Discrete backend skipped | point=%s reason=%s", point.label, exc)
            else:
                outcome.cdf.extend(
                    CdfSample(scenario.name, point.label, kind.value, trial, h, "discrete", Fraction(run.completion[h]))
                    for h in range(instance.cores)
                )

        outcome.rows.append(ExperimentRow(
            scenario=scenario.name,
            point=point.label,
            scheduler=kind.value,
            trial=trial,
            makespan=Fraction(makespan),
            port_lb=bounds.port_lb,
            combined_lb=bounds.combined,
        ))
    logger.debug("Trial done | point=%s trial=%d rows=%d", point.label, trial, len(outcome.rows))
    return outcome


def _run_task(task: tuple[Scenario, ScenarioPoint, int]) -> TrialOutcome:
    return run_trial(*task)


def run_scenario(scenario: Scenario, workers: Optional[int] = None) -> ExperimentReport:
    """Every (point, trial) independently seeded; merged in (point, trial) order."""
    workers = workers or get_settings().workers
    tasks = [(scenario, point, trial) for point in scenario.points() for trial in range(scenario.trials)]
    logger.info("Scenario started | name=%s points=%d trials=%d workers=%d",
                scenario.name, len(scenario.points()), scenario.trials, workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(task) for task in tasks]

    report = ExperimentReport(scenario.name)
    for outcome in outcomes:
        report.rows.extend(outcome.rows)
        report.cdf.extend(outcome.cdf)
        report.errors.extend(outcome.errors)
    logger.info("Scenario finished | name=%s rows=%d errors=%d", scenario.name, len(report.rows), len(report.errors))
    return report


# ─── Output ─────────────────────────────────────────────────


def emit_csv(report: ExperimentReport, path: str | Path, precision: Optional[int] = None) -> None:
    precision = precision or get_settings().csv_precision
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.DictWriter(out, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in report.rows:
            writer.writerow(row.as_record(precision))
    logger.info("CSV written | path=%s rows=%d", path, len(report.rows))


def emit_cdf(report: ExperimentReport, path: str | Path, precision: Optional[int] = None) -> None:
    precision = precision or get_settings().csv_precision
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.DictWriter(out, fieldnames=CDF_FIELDS)
        writer.writeheader()
        for s in report.cdf:
            writer.writerow({
                "scenario": s.scenario, "point": s.point, "scheduler": s.scheduler, "trial": s.trial,
                "core": s.core + 1, "backend": s.backend, "completion": f"{float(s.completion):.{precision}f}",
            })
    logger.info("CDF written | path=%s samples=%d", path, len(report.cdf))


def emit_summary(report: ExperimentReport, path: str | Path, precision: Optional[int] = None) -> None:
    precision = precision or get_settings().csv_precision
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.DictWriter(out, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for agg in report.aggregates():
            record = {name: getattr(agg, name) for name in SUMMARY_FIELDS}
            for name in ("mean", "q1", "q2", "q3", "min", "max"):
                record[name] = f"{record[name]:.{precision}f}"
            writer.writerow(record)
    logger.info("Summary written | path=%s", path)


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as src:
        reader = csv.DictReader(src)
        if reader.fieldnames != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)
