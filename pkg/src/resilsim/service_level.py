"""Service-level traces, SLA tiers and failure-pattern KPIs.

The service level s(t) is the ratio of delivered to desired service; 1.0
means the target is met, values above 1 mean the target is exceeded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ServiceTrace",
    "SlaTier",
    "FailureKpis",
    "kpis_from_bitmap",
    "validate_tiers",
    "read_trace_csv",
    "write_trace_csv",
]


@dataclass(frozen=True)
class ServiceTrace:
    """Time-indexed service level samples.

    times must be strictly increasing; values are dimensionless levels >= 0
    where 1.0 is the desired level.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1:
            raise InvalidInputError("times and values must be one-dimensional")
        if len(times) == 0 or len(times) != len(values):
            raise InvalidInputError("times and values must have equal, nonzero length")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise InvalidInputError("trace samples must be finite")
        if np.any(np.diff(times) <= 0):
            raise InvalidInputError("times must be strictly increasing")
        if np.any(values < 0):
            raise InvalidInputError("service levels must be >= 0")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class SlaTier:
    """One service tier: priority rank (lower is more critical), outage target,
    survival time in slots, and nominal vs degraded per-slot demand."""

    name: str
    priority: int
    outage_target: float
    survival_time: int
    demand: float
    degraded_demand: float

    def __post_init__(self):
        if not 0 < self.outage_target < 1:
            raise InvalidInputError(f"tier {self.name}: outage_target must be in (0,1)")
        if self.survival_time < 1:
            raise InvalidInputError(f"tier {self.name}: survival_time must be >= 1")
        if not 0 <= self.degraded_demand <= self.demand:
            raise InvalidInputError(
                f"tier {self.name}: need 0 <= degraded_demand <= demand"
            )


def validate_tiers(tiers: Sequence[SlaTier]) -> None:
    """Check a tier set: nonempty, unique priorities, unique names."""
    if not tiers:
        raise InvalidInputError("tier set must be nonempty")
    priorities = [t.priority for t in tiers]
    if len(set(priorities)) != len(priorities):
        raise InvalidInputError("tier priorities must be unique within a set")
    names = [t.name for t in tiers]
    if len(set(names)) != len(names):
        raise InvalidInputError("tier names must be unique within a set")


@dataclass(frozen=True)
class FailureKpis:
    """Failure-pattern summary of a boolean outage bitmap.

    mtbf is total slots per maximal failure run (math.inf when there are no
    failures); survival_violations counts runs longer than the survival time.
    """

    mtbf: float
    max_consecutive_failures: int
    survival_violations: int
    failure_rate: float

    def __post_init__(self):
        if self.mtbf < 0 or self.max_consecutive_failures < 0 or self.survival_violations < 0:
            raise InvalidInputError("KPI fields must be >= 0")
        if not 0 <= self.failure_rate <= 1:
            raise InvalidInputError("failure_rate must be in [0,1]")


def failure_runs(failures: Sequence[bool]) -> list[int]:
    """Lengths of maximal runs of consecutive failures, in order."""
    runs = []
    current = 0
    for f in failures:
        if f:
            current += 1
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return runs


def kpis_from_bitmap(failures: Sequence[bool], survival_time: int) -> FailureKpis:
    """Aggregate a per-slot failure bitmap into :class:`FailureKpis`.

    A failure run is one failure event; mtbf = total slots / number of runs.
    """
    failures = list(failures)
    if not failures:
        raise InvalidInputError("failure bitmap must be nonempty")
    if survival_time < 1:
        raise InvalidInputError("survival_time must be >= 1")
    runs = failure_runs(failures)
    n_failed = sum(1 for f in failures if f)
    mtbf = len(failures) / len(runs) if runs else math.inf
    return FailureKpis(
        mtbf=mtbf,
        max_consecutive_failures=max(runs) if runs else 0,
        survival_violations=sum(1 for r in runs if r > survival_time),
        failure_rate=n_failed / len(failures),
    )


def read_trace_csv(path: str | Path) -> ServiceTrace:
    """Read a trace file: CSV with header ``t,s``, one sample per row."""
    times: list[float] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["t", "s"]:
            raise InvalidInputError(f"trace file {path}: expected header 't,s'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise InvalidInputError(f"trace file {path}: bad row at line {lineno}")
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
            except ValueError as exc:
                raise InvalidInputError(
                    f"trace file {path}: non-numeric sample at line {lineno}"
                ) from exc
    return ServiceTrace(times=np.array(times), values=np.array(values))


def write_trace_csv(trace: ServiceTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("t,s\n")
        for t, s in zip(trace.times, trace.values):
            fh.write(f"{float(t)!r},{float(s)!r}\n")
