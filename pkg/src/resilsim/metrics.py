"""Resilience quantification from service-level traces.

A disruption begins when s(t) drops below the desired level 1 and ends at
the first sample back at or above 1. Each completed window splits into
absorption (detection to trough), adoption (trough to the first sample at or
above a threshold alpha) and recovery (threshold to full restoration), and
is scored two ways:

- phase-weighted: sum_k lambda_k * exp(-duration_k / tau),
- recovery-area: time-normalized integral of min(s, 1) over the window.

The cumulative resilience function (CRF) is the running service integral
normalized by the window total, rising from 0 to 1; unlike the area score it
distinguishes recovery trajectories of equal total area.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateRecoveryError,
    InvalidInputError,
    UnterminatedWindowError,
)
from .service_level import ServiceTrace

__all__ = [
    "DisruptionWindow",
    "PhaseDurations",
    "ResilienceScore",
    "detect_disruptions",
    "segment_phases",
    "phase_weighted_resilience",
    "recovery_area_resilience",
    "crf",
    "crf_curve",
    "metrics_report",
]

DESIRED_LEVEL = 1.0
DEFAULT_ADOPTION_THRESHOLD = 0.5
DEFAULT_PHASE_DECAY = 10.0
EQUAL_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


@dataclass(frozen=True)
class DisruptionWindow:
    """One maximal excursion of s(t) below the desired level.

    Index fields locate the samples inside the originating trace;
    ``terminated`` is False when the trace ends before recovery (then
    t_recover and i_recover are None).
    """

    t_detect: float
    t_trough: float
    t_recover: float | None
    terminated: bool
    i_detect: int
    i_trough: int
    i_recover: int | None

    def __post_init__(self):
        if self.terminated:
            if self.t_recover is None or self.i_recover is None:
                raise InvalidInputError("terminated window requires recovery instant")
            if not self.t_detect <= self.t_trough <= self.t_recover:
                raise InvalidInputError("window instants must be ordered")
        elif self.t_detect > self.t_trough:
            raise InvalidInputError("window instants must be ordered")


@dataclass(frozen=True)
class PhaseDurations:
    """Durations of the three recovery phases; they partition the window."""

    absorption: float
    adoption: float
    recovery: float

    def __post_init__(self):
        if self.absorption < 0 or self.adoption < 0 or self.recovery < 0:
            raise InvalidInputError("phase durations must be >= 0")

    def total(self) -> float:
        return self.absorption + self.adoption + self.recovery


@dataclass(frozen=True)
class ResilienceScore:
    value: float
    method: str

    def __post_init__(self):
        if not 0 < self.value <= 1:
            raise InvalidInputError("resilience score must be in (0,1]")
        if self.method not in ("phase_weighted", "recovery_area"):
            raise InvalidInputError(f"unknown scoring method {self.method!r}")


def detect_disruptions(trace: ServiceTrace) -> list[DisruptionWindow]:
    """Maximal windows with s < 1, each extended to the first sample >= 1.

    Windows are disjoint and ordered; a final window still open when the
    trace ends is returned with ``terminated=False``.
    """
    times, values = trace.times, trace.values
    n = len(values)
    windows = []
    i = 0
    while i < n:
        if values[i] >= DESIRED_LEVEL:
            i += 1
            continue
        start = i
        while i < n and values[i] < DESIRED_LEVEL:
            i += 1
        below = values[start:i]
        trough = start + int(np.argmin(below))  # first sample attaining the minimum
        if i < n:
            windows.append(
                DisruptionWindow(
                    t_detect=float(times[start]),
                    t_trough=float(times[trough]),
                    t_recover=float(times[i]),
                    terminated=True,
                    i_detect=start,
                    i_trough=trough,
                    i_recover=i,
                )
            )
        else:
            windows.append(
                DisruptionWindow(
                    t_detect=float(times[start]),
                    t_trough=float(times[trough]),
                    t_recover=None,
                    terminated=False,
                    i_detect=start,
                    i_trough=trough,
                    i_recover=None,
                )
            )
    return windows


def segment_phases(
    trace: ServiceTrace,
    window: DisruptionWindow,
    adoption_threshold: float = DEFAULT_ADOPTION_THRESHOLD,
) -> PhaseDurations:
    """Split a completed window at the trough and at the first sample at or
    above ``adoption_threshold`` after it."""
    if not window.terminated:
        raise UnterminatedWindowError("cannot segment an unterminated window")
    if not 0 < adoption_threshold < 1:
        raise InvalidInputError("adoption threshold must be in (0,1)")
    times, values = trace.times, trace.values
    i_alpha = window.i_recover
    for i in range(window.i_trough, window.i_recover + 1):
        if values[i] >= adoption_threshold:
            i_alpha = i
            break
    t_alpha = float(times[i_alpha])
    return PhaseDurations(
        absorption=window.t_trough - window.t_detect,
        adoption=t_alpha - window.t_trough,
        recovery=window.t_recover - t_alpha,
    )


def phase_weighted_resilience(
    durations: PhaseDurations,
    weights: Sequence[float] = EQUAL_WEIGHTS,
    decay: float = DEFAULT_PHASE_DECAY,
) -> ResilienceScore:
    """Weighted sum of exp(-duration/decay) over the three phases.

    The weights must be nonnegative and sum to one, so the score lives in
    (0,1] and is 1 exactly when every weighted phase has zero duration.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (3,):
        raise InvalidInputError("weights must have exactly 3 entries")
    if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise InvalidInputError("weights must be >= 0 and sum to 1")
    if decay <= 0:
        raise InvalidInputError("decay must be > 0")
    spans = (durations.absorption, durations.adoption, durations.recovery)
    value = float(sum(w * np.exp(-d / decay) for w, d in zip(weights, spans)))
    if value == 0.0:  # exp underflow on extreme durations; the score is (0,1]
        value = 5e-324
    return ResilienceScore(value=value, method="phase_weighted")


def recovery_area_resilience(
    trace: ServiceTrace, window: DisruptionWindow
) -> ResilienceScore:
    """Normalized area under min(s,1) across the window (trapezoidal)."""
    if not window.terminated:
        raise UnterminatedWindowError("recovery area requires a completed window")
    span = window.t_recover - window.t_detect
    if span <= 0:
        raise InvalidInputError("window must have positive length")
    sl = slice(window.i_detect, window.i_recover + 1)
    clipped = np.minimum(trace.values[sl], DESIRED_LEVEL)
    area = float(np.trapezoid(clipped, trace.times[sl]))
    return ResilienceScore(value=area / span, method="recovery_area")


def _cumulative_service(trace: ServiceTrace, window: DisruptionWindow) -> tuple[np.ndarray, np.ndarray]:
    """Sample times of the window and the running trapezoidal integral of
    max(s,0) at each of them."""
    sl = slice(window.i_detect, window.i_recover + 1)
    t = trace.times[sl]
    s = np.clip(trace.values[sl], 0.0, None)
    segments = 0.5 * (s[1:] + s[:-1]) * np.diff(t)
    return t, np.concatenate([[0.0], np.cumsum(segments)])


def crf(trace: ServiceTrace, window: DisruptionWindow, t: float) -> float:
    """Cumulative resilience function at time ``t`` inside the window.

    The running service integral from detection to ``t`` divided by the
    window total; 0 at detection, 1 at recovery, nondecreasing between.
    Linear interpolation of s within a sampling segment.
    """
    if not window.terminated:
        raise UnterminatedWindowError("CRF requires a completed window")
    if not window.t_detect <= t <= window.t_recover:
        raise InvalidInputError("t must lie inside the window")
    times, cumulative = _cumulative_service(trace, window)
    total = float(cumulative[-1])
    if total <= 0:
        raise DegenerateRecoveryError("service integral over the window is zero")
    i = int(np.searchsorted(times, t, side="right")) - 1
    if i >= len(times) - 1:
        return 1.0
    s = np.clip(trace.values[window.i_detect : window.i_recover + 1], 0.0, None)
    dt = t - times[i]
    if dt == 0:
        partial = 0.0
    else:
        seg = times[i + 1] - times[i]
        s_t = s[i] + (s[i + 1] - s[i]) * dt / seg
        partial = 0.5 * (s[i] + s_t) * dt
    return float((cumulative[i] + partial) / total)


def crf_curve(
    trace: ServiceTrace, window: DisruptionWindow
) -> tuple[np.ndarray, np.ndarray]:
    """CRF evaluated at every trace sample inside the window."""
    if not window.terminated:
        raise UnterminatedWindowError("CRF requires a completed window")
    times, cumulative = _cumulative_service(trace, window)
    total = float(cumulative[-1])
    if total <= 0:
        raise DegenerateRecoveryError("service integral over the window is zero")
    return times, cumulative / total


def metrics_report(
    trace: ServiceTrace,
    adoption_threshold: float = DEFAULT_ADOPTION_THRESHOLD,
    decay: float = DEFAULT_PHASE_DECAY,
    weights: Sequence[float] = EQUAL_WEIGHTS,
) -> dict:
    """Full per-window report: instants, phase durations, both scores and a
    sampled CRF curve. Unterminated windows carry detection data only."""
    windows = detect_disruptions(trace)
    report_windows = []
    for w in windows:
        entry: dict = {
            "t_detect": w.t_detect,
            "t_trough": w.t_trough,
            "t_recover": w.t_recover,
            "terminated": w.terminated,
        }
        if w.terminated:
            phases = segment_phases(trace, w, adoption_threshold)
            entry["phases"] = {
                "absorption": phases.absorption,
                "adoption": phases.adoption,
                "recovery": phases.recovery,
            }
            entry["phase_weighted"] = phase_weighted_resilience(
                phases, weights, decay
            ).value
            entry["recovery_area"] = recovery_area_resilience(trace, w).value
            try:
                ts, cs = crf_curve(trace, w)
                entry["crf"] = [
                    {"t": float(t), "value": float(v)} for t, v in zip(ts, cs)
                ]
            except DegenerateRecoveryError:
                entry["crf"] = None
        report_windows.append(entry)
    return {
        "n_windows": len(windows),
        "adoption_threshold": adoption_threshold,
        "decay": decay,
        "weights": list(weights),
        "windows": report_windows,
    }
