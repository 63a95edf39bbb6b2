"""One-step-ahead interference predictors.

Three interchangeable kinds:

- ``oracle``    — knows the true next state (idealized upper bound),
- ``markov``    — maximum-likelihood transition estimates with Laplace
                  smoothing and optional exponential forgetting, updated
                  online as transitions are observed,
- ``average``   — mean of a sliding window of past interference powers,
                  emitted as a point-mass belief on that interpolated power.

A predictor owns mutable state and must not be shared across replications.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidInputError,
    MissingOracleInputError,
)

__all__ = [
    "Prediction",
    "belief_entropy",
    "mle_estimate",
    "OraclePredictor",
    "MarkovMlePredictor",
    "MovingAveragePredictor",
    "make_predictor",
    "PREDICTOR_KINDS",
]

PREDICTOR_KINDS = ("oracle", "markov", "average")


@dataclass(frozen=True)
class Prediction:
    """A belief over interference powers for the next slot.

    For grid predictors (oracle, markov) ``powers`` is the chain's power
    vector and ``belief`` a distribution over its K states. The averaging
    predictor returns a single interpolated power with unit mass.
    """

    kind: str
    belief: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        belief = np.asarray(self.belief, dtype=float)
        powers = np.asarray(self.powers, dtype=float)
        if belief.shape != powers.shape or belief.ndim != 1 or len(belief) == 0:
            raise InvalidInputError("belief and powers must be 1-D and the same length")
        if np.any(belief < 0) or np.any(belief > 1):
            raise InvalidInputError("belief entries must be in [0,1]")
        if abs(belief.sum() - 1.0) > 1e-9:
            raise InvalidInputError("belief must sum to 1")
        belief.setflags(write=False)
        powers.setflags(write=False)
        object.__setattr__(self, "belief", belief)
        object.__setattr__(self, "powers", powers)


def belief_entropy(belief: Sequence[float]) -> float:
    """Shannon entropy of a belief, in nats. Zero terms contribute zero."""
    return float(-sum(b * math.log(b) for b in belief if b > 0.0))


def mle_estimate(sequence: Sequence[int], k: int, smoothing: float = 0.0) -> np.ndarray:
    """Row-stochastic transition estimate from an observed state sequence.

    Entry (i,j) is (count(i->j) + a) / (sum_j' count(i->j') + K*a) with
    Laplace pseudo-count ``a``. Rows with no outgoing observations fall back
    to the uniform distribution.
    """
    sequence = list(sequence)
    if len(sequence) < 2:
        raise InsufficientDataError("need at least 2 observations to count transitions")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    if smoothing < 0:
        raise InvalidInputError("smoothing must be >= 0")
    for s in sequence:
        if not 0 <= s < k:
            raise InvalidInputError(f"state {s} out of range [0,{k})")
    counts = np.zeros((k, k), dtype=float)
    for prev, nxt in zip(sequence, sequence[1:]):
        counts[prev, nxt] += 1.0
    return _normalize_counts(counts, smoothing)


def _normalize_counts(counts: np.ndarray, smoothing: float) -> np.ndarray:
    k = counts.shape[0]
    totals = counts.sum(axis=1, keepdims=True)
    matrix = np.empty_like(counts)
    for i in range(k):
        denom = totals[i, 0] + k * smoothing
        if denom > 0:
            matrix[i] = (counts[i] + smoothing) / denom
        else:
            matrix[i] = 1.0 / k
    return matrix


class OraclePredictor:
    """Ideal predictor: the simulator feeds it the true next state."""

    kind = "oracle"

    def __init__(self, powers: Sequence[float]):
        self.powers = np.asarray(powers, dtype=float)

    def reset(self, initial_state: int) -> None:
        pass

    def observe(self, prev_state: int, new_state: int) -> None:
        pass

    def predict(self, current_state: int, true_next: int | None = None) -> Prediction:
        if true_next is None:
            raise MissingOracleInputError("oracle prediction requires the true next state")
        if not 0 <= true_next < len(self.powers):
            raise InvalidInputError(f"state {true_next} out of range")
        belief = np.zeros(len(self.powers))
        belief[true_next] = 1.0
        return Prediction(kind=self.kind, belief=belief, powers=self.powers)


class MarkovMlePredictor:
    """Online transition-count estimator.

    ``observe`` scales every count by the forgetting factor and then adds one
    to the (previous, observed) cell; ``predict`` returns the smoothed row of
    the current estimate. Unvisited rows predict uniform.
    """

    kind = "markov"

    def __init__(
        self,
        powers: Sequence[float],
        smoothing: float = 1.0,
        forgetting: float = 1.0,
    ):
        if smoothing < 0:
            raise InvalidInputError("smoothing must be >= 0")
        if not 0 < forgetting <= 1:
            raise InvalidInputError("forgetting must be in (0,1]")
        self.powers = np.asarray(powers, dtype=float)
        self.k = len(self.powers)
        self.smoothing = smoothing
        self.forgetting = forgetting
        # plain lists: this is the per-slot hot path of the simulator
        self.counts = [[0.0] * self.k for _ in range(self.k)]
        self.row_totals = [0.0] * self.k

    def reset(self, initial_state: int) -> None:
        pass

    def observe(self, prev_state: int, new_state: int) -> None:
        if not (0 <= prev_state < self.k and 0 <= new_state < self.k):
            raise InvalidInputError("observed states out of range")
        g = self.forgetting
        if g != 1.0:
            for row in self.counts:
                for j in range(self.k):
                    row[j] *= g
            for i in range(self.k):
                self.row_totals[i] *= g
        self.counts[prev_state][new_state] += 1.0
        self.row_totals[prev_state] += 1.0

    def belief_row(self, state: int) -> list[float]:
        """Smoothed belief for the row of ``state`` (uniform when unseen)."""
        denom = self.row_totals[state] + self.k * self.smoothing
        if denom <= 0:
            return [1.0 / self.k] * self.k
        a = self.smoothing
        row = self.counts[state]
        return [(row[j] + a) / denom for j in range(self.k)]

    def estimated_matrix(self) -> np.ndarray:
        return _normalize_counts(np.array(self.counts, dtype=float), self.smoothing)

    def predict(self, current_state: int, true_next: int | None = None) -> Prediction:
        if not 0 <= current_state < self.k:
            raise InvalidInputError(f"state {current_state} out of range")
        belief = np.array(self.belief_row(current_state))
        return Prediction(kind=self.kind, belief=belief, powers=self.powers)


class MovingAveragePredictor:
    """Point-mass belief on the mean of the last W observed powers."""

    kind = "average"

    def __init__(self, powers: Sequence[float], window: int = 10):
        if window < 1:
            raise InvalidInputError("window must be >= 1")
        self.powers = np.asarray(powers, dtype=float)
        self.window = window
        self._values: deque[float] = deque()
        self._total = 0.0
        self._pushes = 0

    def reset(self, initial_state: int) -> None:
        self._values.clear()
        self._total = 0.0
        self._pushes = 0
        self.push(float(self.powers[initial_state]))

    def push(self, power: float) -> None:
        """Append one observed power, evicting the oldest beyond the window."""
        if not (math.isfinite(power) and power >= 0):
            raise InvalidInputError("observed power must be finite and >= 0")
        self._values.append(power)
        self._total += power
        if len(self._values) > self.window:
            self._total -= self._values.popleft()
        # running add/subtract drifts on long runs; resum periodically
        self._pushes += 1
        if self._pushes % 4096 == 0:
            self._total = math.fsum(self._values)

    def observe(self, prev_state: int, new_state: int) -> None:
        if not 0 <= new_state < len(self.powers):
            raise InvalidInputError("observed state out of range")
        self.push(float(self.powers[new_state]))

    def window_values(self) -> tuple[float, ...]:
        return tuple(self._values)

    def window_mean(self) -> float:
        if not self._values:
            raise InsufficientDataError("averaging window is empty")
        return self._total / len(self._values)

    def predict(self, current_state: int, true_next: int | None = None) -> Prediction:
        mean = self.window_mean()
        return Prediction(
            kind=self.kind,
            belief=np.array([1.0]),
            powers=np.array([mean]),
        )


def make_predictor(
    kind: str,
    powers: Sequence[float],
    smoothing: float = 1.0,
    forgetting: float = 1.0,
    window: int = 10,
):
    if kind == "oracle":
        return OraclePredictor(powers)
    if kind == "markov":
        return MarkovMlePredictor(powers, smoothing=smoothing, forgetting=forgetting)
    if kind == "average":
        return MovingAveragePredictor(powers, window=window)
    raise InvalidInputError(f"unknown predictor kind {kind!r}")
