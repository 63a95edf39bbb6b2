"""Preemptive resource allocation against an outage target.

``min_allocation`` picks the smallest number of independently faded resource
units whose belief-weighted outage meets the target; static baselines
provision for the worst state or a fixed count; ``staggered_degrade`` grants
SLA tiers their state-dependent demand in priority order when capacity is
constrained.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import LinkModel, MarkovChain, success_prob
from .errors import InvalidInputError
from .service_level import SlaTier, validate_tiers

__all__ = [
    "AllocationDecision",
    "SystemState",
    "DEFAULT_N_MAX",
    "min_allocation",
    "static_baseline",
    "staggered_degrade",
]

# (1-p)^64 underflows past any practical target for p >= 0.07
DEFAULT_N_MAX = 64

SYSTEM_LABELS = ("normal", "degraded", "emergency")


@dataclass(frozen=True)
class AllocationDecision:
    """Resource units chosen for one slot.

    ``saturated`` marks a target unattainable within the resource cap; the
    decision then carries the cap itself rather than failing, so protection
    keeps operating at degraded assurance.
    """

    n: int
    saturated: bool
    expected_outage: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("allocation must be >= 1 resource unit")
        if not 0 <= self.expected_outage <= 1:
            raise InvalidInputError("expected_outage must be in [0,1]")


@dataclass(frozen=True)
class SystemState:
    """Operating state label plus the fraction of nominal capacity available."""

    label: str
    capacity_fraction: float

    def __post_init__(self):
        if self.label not in SYSTEM_LABELS:
            raise InvalidInputError(f"label must be one of {SYSTEM_LABELS}")
        if not 0 <= self.capacity_fraction <= 1:
            raise InvalidInputError("capacity_fraction must be in [0,1]")


def search_min_units(
    fail_probs: Sequence[float],
    weights: Sequence[float],
    target: float,
    n_max: int,
) -> tuple[int, bool, float]:
    """Smallest n with sum_i w_i * q_i^n <= target, capped at n_max.

    The weighted outage is nonincreasing in n, so an exponential ramp
    followed by bisection finds the exact minimum; returns
    (n, saturated, outage_at_n).
    """

    def f(n: int) -> float:
        return sum(w * q**n for w, q in zip(weights, fail_probs))

    if f(n_max) > target:
        return n_max, True, f(n_max)
    lo, hi = 0, 1  # invariant: f(lo) > target (virtual f(0) >= 1 > target), f(hi) <= target at exit
    while f(hi) > target:
        lo = hi
        hi = min(hi * 2, n_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi, False, f(hi)


def min_allocation(
    link: LinkModel,
    powers: Sequence[float],
    belief: Sequence[float],
    target: float,
    n_max: int = DEFAULT_N_MAX,
) -> AllocationDecision:
    """Minimum resource units whose expected outage under ``belief`` meets
    ``target``; returns the cap with ``saturated=True`` when unattainable."""
    if not 0 < target < 1:
        raise InvalidInputError("target outage must be in (0,1)")
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    belief = np.asarray(belief, dtype=float)
    powers = np.asarray(powers, dtype=float)
    if belief.shape != powers.shape or belief.ndim != 1 or len(belief) == 0:
        raise InvalidInputError("belief and powers must be 1-D and the same length")
    if np.any(belief < 0):
        raise InvalidInputError("belief entries must be >= 0")
    if abs(float(belief.sum()) - 1.0) > 1e-9:
        raise InvalidInputError("belief must sum to 1")
    fail = [1.0 - success_prob(link, float(i)) for i in powers]
    n, saturated, value = search_min_units(fail, belief.tolist(), target, n_max)
    return AllocationDecision(n=n, saturated=saturated, expected_outage=value)


def static_baseline(
    link: LinkModel,
    chain: MarkovChain,
    target: float,
    mode: str = "worst_state",
    fixed: int | None = None,
    n_max: int = DEFAULT_N_MAX,
) -> np.ndarray:
    """Per-state allocation of a non-adaptive scheme.

    ``worst_state`` provisions every state for the highest interference
    power; ``fixed`` allocates a constant ``fixed`` units everywhere.
    """
    k = chain.n_states
    if mode == "worst_state":
        worst = float(np.max(chain.powers))
        decision = min_allocation(link, [worst], [1.0], target, n_max)
        return np.full(k, decision.n, dtype=int)
    if mode == "fixed":
        if fixed is None or fixed < 1:
            raise InvalidInputError("fixed mode requires fixed >= 1")
        return np.full(k, int(fixed), dtype=int)
    raise InvalidInputError(f"unknown baseline mode {mode!r}")


def staggered_degrade(
    tiers: Sequence[SlaTier],
    state: SystemState,
    nominal_capacity: float,
) -> dict[str, float]:
    """Grant tiers their state-dependent demand in ascending priority order.

    Under the normal label a tier wants its full demand, otherwise its
    degraded demand. The marginal tier may be granted partially; later tiers
    get zero. Total grants never exceed available capacity.
    """
    validate_tiers(tiers)
    if nominal_capacity < 0:
        raise InvalidInputError("nominal_capacity must be >= 0")
    available = nominal_capacity * state.capacity_fraction
    grants: dict[str, float] = {}
    for tier in sorted(tiers, key=lambda t: t.priority):
        want = tier.demand if state.label == "normal" else tier.degraded_demand
        granted = min(want, available)
        grants[tier.name] = granted
        available -= granted
    return grants
