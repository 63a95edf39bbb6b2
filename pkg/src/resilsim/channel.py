"""Markov-modulated interference and the fading/outage math of a single link.

The interference power seen by the link follows a discrete-state,
discrete-time Markov chain. Per slot, a transmission over one resource unit
succeeds when an exponentially distributed channel gain clears the
SINR-threshold level, giving the closed form

    p(I) = exp(-theta * (N0 + I) / S_mean)

and with n independently faded units the outage probability is (1 - p)^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NonErgodicError

__all__ = [
    "MarkovChain",
    "LinkModel",
    "step",
    "stationary",
    "success_prob",
    "outage",
    "expected_outage",
]

ROW_SUM_TOL = 1e-9
STATIONARY_RESIDUAL_TOL = 1e-10
# eigenvalues this close to the unit circle (other than the Perron root)
# indicate a periodic or reducible chain
UNIT_CIRCLE_TOL = 1e-9


@dataclass(frozen=True)
class MarkovChain:
    """K interference power levels with a row-stochastic transition matrix."""

    powers: np.ndarray
    transition: np.ndarray

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=float)
        transition = np.asarray(self.transition, dtype=float)
        if powers.ndim != 1 or len(powers) == 0:
            raise InvalidInputError("powers must be a nonempty 1-D array")
        if not np.all(np.isfinite(powers)) or np.any(powers < 0):
            raise InvalidInputError("powers must be finite and >= 0")
        k = len(powers)
        if transition.shape != (k, k):
            raise InvalidInputError(f"transition must be {k}x{k}")
        if np.any(transition < 0) or np.any(transition > 1):
            raise InvalidInputError("transition entries must be in [0,1]")
        if np.any(np.abs(transition.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise InvalidInputError("each transition row must sum to 1")
        powers.setflags(write=False)
        transition.setflags(write=False)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "transition", transition)
        cum = np.cumsum(transition, axis=1)
        cum.setflags(write=False)
        object.__setattr__(self, "_cumulative", cum)

    @property
    def n_states(self) -> int:
        return len(self.powers)

    def cumulative_rows(self) -> np.ndarray:
        """Per-row cumulative transition probabilities (read-only)."""
        return self._cumulative


@dataclass(frozen=True)
class LinkModel:
    """Average received signal power, noise floor and SINR threshold,
    all in linear units."""

    mean_signal: float
    noise: float
    sinr_threshold: float

    def __post_init__(self):
        if not (np.isfinite(self.mean_signal) and self.mean_signal > 0):
            raise InvalidInputError("mean_signal must be > 0")
        if not (np.isfinite(self.noise) and self.noise >= 0):
            raise InvalidInputError("noise must be >= 0")
        if not (np.isfinite(self.sinr_threshold) and self.sinr_threshold > 0):
            raise InvalidInputError("sinr_threshold must be > 0")


def step(chain: MarkovChain, state: int, rng: np.random.Generator) -> int:
    """Sample the next state from the transition row of ``state``.

    Consumes exactly one uniform draw from ``rng``.
    """
    if not 0 <= state < chain.n_states:
        raise InvalidInputError(f"state {state} out of range [0,{chain.n_states})")
    u = rng.random()
    row = chain.cumulative_rows()[state]
    nxt = int(np.searchsorted(row, u, side="right"))
    return min(nxt, chain.n_states - 1)


def stationary(chain: MarkovChain) -> np.ndarray:
    """Stationary distribution pi with pi P = pi, sum(pi) = 1.

    Solved through the eigen-decomposition of P^T. Raises
    :class:`NonErgodicError` when the unit eigenvalue is not unique or other
    eigenvalues sit on the unit circle (reducible or periodic chain).
    """
    p = chain.transition
    k = chain.n_states
    if k == 1:
        return np.array([1.0])
    eigvals, eigvecs = np.linalg.eig(p.T)
    unit = np.where(np.abs(eigvals - 1.0) <= UNIT_CIRCLE_TOL)[0]
    if len(unit) != 1:
        raise NonErgodicError("no unique stationary distribution (reducible chain)")
    others = np.delete(np.arange(k), unit[0])
    if np.any(np.abs(eigvals[others]) >= 1.0 - UNIT_CIRCLE_TOL):
        raise NonErgodicError("chain is periodic; stationary distribution is not limiting")
    vec = eigvecs[:, unit[0]]
    if np.max(np.abs(vec.imag)) > 1e-8:
        raise NonErgodicError("stationary eigenvector is not real")
    pi = vec.real
    pi = pi / pi.sum()
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    # polish with power iterations; eig alone can leave residual above tolerance
    for _ in range(200):
        nxt = pi @ p
        if np.max(np.abs(nxt - pi)) <= STATIONARY_RESIDUAL_TOL / 10:
            pi = nxt
            break
        pi = nxt
    pi = pi / pi.sum()
    if np.max(np.abs(pi @ p - pi)) > STATIONARY_RESIDUAL_TOL:
        raise NonErgodicError("fixed-point iteration did not converge")
    return pi


def success_prob(link: LinkModel, interference: float) -> float:
    """Per-unit success probability under exponential (Rayleigh power) fading."""
    if not (np.isfinite(interference) and interference >= 0):
        raise InvalidInputError("interference must be finite and >= 0")
    return float(
        np.exp(-link.sinr_threshold * (link.noise + interference) / link.mean_signal)
    )


def outage(link: LinkModel, interference: float, n: int) -> float:
    """Probability that all ``n`` independently faded units fail."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InvalidInputError("n must be an integer >= 1")
    p = success_prob(link, interference)
    return (1.0 - p) ** n


def expected_outage(
    link: LinkModel,
    belief: np.ndarray,
    powers: np.ndarray,
    n: int,
) -> float:
    """Belief-weighted outage: sum_i belief_i * outage(powers_i, n)."""
    belief = np.asarray(belief, dtype=float)
    powers = np.asarray(powers, dtype=float)
    if belief.shape != powers.shape or belief.ndim != 1:
        raise InvalidInputError("belief and powers must be 1-D and the same length")
    if np.any(belief < 0):
        raise InvalidInputError("belief entries must be >= 0")
    if abs(belief.sum() - 1.0) > ROW_SUM_TOL:
        raise InvalidInputError("belief must sum to 1")
    return float(sum(b * outage(link, float(i), n) for b, i in zip(belief, powers)))
