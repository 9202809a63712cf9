"""Rank Dependent Utility over lotteries and uniform sample sets.

A deformation kind is any callable mapping a probability in [0, 1] to [0, 1];
the three built-in kinds are :class:`Neutral`, :class:`Optimistic` (clamped
logit) and :class:`Pessimistic` (shifted logistic, endpoint-normalized).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any, Callable, Sequence, Union

import numpy as np

__all__ = [
    "Neutral",
    "Optimistic",
    "Pessimistic",
    "DeformationKind",
    "NEUTRAL",
    "deform",
    "kind_from_name",
    "rdu_lottery",
    "rdu_samples",
    "decision_weights",
    "estimate_preference",
]


@dataclass(frozen=True)
class Neutral:
    name = "neutral"

    def __call__(self, p: float) -> float:
        return p


@dataclass(frozen=True)
class Optimistic:
    lam: float = 10.0
    name = "optimistic"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")

    def __call__(self, p: float) -> float:
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return 1.0
        return max(0.0, 1.0 + math.log(p / (2.0 - p)) / self.lam)


@dataclass(frozen=True)
class Pessimistic:
    lam: float = 10.0
    shift: float = 1.3
    name = "pessimistic"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")

    def raw(self, p: float) -> float:
        """The un-normalized shifted logistic."""
        return 1.0 / (1.0 + math.exp(-self.lam * (2.0 * p - self.shift)))

    def __call__(self, p: float) -> float:
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return 1.0
        lo, hi = self.raw(0.0), self.raw(1.0)
        return min(1.0, max(0.0, (self.raw(p) - lo) / (hi - lo)))


DeformationKind = Union[Neutral, Optimistic, Pessimistic]
NEUTRAL = Neutral()

_BY_NAME = {"neutral": Neutral, "optimistic": Optimistic, "pessimistic": Pessimistic}


def kind_from_name(name: str) -> DeformationKind:
    try:
        return _BY_NAME[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown deformation kind {name!r}") from None


def deform(kind: Callable[[float], float], p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return kind(p)


def rdu_lottery(entries: Sequence[tuple[float, float]], kind: Callable[[float], float] = NEUTRAL) -> float:
    """RDU of a lottery given as ``(utility, probability)`` pairs.

    Entries are sorted by utility (stably) before the rank-dependent sum.
    """
    if not entries:
        raise ValueError("empty lottery")
    total = math.fsum(p for _, p in entries)
    if abs(total - 1.0) > 1e-9 or any(not 0.0 <= p <= 1.0 for _, p in entries):
        raise ValueError(f"lottery probabilities must lie in [0, 1] and sum to 1 (got {total})")
    ordered = sorted(entries, key=lambda e: e[0])
    utils = [u for u, _ in ordered]
    # tail[j] = p_j + ... + p_n
    tail = [0.0] * len(ordered)
    acc = 0.0
    for j in range(len(ordered) - 1, -1, -1):
        acc += ordered[j][1]
        tail[j] = acc
    value = utils[0]
    for j in range(1, len(utils)):
        value += (utils[j] - utils[j - 1]) * kind(min(1.0, tail[j]))
    return value


def rdu_samples(utilities: Sequence[float], kind: Callable[[float], float] = NEUTRAL) -> float:
    """RDU of ``k`` equiprobable samples."""
    k = len(utilities)
    if k < 1:
        raise ValueError("need at least one sample")
    x = sorted(utilities)
    value = x[0]
    for j in range(1, k):
        value += (x[j] - x[j - 1]) * kind((k - j) / k)
    return value


def decision_weights(k: int, kind: Callable[[float], float] = NEUTRAL) -> np.ndarray:
    """Weights ``w`` such that ``w @ sorted(samples)`` is the RDU of ``k`` samples."""
    if k < 1:
        raise ValueError("need at least one sample")
    tail = np.array([1.0] + [kind((k - j) / k) for j in range(1, k)] + [0.0])
    return tail[:-1] - tail[1:]


def estimate_preference(
    decision: Any,
    sampler: Callable[[random.Random], Any],
    utility: Callable[[Any, Any], float],
    k: int,
    kind: Callable[[float], float],
    rng: random.Random,
) -> float:
    """Score ``decision`` by the RDU of ``k`` sampled consequences."""
    if k < 1:
        raise ValueError("k must be at least 1")
    scores = [utility(decision, sampler(rng)) for _ in range(k)]
    return rdu_samples(scores, kind)
