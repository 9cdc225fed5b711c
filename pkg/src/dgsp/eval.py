"""Ranking-quality metrics and sample-size bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .patterns import RankedPatterns


def _patterns(ranked) -> list:
    if isinstance(ranked, RankedPatterns):
        return ranked.patterns
    return list(ranked)


def _check_k(k: int, n: int, what: str) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"{what} has {n} entries, fewer than k={k}")


def missing_estimates(exact: RankedPatterns, estimated: Mapping, k: int) -> list:
    """Top-k exact patterns that have no estimate."""
    return [s for s in exact.patterns[:k] if s not in estimated]


def mean_estimation_error(exact: RankedPatterns, estimated: Mapping, k: int) -> float:
    """Average absolute frequency error over the top-k exact patterns.

    Patterns absent from ``estimated`` count with an estimate of 0; use
    :func:`missing_estimates` to report them.
    """
    _check_k(k, len(exact), "exact ranking")
    total = 0.0
    for entry in exact.entries[:k]:
        if entry.freq is None:
            raise ValueError(f"exact entry at rank {entry.rank} has no frequency")
        total += abs(float(entry.freq) - float(estimated.get(entry.pattern, 0.0)))
    return total / k


def average_precision(produced, truth, k: int) -> float:
    """Average precision of a produced ranking against the truth's top-k.

    Precision at produced rank i is counted whenever the pattern at rank i
    belongs to the truth's top-k; the sum over the whole produced list is
    divided by k. The result lies in [0, 1] and equals 1 exactly when the
    produced list starts with the truth's top-k in any order.
    """
    produced = _patterns(produced)
    truth = _patterns(truth)
    _check_k(k, len(truth), "truth ranking")
    top = set(truth[:k])
    hits = 0
    total = 0.0
    for i, s in enumerate(produced, start=1):
        if s in top:
            hits += 1
            total += hits / i
    return total / len(top)


def ranking_similarity(produced, truth, k: int) -> float:
    """Fraction of the truth's top-k that also appears in the produced top-k."""
    produced = _patterns(produced)
    truth = _patterns(truth)
    _check_k(k, len(truth), "truth ranking")
    _check_k(k, len(produced), "produced ranking")
    return len(set(produced[:k]) & set(truth[:k])) / k


@dataclass(frozen=True)
class BoundInputs:
    epsilon: float
    delta: float
    item_count: int
    l: int
    a: float = 1.0
    pattern_count: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.a <= 1:
            raise ValueError(f"a must lie in (0, 1], got {self.a}")
        if self.item_count < 1:
            raise ValueError(f"item count must be positive, got {self.item_count}")
        if self.l < 1:
            raise ValueError(f"path length must be >= 1, got {self.l}")
        if self.pattern_count is not None and self.pattern_count < 1:
            raise ValueError(f"pattern count must be positive, got {self.pattern_count}")


def pattern_union_bound(epsilon: float, delta: float, a: float, pattern_count: int) -> float:
    """Samples needed for all ``pattern_count`` estimates to be eps/2-accurate w.p. 1 - delta."""
    return 12.0 / (epsilon**2 * a) * math.log(2.0 * pattern_count / delta)


def item_universe_bound(epsilon: float, delta: float, a: float, item_count: int, l: int) -> float:
    """The union bound with the pattern count replaced by 2^(|I|(l+1))."""
    return (12.0 * item_count * (l + 1) + 12.0) / (epsilon**2 * a) * math.log(2.0 / delta)


def sample_size_bound(inputs: BoundInputs) -> float:
    if inputs.pattern_count is not None:
        return pattern_union_bound(inputs.epsilon, inputs.delta, inputs.a, inputs.pattern_count)
    return item_universe_bound(inputs.epsilon, inputs.delta, inputs.a, inputs.item_count, inputs.l)


def estimate_a(batch_or_weights) -> float:
    """Mean sampled path weight over the largest sampled path weight.

    Optimistic: the sampled maximum can only undershoot the true maximum.
    """
    if hasattr(batch_or_weights, "weights"):
        weights: Sequence[int] = batch_or_weights.weights()
    else:
        weights = list(batch_or_weights)
    if not weights:
        raise ValueError("cannot estimate a from an empty batch")
    return (sum(weights) / len(weights)) / max(weights)


def exact_a(path_weights: Iterable[int]) -> float:
    """The concentration constant from the full list of path weights."""
    ws = list(path_weights)
    if not ws:
        raise ValueError("no paths")
    return sum(ws) / (len(ws) * max(ws))
