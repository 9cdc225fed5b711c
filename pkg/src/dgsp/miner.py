"""Weighted positional pattern growth, the unbiased frequency estimator and top-k.

Records are aligned itemset sequences carrying an integer weight. For exact
mining every record of the induced sequence database has weight 1; for
sampled mining a record's weight is the number of transaction sequences its
path supports, so that summing weights over containing records gives the
numerator of the unbiased estimator.

The search is a depth-first growth over positions. At each position an
itemset is grown item by item (a set-enumeration tree over the items seen at
that position among the records still matching the prefix); once an itemset
is fixed, the search moves on to the next position. Weighted support is
anti-monotone along both kinds of extension, so any node whose support is
below the current k-th best can be discarded with its whole subtree.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

from .patterns import (
    ESTIMATED_FREQUENCY,
    EXACT_FREQUENCY,
    WEIGHTED_SUPPORT,
    Pattern,
    RankedEntry,
    RankedPatterns,
    canonical_key,
    contains,
)

if TYPE_CHECKING:
    from .sampler import SampleBatch

# Above this many distinct record weights, supports are computed with a
# numpy dot product instead of one popcount per weight class.
_MAX_WEIGHT_CLASSES = 48


def _bits_from_indices(indices: np.ndarray, n: int) -> int:
    mask = np.zeros(n, dtype=bool)
    mask[indices] = True
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


class RecordTable:
    """Vertical bitset index over weighted, aligned itemset sequences."""

    def __init__(self, rows: Sequence[Sequence[Sequence[int]]], weights: Sequence[int] | None = None):
        n = len(rows)
        if n == 0:
            raise ValueError("cannot index an empty record set")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("all records must have the same number of positions")
        self.n = n
        self.width = width
        self.unit = weights is None or all(w == 1 for w in weights)
        self.all_bits = (1 << n) - 1
        self.total_weight = n if self.unit else int(sum(int(w) for w in weights))

        self.columns: list[dict[int, int]] = []
        for q in range(width):
            rec_idx = []
            item_idx = []
            for r, row in enumerate(rows):
                tx = row[q]
                rec_idx.extend([r] * len(tx))
                item_idx.extend(tx)
            rec = np.asarray(rec_idx, dtype=np.int64)
            items = np.asarray(item_idx, dtype=np.int64)
            order = np.argsort(items, kind="stable")
            rec, items = rec[order], items[order]
            uniq, starts = np.unique(items, return_index=True)
            bounds = list(starts[1:]) + [len(items)]
            cols = {}
            for item, lo, hi in zip(uniq.tolist(), starts.tolist(), bounds):
                cols[item] = _bits_from_indices(rec[lo:hi], n)
            self.columns.append(cols)

        self._classes: list[tuple[int, int]] | None = None
        self._dense: np.ndarray | None = None
        if not self.unit:
            by_weight: dict[int, list[int]] = {}
            for r, w in enumerate(weights):
                by_weight.setdefault(int(w), []).append(r)
            if len(by_weight) <= _MAX_WEIGHT_CLASSES:
                self._classes = [
                    (w, _bits_from_indices(np.asarray(idx, dtype=np.int64), n))
                    for w, idx in sorted(by_weight.items())
                ]
            else:
                self._dense = np.asarray([float(w) for w in weights])
                self._dense_int = [int(w) for w in weights]

    def support(self, bits: int) -> int:
        if self.unit:
            return bits.bit_count()
        if self._classes is not None:
            return sum(w * (bits & m).bit_count() for w, m in self._classes)
        raw = np.frombuffer(bits.to_bytes((self.n + 7) // 8, "little"), dtype=np.uint8)
        idx = np.flatnonzero(np.unpackbits(raw, bitorder="little")[: self.n])
        return sum(self._dense_int[i] for i in idx.tolist())

    def bits_for(self, pattern: Pattern) -> int:
        bits = self.all_bits
        for q, itemset in enumerate(pattern):
            cols = self.columns[q]
            for item in itemset:
                col = cols.get(item)
                if col is None:
                    return 0
                bits &= col
        return bits

    def pattern_support(self, pattern: Pattern) -> int:
        if len(pattern) != self.width:
            raise ValueError(f"pattern has {len(pattern)} positions, records have {self.width}")
        return self.support(self.bits_for(pattern))


class _Rev:
    """Inverts ordering so a min-heap evicts the canonically last pattern first."""

    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other):
        return self.key > other.key

    def __eq__(self, other):
        return self.key == other.key


def topk_patterns(
    table: RecordTable,
    k: int,
    max_width: int | None = None,
    prune: bool = True,
) -> list[tuple[Pattern, int]]:
    """The k patterns of largest weighted support, ties in canonical order.

    Only patterns with positive support are returned. ``max_width`` caps the
    size of every positional itemset. With ``prune=False`` the whole lattice
    of supported patterns is walked; useful only as a cross-check.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    last = table.width - 1
    heap: list[tuple[int, _Rev, Pattern]] = []

    def threshold() -> int:
        if prune and len(heap) == k:
            return heap[0][0]
        return 1

    def offer(pattern: Pattern, sup: int) -> None:
        entry = (sup, _Rev(canonical_key(pattern)), pattern)
        if len(heap) < k:
            heapq.heappush(heap, entry)
        elif entry[:2] > heap[0][:2]:
            heapq.heapreplace(heap, entry)

    def candidates(q: int, bits: int) -> list[tuple[int, int, int]]:
        floor = threshold()
        found = []
        for item, col in table.columns[q].items():
            b = bits & col
            if not b:
                continue
            sup = table.support(b)
            if sup >= floor:
                found.append((item, b, sup))
        # High-support branches first so the threshold rises early.
        found.sort(key=lambda c: (-c[2], c[0]))
        return found

    def grow_position(q: int, prefix: tuple, bits: int) -> None:
        cands = candidates(q, bits)
        grow_itemset(q, prefix, (), cands)

    def grow_itemset(q: int, prefix: tuple, itemset: tuple, cands: list) -> None:
        for pos, (item, b, sup) in enumerate(cands):
            if sup < threshold():
                continue
            current = itemset + (item,)
            closed = tuple(sorted(current))
            if q == last:
                offer(prefix + (closed,), sup)
            else:
                grow_position(q + 1, prefix + (closed,), b)
            if max_width is not None and len(current) >= max_width:
                continue
            floor = threshold()
            tail = []
            for item2, b2, _ in cands[pos + 1 :]:
                bb = b & b2
                if not bb:
                    continue
                sup2 = table.support(bb)
                if sup2 >= floor:
                    tail.append((item2, bb, sup2))
            if tail:
                grow_itemset(q, prefix, current, tail)

    grow_position(0, (), table.all_bits)
    ranked = sorted(heap, key=lambda e: (-e[0], canonical_key(e[2])))
    return [(pattern, sup) for sup, _, pattern in ranked]


@dataclass
class EstimatorState:
    """Sufficient statistics of the frequency estimator over one sample batch.

    ``accumulators[s]`` is the summed path weight of records containing s.
    States over disjoint shards of a batch combine with ``+``.
    """

    total_weight: int = 0
    batch_size: int = 0
    accumulators: dict = field(default_factory=dict)

    def __add__(self, other: EstimatorState) -> EstimatorState:
        acc = dict(self.accumulators)
        for s, v in other.accumulators.items():
            acc[s] = acc.get(s, 0) + v
        return EstimatorState(
            total_weight=self.total_weight + other.total_weight,
            batch_size=self.batch_size + other.batch_size,
            accumulators=acc,
        )

    @classmethod
    def from_records(
        cls,
        rows: Iterable[Sequence[Sequence[int]]],
        weights: Iterable[int],
        patterns: Iterable[Pattern],
    ) -> EstimatorState:
        patterns = list(patterns)
        acc = {s: 0 for s in patterns}
        total = 0
        count = 0
        for row, w in zip(rows, weights):
            total += w
            count += 1
            for s in patterns:
                if contains(row, s):
                    acc[s] += w
        return cls(total_weight=total, batch_size=count, accumulators=acc)

    @classmethod
    def from_batch(cls, batch: SampleBatch, patterns: Iterable[Pattern]) -> EstimatorState:
        return cls.from_records(batch.itemset_rows(), batch.weights(), patterns)


def estimate_frequency(
    state: EstimatorState,
    pattern: Pattern,
    p_l_count: int | None = None,
    total_path_weight: int | None = None,
) -> float:
    """Estimated frequency of ``pattern`` from accumulated sample statistics.

    With both ``p_l_count`` (number of length-l paths) and
    ``total_path_weight`` (summed weight of all those paths) the unbiased
    estimator is returned: acc / ((batch_size / p_l_count) * total_path_weight).
    Without them, the ratio acc / total sampled weight is returned instead; it
    is consistent but only asymptotically unbiased.
    """
    if state.batch_size < 1:
        raise ValueError("estimator state is empty")
    acc = state.accumulators.get(pattern)
    if acc is None:
        raise KeyError(f"pattern {pattern!r} was not accumulated")
    if (p_l_count is None) != (total_path_weight is None):
        raise ValueError("p_l_count and total_path_weight must be given together")
    if p_l_count is not None:
        return acc * p_l_count / (state.batch_size * total_path_weight)
    return acc / state.total_weight


def mine_topk(
    batch: SampleBatch,
    k: int,
    max_width: int | None = None,
    prune: bool = True,
) -> RankedPatterns:
    """Top-k patterns of a sample batch ranked by weighted support.

    The ranking key is the estimator numerator; the denominator is shared by
    all patterns so it cannot change the order. ``freq`` carries the ratio
    estimate support / total sampled weight.
    """
    if len(batch.records) == 0:
        raise ValueError("batch is empty")
    table = RecordTable(batch.itemset_rows(), batch.weights())
    found = topk_patterns(table, k, max_width=max_width, prune=prune)
    entries = [
        RankedEntry(rank=r, pattern=s, support=sup, freq=sup / table.total_weight)
        for r, (s, sup) in enumerate(found, start=1)
    ]
    return RankedPatterns(
        entries=entries,
        score_kind=WEIGHTED_SUPPORT,
        item_names=batch.graph.item_names,
        meta={"total_weight": table.total_weight, "batch_size": len(batch.records)},
    )


def rank_exact(table: RecordTable, k: int, item_names, max_width: int | None = None) -> RankedPatterns:
    """Top-k over a unit-weight table, with exact rational frequencies attached."""
    found = topk_patterns(table, k, max_width=max_width)
    entries = [
        RankedEntry(rank=r, pattern=s, support=sup, freq=Fraction(sup, table.n))
        for r, (s, sup) in enumerate(found, start=1)
    ]
    return RankedPatterns(
        entries=entries,
        score_kind=EXACT_FREQUENCY,
        item_names=tuple(item_names),
        meta={"d_l_size": table.n},
    )


def estimated_frequencies(ranked: RankedPatterns) -> Mapping:
    """Pattern -> estimated frequency lookup for a sampled ranking."""
    if ranked.score_kind not in (WEIGHTED_SUPPORT, ESTIMATED_FREQUENCY):
        raise ValueError(f"not a sampled ranking: {ranked.score_kind}")
    return ranked.frequencies()
