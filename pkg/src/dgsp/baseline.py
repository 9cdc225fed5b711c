"""Exact ground truth by full enumeration of the induced sequence database.

The induced database of length l is the multiset of all transaction
sequences supported by all simple paths of length l: one record per
(path, choice of one transaction per vertex). It is never stored as a list
of sequences; frequencies are computed by streaming over it, and exact top-k
indexes it once as bitsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import NoPathError
from .graph import DatabaseGraph
from .miner import RecordTable, rank_exact
from .patterns import Pattern, RankedPatterns, contains


@dataclass(frozen=True)
class TransactionSequence:
    path: tuple[int, ...]
    choices: tuple[int, ...]

    def itemsets(self, graph: DatabaseGraph):
        return graph.itemsets(self.path, self.choices)


def enumerate_paths(graph: DatabaseGraph, l: int) -> Iterator[tuple[int, ...]]:
    """All simple paths with ``l`` edges, depth-first in vertex-index order."""
    if l < 1:
        raise ValueError(f"path length must be >= 1, got {l}")
    out = graph.out

    def extend(path: list[int], on_path: set[int]):
        if len(path) == l + 1:
            yield tuple(path)
            return
        for w in out[path[-1]]:
            if w in on_path:
                continue
            path.append(w)
            on_path.add(w)
            yield from extend(path, on_path)
            on_path.discard(w)
            path.pop()

    for v in range(graph.n_vertices):
        yield from extend([v], {v})


def count_paths(graph: DatabaseGraph, l: int) -> int:
    return sum(1 for _ in enumerate_paths(graph, l))


def induce_sequences(graph: DatabaseGraph, path: Sequence[int]) -> Iterator[TransactionSequence]:
    """Every transaction sequence a path supports, in lexicographic choice order."""
    path = tuple(path)
    ranges = [range(len(graph.databases[v])) for v in path]
    for choice in itertools.product(*ranges):
        yield TransactionSequence(path, choice)


def induced_rows(graph: DatabaseGraph, l: int) -> Iterator[tuple]:
    """Stream the itemset tuples of every record of the induced database."""
    for path in enumerate_paths(graph, l):
        dbs = [graph.databases[v] for v in path]
        yield from itertools.product(*dbs)


def induced_size(graph: DatabaseGraph, l: int) -> int:
    return sum(graph.path_weight(p) for p in enumerate_paths(graph, l))


def exact_frequency(graph: DatabaseGraph, l: int, pattern: Pattern) -> Fraction:
    """Fraction of induced records of length ``l`` that contain ``pattern``."""
    if len(pattern) != l + 1:
        raise ValueError(f"pattern has {len(pattern)} itemsets, expected {l + 1}")
    hits = 0
    total = 0
    for path in enumerate_paths(graph, l):
        # Per-position match counts multiply because the records of one
        # path are a full Cartesian product.
        per_pos = []
        for v, x in zip(path, pattern):
            per_pos.append(sum(1 for t in graph.databases[v] if contains((t,), (x,))))
        prod = 1
        for c in per_pos:
            prod *= c
        hits += prod
        total += graph.path_weight(path)
    if total == 0:
        raise NoPathError(f"no simple path of length {l}")
    return Fraction(hits, total)


def exact_frequency_bruteforce(graph: DatabaseGraph, l: int, pattern: Pattern) -> Fraction:
    """Same quantity as :func:`exact_frequency`, by visiting every record."""
    hits = 0
    total = 0
    for row in induced_rows(graph, l):
        total += 1
        hits += contains(row, pattern)
    if total == 0:
        raise NoPathError(f"no simple path of length {l}")
    return Fraction(hits, total)


def exact_table(graph: DatabaseGraph, l: int) -> RecordTable:
    rows = list(induced_rows(graph, l))
    if not rows:
        raise NoPathError(f"no simple path of length {l}")
    return RecordTable(rows)


def exact_topk(graph: DatabaseGraph, l: int, k: int, max_width: int | None = None) -> RankedPatterns:
    """Exact top-k length-l patterns with rational frequencies."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    table = exact_table(graph, l)
    return rank_exact(table, k, graph.item_names, max_width=max_width)
