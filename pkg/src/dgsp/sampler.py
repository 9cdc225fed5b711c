"""Two-step sampling of transaction sequences: a path, then one transaction per vertex.

Paths are drawn vertex by vertex, each step choosing an out-neighbour with
probability proportional to its continuation weight. In walk-count mode the
weights count walks, so every length-l walk is equally likely; walks that
revisit a vertex are rejected and redrawn, which leaves the simple paths
uniformly distributed.

Batches are split into fixed-size blocks, each with its own RNG substream
derived from (seed, block index). Workers pick up whole blocks, so the
output depends only on the seed and never on the number of workers.
"""

from __future__ import annotations

import json
import os
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate
from typing import IO, Sequence

import numpy as np

from .errors import NoPathError, RejectionBudgetExceeded
from .graph import WALK_COUNT, WEIGHT_MODES, DatabaseGraph, WeightTable, compute_weights

DEFAULT_REJECTION_BUDGET = 10**6
BLOCK_SIZE = 4096
_BUFFER = 8192


def rejection_budget_from_env(default: int = DEFAULT_REJECTION_BUDGET) -> int:
    raw = os.environ.get("DGSP_REJECTION_BUDGET")
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"DGSP_REJECTION_BUDGET must be positive, got {value}")
    return value


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for block ``index`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


class UniformStream:
    """Buffered scalar uniforms in [0, 1) from a numpy generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self._buf: list[float] = []
        self._pos = 0

    def __call__(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self.rng.random(_BUFFER).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def as_stream(rng) -> UniformStream:
    if isinstance(rng, UniformStream):
        return rng
    if isinstance(rng, np.random.Generator):
        return UniformStream(rng)
    if rng is None or isinstance(rng, (int, np.integer)):
        return UniformStream(np.random.default_rng(rng))
    raise TypeError(f"cannot use {type(rng).__name__} as a random stream")


@dataclass(frozen=True)
class SampleRecord:
    path: tuple[int, ...]
    tids: tuple[int, ...]
    weight: int


@dataclass
class SampleBatch:
    records: list[SampleRecord]
    l: int
    seed: int | None
    weight_mode: str
    graph: DatabaseGraph = field(repr=False, compare=False)
    rejections: int = 0

    def weights(self) -> list[int]:
        return [r.weight for r in self.records]

    def itemset_rows(self) -> list[tuple]:
        g = self.graph
        return [g.itemsets(r.path, r.tids) for r in self.records]

    @property
    def rejection_rate(self) -> float:
        attempts = len(self.records) + self.rejections
        return self.rejections / attempts if attempts else 0.0

    def to_jsonl(self, fh: IO[str] | None = None) -> str:
        names = self.graph.vertex_ids
        lines = [
            json.dumps(
                {"path": [names[v] for v in r.path], "tids": list(r.tids), "weight": r.weight},
                separators=(",", ":"),
            )
            for r in self.records
        ]
        text = "".join(line + "\n" for line in lines)
        if fh is not None:
            fh.write(text)
        return text


def read_sample_weights(fh: IO[str]) -> list[int]:
    """Path weights from a JSON-lines sample export."""
    weights = []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            w = int(rec["weight"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"sample line {lineno}: {exc}") from exc
        if w < 1:
            raise ValueError(f"sample line {lineno}: weight must be positive")
        weights.append(w)
    return weights


class PathSampler:
    """Precomputed per-(vertex, remaining length) cumulative tables."""

    def __init__(self, graph: DatabaseGraph, weights: WeightTable, l: int | None = None):
        l = weights.l if l is None else l
        if l > weights.l:
            raise ValueError(f"weight table covers depth {weights.l}, need {l}")
        self.graph = graph
        self.l = l
        self.mode = weights.mode
        starts = weights.column(l)
        self.start_cum = list(accumulate(starts))
        self.start_total = self.start_cum[-1] if self.start_cum else 0
        if self.start_total == 0:
            raise NoPathError(f"no vertex has a length-{l} continuation")
        # step[r][v] = (neighbours, cumulative weights) for choosing the next
        # vertex when r edges remain after it.
        self.step: list[list[tuple[tuple[int, ...], list[int], int]]] = []
        for r in range(l):
            table = []
            for v, nbrs in enumerate(graph.out):
                ws = [weights(u, r) for u in nbrs]
                if self.mode != WALK_COUNT:
                    keep = [(u, w) for u, w in zip(nbrs, ws) if w > 0]
                    nbrs = tuple(u for u, _ in keep)
                    ws = [w for _, w in keep]
                cum = list(accumulate(ws))
                total = cum[-1] if cum else 0
                if self.mode == WALK_COUNT:
                    # Out-neighbour probabilities sum to one exactly.
                    assert total == weights(v, r + 1), (v, r, total)
                table.append((tuple(nbrs), cum, total))
            self.step.append(table)

    def draw_walk(self, uniform: UniformStream) -> list[int]:
        v = bisect_right(self.start_cum, uniform() * self.start_total)
        walk = [v]
        for r in range(self.l - 1, -1, -1):
            nbrs, cum, total = self.step[r][v]
            if total == 0:
                raise NoPathError(f"dead end at vertex {self.graph.vertex_ids[v]!r}")
            v = nbrs[bisect_right(cum, uniform() * total)]
            walk.append(v)
        return walk

    def draw(self, uniform: UniformStream, budget: int = DEFAULT_REJECTION_BUDGET) -> tuple[tuple[int, ...], int]:
        """A simple path and the number of walks rejected before it."""
        rejected = 0
        while True:
            walk = self.draw_walk(uniform)
            if len(set(walk)) == len(walk):
                return tuple(walk), rejected
            rejected += 1
            if rejected >= budget:
                raise RejectionBudgetExceeded(
                    f"{rejected} consecutive non-simple walks of length {self.l}; "
                    "the graph is dominated by walks that revisit vertices"
                )


def sample_path(
    graph: DatabaseGraph,
    weights: WeightTable,
    l: int,
    rng=None,
    budget: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[int, ...]:
    return PathSampler(graph, weights, l).draw(as_stream(rng), budget)[0]


def _draw_tids(graph: DatabaseGraph, path: Sequence[int], uniform: UniformStream) -> tuple[int, ...]:
    dbs = graph.databases
    return tuple(int(uniform() * len(dbs[v])) for v in path)


def sample_transaction_sequence(graph: DatabaseGraph, path: Sequence[int], rng=None) -> SampleRecord:
    """One transaction per vertex, each uniform over that vertex's database."""
    path = tuple(path)
    tids = _draw_tids(graph, path, as_stream(rng))
    return SampleRecord(path=path, tids=tids, weight=graph.path_weight(path))


def _sample_block(graph, sampler: PathSampler, seed: int, block: int, count: int, budget: int):
    uniform = UniformStream(substream(seed, block))
    out = []
    rejections = 0
    for _ in range(count):
        path, rej = sampler.draw(uniform, budget)
        rejections += rej
        tids = _draw_tids(graph, path, uniform)
        out.append(SampleRecord(path=path, tids=tids, weight=graph.path_weight(path)))
    return out, rejections


def sample_batch(
    graph: DatabaseGraph,
    l: int,
    m: int,
    mode: str = WALK_COUNT,
    seed: int = 0,
    workers: int = 1,
    budget: int | None = None,
    weights: WeightTable | None = None,
) -> SampleBatch:
    """Draw ``m`` records with replacement.

    The result is a function of (graph, l, m, mode, seed) only.
    """
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if mode not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode {mode!r}")
    if budget is None:
        budget = DEFAULT_REJECTION_BUDGET
    if weights is None:
        weights = compute_weights(graph, l, mode)
    sampler = PathSampler(graph, weights, l)

    n_blocks = (m + BLOCK_SIZE - 1) // BLOCK_SIZE
    sizes = [min(BLOCK_SIZE, m - b * BLOCK_SIZE) for b in range(n_blocks)]
    if workers == 1 or n_blocks == 1:
        results = [_sample_block(graph, sampler, seed, b, sizes[b], budget) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sample_block, graph, sampler, seed, b, sizes[b], budget) for b in range(n_blocks)
            ]
            results = [f.result() for f in futures]
    records = [rec for block, _ in results for rec in block]
    rejections = sum(rej for _, rej in results)
    return SampleBatch(records=records, l=l, seed=seed, weight_mode=mode, graph=graph, rejections=rejections)
