"""Synthetic database graphs.

Structure: a random DAG (edges only from lower to higher vertex index) or a
random digraph, with exactly the requested number of edges. Content: each
vertex gets a fresh transaction database whose size follows either a
constant rule or a rule linear in the vertex's total degree. Transaction
sizes are 1 + Poisson(avg - 1), capped at the universe size, and items are
drawn without replacement from a Zipf(1) law over the universe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DatabaseGraph, build_graph

RANDOM_DAG = "random-dag"
RANDOM_DIGRAPH = "random-digraph"


@dataclass(frozen=True)
class DbSizeRule:
    kind: str
    base: int
    slope: int = 0

    @classmethod
    def parse(cls, text: str) -> DbSizeRule:
        """``constant:N`` or ``degree-linear:BASE:SLOPE``."""
        parts = text.split(":")
        try:
            if parts[0] == "constant" and len(parts) == 2:
                return cls("constant", int(parts[1]))
            if parts[0] == "degree-linear" and len(parts) == 3:
                return cls("degree-linear", int(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise ValueError(f"bad db size rule {text!r}; use constant:N or degree-linear:BASE:SLOPE")

    def size(self, degree: int) -> int:
        if self.kind == "constant":
            return self.base
        return self.base + self.slope * degree

    def __str__(self) -> str:
        if self.kind == "constant":
            return f"constant:{self.base}"
        return f"degree-linear:{self.base}:{self.slope}"


@dataclass(frozen=True)
class GenConfig:
    vertex_count: int
    edge_count: int
    item_universe_size: int
    avg_items_per_transaction: float
    db_size_rule: DbSizeRule
    graph_shape: str = RANDOM_DAG
    seed: int = 0

    def validate(self) -> None:
        n = self.vertex_count
        if n < 1:
            raise ValueError("vertex_count must be >= 1")
        if self.edge_count < 0:
            raise ValueError("edge_count must be >= 0")
        if self.graph_shape == RANDOM_DAG:
            max_edges = n * (n - 1) // 2
        elif self.graph_shape == RANDOM_DIGRAPH:
            max_edges = n * (n - 1)
        else:
            raise ValueError(f"unknown graph shape {self.graph_shape!r}")
        if self.edge_count > max_edges:
            raise ValueError(f"{self.edge_count} edges do not fit a {self.graph_shape} on {n} vertices")
        if self.item_universe_size < 1:
            raise ValueError("item_universe_size must be >= 1")
        if not 1 <= self.avg_items_per_transaction <= self.item_universe_size:
            raise ValueError("avg_items_per_transaction must lie in [1, item_universe_size]")
        if self.db_size_rule.base < 0 or self.db_size_rule.slope < 0:
            raise ValueError("db size rule parameters must be non-negative")
        if self.db_size_rule.kind == "constant" and self.db_size_rule.base < 1:
            raise ValueError("constant db size must be >= 1")
        if self.db_size_rule.kind == "degree-linear" and self.db_size_rule.base < 1:
            raise ValueError("degree-linear base must be >= 1 so isolated vertices keep a transaction")


def _edges(cfg: GenConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    n = cfg.vertex_count
    if cfg.graph_shape == RANDOM_DAG:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    else:
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    if cfg.edge_count == 0:
        return []
    picked = rng.choice(len(pairs), size=cfg.edge_count, replace=False)
    return sorted(pairs[i] for i in picked.tolist())


def generate(cfg: GenConfig) -> DatabaseGraph:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    edges = _edges(cfg, rng)
    degree = [0] * cfg.vertex_count
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1

    universe = cfg.item_universe_size
    ranks = np.arange(1, universe + 1, dtype=float)
    zipf = (1.0 / ranks) / (1.0 / ranks).sum()
    names = [f"i{r}" for r in range(1, universe + 1)]

    vertices = []
    for v in range(cfg.vertex_count):
        db = []
        for _ in range(cfg.db_size_rule.size(degree[v])):
            size = min(universe, 1 + int(rng.poisson(cfg.avg_items_per_transaction - 1)))
            picked = rng.choice(universe, size=size, replace=False, p=zipf)
            db.append([names[i] for i in sorted(picked.tolist())])
        vertices.append((f"v{v + 1}", db))
    edge_names = [(f"v{u + 1}", f"v{v + 1}") for u, v in edges]
    return build_graph(vertices, edge_names)
