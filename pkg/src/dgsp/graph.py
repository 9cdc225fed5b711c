"""Database graphs: directed graphs whose vertices carry transaction databases.

Vertices and items are opaque strings in the file format and dense integers
in memory. A transaction is a strictly increasing tuple of item ids; its tid
is its position inside the vertex database.
"""

from __future__ import annotations

import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .errors import GraphFormatError, GraphValidationError

FORMAT_TAG = "dgsp-graph/1"

WALK_COUNT = "walk-count"
PAPER_LITERAL = "paper-literal"
WEIGHT_MODES = (WALK_COUNT, PAPER_LITERAL)

Transaction = tuple[int, ...]
Database = tuple[Transaction, ...]


@dataclass(frozen=True, eq=False)
class DatabaseGraph:
    """Immutable database graph.

    ``vertex_ids[v]`` is the external name of vertex ``v``, ``databases[v]``
    its transactions and ``out[v]`` its sorted out-neighbours. ``item_names``
    maps internal item ids back to external names.
    """

    vertex_ids: tuple[str, ...]
    databases: tuple[Database, ...]
    out: tuple[tuple[int, ...], ...]
    item_names: tuple[str, ...]
    _vertex_index: dict[str, int] = field(init=False, repr=False)
    _item_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_vertex_index", {v: i for i, v in enumerate(self.vertex_ids)})
        object.__setattr__(self, "_item_index", {x: i for i, x in enumerate(self.item_names)})

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_names)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.out)

    @property
    def n_transactions(self) -> int:
        return sum(len(db) for db in self.databases)

    @property
    def max_db_size(self) -> int:
        """Largest database cardinality over all vertices."""
        return max((len(db) for db in self.databases), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.out) for v in nbrs]

    def vertex_index(self, name: str) -> int:
        try:
            return self._vertex_index[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def item_index(self, name: str) -> int | None:
        """Internal id of an item name, or None when the item never occurs."""
        return self._item_index.get(name)

    def degree(self, v: int) -> int:
        """Total (in + out) degree of vertex ``v``."""
        indeg = sum(1 for nbrs in self.out if v in nbrs)
        return indeg + len(self.out[v])

    def path_weight(self, path: Sequence[int]) -> int:
        """Number of transaction sequences a path supports."""
        return math.prod(len(self.databases[v]) for v in path)

    def is_path(self, path: Sequence[int]) -> bool:
        if len(set(path)) != len(path):
            return False
        return all(b in self.out[a] for a, b in zip(path, path[1:]))

    def itemsets(self, path: Sequence[int], tids: Sequence[int]) -> tuple[Transaction, ...]:
        return tuple(self.databases[v][t] for v, t in zip(path, tids))

    def same_data(self, other: DatabaseGraph) -> bool:
        return (
            self.vertex_ids == other.vertex_ids
            and self.databases == other.databases
            and self.out == other.out
            and self.item_names == other.item_names
        )


def build_graph(
    vertices: Iterable[tuple[str, Sequence[Sequence[str]]]],
    edges: Iterable[Sequence[str]],
) -> DatabaseGraph:
    """Validate raw vertex/edge data and intern vertex and item names.

    Item ids are assigned in first-appearance order (vertex order, then
    transaction order, then item order inside a transaction).
    """
    vertex_ids: list[str] = []
    seen_vertices: set[str] = set()
    item_index: dict[str, int] = {}
    databases: list[Database] = []
    for vid, db in vertices:
        if not isinstance(vid, str):
            raise GraphFormatError(f"vertex id must be a string, got {vid!r}")
        if vid in seen_vertices:
            raise GraphValidationError(f"duplicate vertex {vid!r}")
        seen_vertices.add(vid)
        if len(db) == 0:
            raise GraphValidationError(f"vertex {vid!r} has an empty transaction database")
        txs = []
        for tid, itemset in enumerate(db):
            if isinstance(itemset, str) or not isinstance(itemset, Sequence):
                raise GraphFormatError(f"vertex {vid!r} transaction {tid}: itemset must be an array")
            if len(itemset) == 0:
                raise GraphValidationError(f"vertex {vid!r} transaction {tid} is empty")
            if len(set(itemset)) != len(itemset):
                raise GraphValidationError(f"vertex {vid!r} transaction {tid} repeats an item")
            ids = []
            for name in itemset:
                if not isinstance(name, str):
                    raise GraphFormatError(f"vertex {vid!r} transaction {tid}: item {name!r} is not a string")
                ids.append(item_index.setdefault(name, len(item_index)))
            txs.append(tuple(sorted(ids)))
        vertex_ids.append(vid)
        databases.append(tuple(txs))

    index = {v: i for i, v in enumerate(vertex_ids)}
    out: list[set[int]] = [set() for _ in vertex_ids]
    for edge in edges:
        if isinstance(edge, str) or not isinstance(edge, Sequence) or len(edge) != 2:
            raise GraphFormatError(f"edge must be a [source, target] pair, got {edge!r}")
        src, dst = edge
        for end in (src, dst):
            if end not in index:
                raise GraphValidationError(f"edge {src!r}->{dst!r} references unknown vertex {end!r}")
        if src == dst:
            raise GraphValidationError(f"self-loop on vertex {src!r}")
        u, v = index[src], index[dst]
        if v in out[u]:
            raise GraphValidationError(f"duplicate edge {src!r}->{dst!r}")
        out[u].add(v)

    item_names = [""] * len(item_index)
    for name, i in item_index.items():
        item_names[i] = name
    return DatabaseGraph(
        vertex_ids=tuple(vertex_ids),
        databases=tuple(databases),
        out=tuple(tuple(sorted(s)) for s in out),
        item_names=tuple(item_names),
    )


def load_graph(source: bytes | str | IO) -> DatabaseGraph:
    """Parse a ``dgsp-graph/1`` JSON document.

    ``source`` may be raw bytes, a text string or a readable file object.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"graph file is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object")
    if doc.get("format") != FORMAT_TAG:
        raise GraphFormatError(f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}")
    raw_vertices = doc.get("vertices")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise GraphFormatError("'vertices' and 'edges' must be arrays")
    vertices = []
    for entry in raw_vertices:
        if not isinstance(entry, dict) or "id" not in entry or "db" not in entry:
            raise GraphFormatError(f"vertex entry needs 'id' and 'db': {entry!r}")
        if not isinstance(entry["db"], list):
            raise GraphFormatError(f"vertex {entry['id']!r}: 'db' must be an array")
        vertices.append((entry["id"], entry["db"]))
    return build_graph(vertices, raw_edges)


def read_graph(path) -> DatabaseGraph:
    with open(path, "rb") as fh:
        return load_graph(fh)


def graph_to_dict(graph: DatabaseGraph) -> dict:
    names = graph.item_names
    return {
        "format": FORMAT_TAG,
        "vertices": [
            {"id": vid, "db": [[names[i] for i in tx] for tx in db]}
            for vid, db in zip(graph.vertex_ids, graph.databases)
        ],
        "edges": [[graph.vertex_ids[u], graph.vertex_ids[v]] for u, v in graph.edges()],
    }


def dump_graph(graph: DatabaseGraph, fh: IO[str] | None = None) -> str:
    """Serialize to the canonical file format. Output is byte-stable."""
    text = json.dumps(graph_to_dict(graph), ensure_ascii=False, separators=(",", ":")) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def write_graph(graph: DatabaseGraph, path) -> None:
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        dump_graph(graph, fh)


@dataclass(frozen=True)
class WeightTable:
    """Continuation weights ``weights[v][q]`` for depths ``q = 0..l``.

    In walk-count mode ``weights[v][q]`` counts directed walks of length q
    starting at v. In paper-literal mode it counts vertices at shortest-path
    distance exactly q from v.
    """

    mode: str
    l: int
    weights: tuple[tuple[int, ...], ...]

    def __call__(self, v: int, q: int) -> int:
        return self.weights[v][q]

    def column(self, q: int) -> list[int]:
        return [row[q] for row in self.weights]


def compute_weights(graph: DatabaseGraph, l: int, mode: str = WALK_COUNT) -> WeightTable:
    if l < 1:
        raise ValueError(f"path length must be >= 1, got {l}")
    if mode == WALK_COUNT:
        prev = [1] * graph.n_vertices
        cols = [prev]
        for _ in range(l):
            prev = [sum(prev[u] for u in nbrs) for nbrs in graph.out]
            cols.append(prev)
        rows = tuple(tuple(col[v] for col in cols) for v in range(graph.n_vertices))
    elif mode == PAPER_LITERAL:
        rows = []
        for v in range(graph.n_vertices):
            row = [1] + [0] * l
            for _, d in _bfs(graph, v, limit=l):
                if d > 0:
                    row[d] += 1
            rows.append(tuple(row))
        rows = tuple(rows)
    else:
        raise ValueError(f"unknown weight mode {mode!r}; expected one of {WEIGHT_MODES}")
    return WeightTable(mode=mode, l=l, weights=rows)


def _bfs(graph: DatabaseGraph, source: int, limit: int | None = None):
    """Yield ``(vertex, distance)`` in breadth-first order."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        yield u, dist[u]
        if limit is not None and dist[u] >= limit:
            continue
        for w in graph.out[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)


def distance(graph: DatabaseGraph, u: int, v: int) -> int | None:
    """Shortest directed path length from u to v; None when unreachable."""
    for w, d in _bfs(graph, u):
        if w == v:
            return d
    return None


def neighborhood(graph: DatabaseGraph, v: int, l: int) -> set[int]:
    """Vertices within distance ``l`` of ``v``, excluding ``v`` itself."""
    return {w for w, d in _bfs(graph, v, limit=l) if d > 0}
