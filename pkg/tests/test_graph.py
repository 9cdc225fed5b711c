import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgsp.errors import GraphFormatError, GraphValidationError
from dgsp.graph import (
    PAPER_LITERAL,
    WALK_COUNT,
    compute_weights,
    distance,
    dump_graph,
    load_graph,
    neighborhood,
)

from conftest import brute_simple_paths, brute_walk_count, random_graph


def doc(vertices, edges):
    return json.dumps({"format": "dgsp-graph/1", "vertices": vertices, "edges": edges})


def test_load_fig1(fig1):
    assert fig1.n_vertices == 7
    assert fig1.n_edges == 6
    assert fig1.n_items == 4
    # dense ids in first-appearance order
    assert fig1.item_names == ("i1", "i2", "i3", "i4")
    v1 = fig1.vertex_index("v1")
    assert fig1.databases[v1] == ((0, 1, 2), (0, 3), (0, 2))
    assert fig1.max_db_size == 3


def test_load_accepts_bytes_text_and_files(fig1_bytes, tmp_path):
    p = tmp_path / "g.json"
    p.write_bytes(fig1_bytes)
    a = load_graph(fig1_bytes)
    b = load_graph(fig1_bytes.decode())
    with open(p, "rb") as fh:
        c = load_graph(fh)
    assert a.same_data(b) and a.same_data(c)


def test_self_loop_rejected():
    with pytest.raises(GraphValidationError, match="v1"):
        load_graph(doc([{"id": "v1", "db": [["a"]]}], [["v1", "v1"]]))


def test_empty_database_rejected():
    with pytest.raises(GraphValidationError, match="v2"):
        load_graph(doc([{"id": "v1", "db": [["a"]]}, {"id": "v2", "db": []}], []))


@pytest.mark.parametrize(
    "vertices, edges, match",
    [
        ([{"id": "a", "db": [["x"]]}, {"id": "b", "db": [["x"]]}], [["a", "b"], ["a", "b"]], "duplicate edge"),
        ([{"id": "a", "db": [["x"]]}], [["a", "zz"]], "zz"),
        ([{"id": "a", "db": [["x"]]}, {"id": "a", "db": [["y"]]}], [], "duplicate vertex"),
        ([{"id": "a", "db": [[]]}], [], "empty"),
        ([{"id": "a", "db": [["x", "x"]]}], [], "repeats"),
    ],
)
def test_validation_errors(vertices, edges, match):
    with pytest.raises(GraphValidationError, match=match):
        load_graph(doc(vertices, edges))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        json.dumps({"format": "other/1", "vertices": [], "edges": []}),
        json.dumps({"format": "dgsp-graph/1", "vertices": [{"id": "a"}], "edges": []}),
        json.dumps({"format": "dgsp-graph/1", "vertices": [{"id": "a", "db": ["x"]}], "edges": []}),
        json.dumps({"format": "dgsp-graph/1", "vertices": [{"id": "a", "db": [["x"]]}], "edges": [["a"]]}),
    ],
)
def test_parse_errors(text):
    with pytest.raises(GraphFormatError):
        load_graph(text)


def test_duplicate_itemsets_kept_distinct():
    g = load_graph(doc([{"id": "a", "db": [["x"], ["x"]]}], []))
    assert len(g.databases[0]) == 2


def test_distance_degrees_fig1(fig1):
    w = compute_weights(fig1, 3, PAPER_LITERAL)
    v1 = fig1.vertex_index("v1")
    assert (w(v1, 1), w(v1, 2), w(v1, 3)) == (2, 3, 1)


def test_walk_count_fig1(fig1):
    w = compute_weights(fig1, 3, WALK_COUNT)
    assert w(fig1.vertex_index("v1"), 3) == 1


@pytest.mark.parametrize("mode", [WALK_COUNT, PAPER_LITERAL])
def test_depth_zero_is_one(fig1, mode):
    w = compute_weights(fig1, 2, mode)
    assert all(w(v, 0) == 1 for v in range(fig1.n_vertices))


def test_weights_reject_bad_input(fig1):
    with pytest.raises(ValueError):
        compute_weights(fig1, 0)
    with pytest.raises(ValueError):
        compute_weights(fig1, 2, "nope")


def test_distance_fig1(fig1):
    v = fig1.vertex_index
    assert distance(fig1, v("v1"), v("v7")) == 3
    assert distance(fig1, v("v1"), v("v1")) == 0
    assert distance(fig1, v("v7"), v("v1")) is None


def test_neighborhoods_fig1(fig1):
    v = fig1.vertex_index
    names = lambda s: {fig1.vertex_ids[i] for i in s}
    assert names(neighborhood(fig1, v("v1"), 1)) == {"v2", "v3"}
    assert names(neighborhood(fig1, v("v1"), 2)) == {"v2", "v3", "v4", "v5", "v6"}
    assert names(neighborhood(fig1, v("v1"), 3)) == {"v2", "v3", "v4", "v5", "v6", "v7"}


def test_literal_equals_walk_count_on_fig1(fig1):
    assert compute_weights(fig1, 4, WALK_COUNT).weights == compute_weights(fig1, 4, PAPER_LITERAL).weights


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 7), q=st.integers(1, 4))
def test_walk_counts_match_brute_force(seed, n, q):
    g = random_graph(seed, n_vertices=n, p_edge=0.4)
    w = compute_weights(g, q, WALK_COUNT)
    for v in range(n):
        assert w(v, q) == brute_walk_count(g, v, q)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 8))
def test_literal_equals_walk_count_on_trees(seed, n):
    import random

    from dgsp.graph import build_graph

    rnd = random.Random(seed)
    vertices = [(f"v{i}", [["a"]]) for i in range(n)]
    # out-tree: every vertex but the root has one parent with a smaller index
    edges = [(f"v{rnd.randrange(i)}", f"v{i}") for i in range(1, n)]
    g = build_graph(vertices, edges)
    l = 4
    assert compute_weights(g, l, WALK_COUNT).weights == compute_weights(g, l, PAPER_LITERAL).weights


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), q=st.integers(1, 4))
def test_zero_weight_means_no_simple_path(seed, q):
    g = random_graph(seed, n_vertices=6, p_edge=0.3)
    w = compute_weights(g, q, WALK_COUNT)
    starts = {p[0] for p in brute_simple_paths(g, q)}
    for v in range(g.n_vertices):
        if w(v, q) == 0:
            assert v not in starts


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_round_trip(seed):
    g = random_graph(seed, n_vertices=5)
    text = dump_graph(g)
    again = load_graph(text)
    assert again.same_data(g)
    assert dump_graph(again) == text


def test_round_trip_fig1(fig1):
    assert load_graph(dump_graph(fig1)).same_data(fig1)
