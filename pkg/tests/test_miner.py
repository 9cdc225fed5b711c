import statistics
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgsp.baseline import count_paths, enumerate_paths, exact_frequency, induced_size
from dgsp.graph import build_graph
from dgsp.miner import EstimatorState, RecordTable, estimate_frequency, mine_topk, topk_patterns
from dgsp.patterns import (
    WEIGHTED_SUPPORT,
    canonical_key,
    contains,
    format_pattern,
    is_subset,
    make_pattern,
    parse_pattern_text,
)
from dgsp.sampler import SampleBatch, SampleRecord, sample_batch

from conftest import FIGURE3, parse_names, random_graph, to_ids, to_names


def test_contains_figure_rows(fig1):
    row1 = to_ids(fig1, "(i1,i2,i3)(i1,i3)(i1,i3)(i1,i4)")
    assert contains(row1, to_ids(fig1, "(i1)(i3)(i3)(i1,i4)"))
    row5 = to_ids(fig1, "(i1,i4)(i1,i3)(i1,i3)(i1,i4)")
    assert not contains(row5, to_ids(fig1, "(i3)(i3)(i3)(i1)"))
    assert contains(row5, row5)


def test_contains_length_mismatch():
    with pytest.raises(ValueError):
        contains(((1,), (2,)), ((1,),))


@settings(max_examples=200)
@given(st.lists(st.integers(0, 9), unique=True), st.lists(st.integers(0, 9), unique=True))
def test_is_subset_matches_sets(a, b):
    assert is_subset(sorted(a), sorted(b)) == (set(a) <= set(b))


def test_make_pattern_rejects_empty_itemset():
    with pytest.raises(ValueError):
        make_pattern([[1], []])
    assert make_pattern([[3, 1], [2]]) == ((1, 3), (2,))


def test_pattern_text_round_trip(fig1):
    p = to_ids(fig1, "(i1,i4)(i3)")
    text = format_pattern(p, fig1.item_names)
    assert text == "(i1,i4)(i3)"
    assert parse_pattern_text(text) == (frozenset({"i1", "i4"}), frozenset({"i3"}))
    with pytest.raises(ValueError):
        parse_pattern_text("(i1)x(i2)")
    with pytest.raises(ValueError):
        parse_pattern_text("(i1)()")


def test_estimator_ratio_one_when_always_contained():
    rows = [((1, 2), (3,)), ((1,), (3, 4))]
    s = ((1,), (3,))
    state = EstimatorState.from_records(rows, [5, 7], [s])
    assert estimate_frequency(state, s) == 1.0


def test_estimator_single_path_forms_coincide(fig1):
    batch = sample_batch(fig1, 3, 500, seed=3)
    s = to_ids(fig1, "(i3)(i3)(i3)(i1)")
    state = EstimatorState.from_batch(batch, [s])
    unbiased = estimate_frequency(state, s, p_l_count=1, total_path_weight=12)
    assert unbiased == pytest.approx(estimate_frequency(state, s), rel=1e-12)


def test_estimator_argument_checks():
    state = EstimatorState.from_records([((1,),)], [2], [((1,),)])
    with pytest.raises(ValueError):
        estimate_frequency(state, ((1,),), p_l_count=3)
    with pytest.raises(KeyError):
        estimate_frequency(state, ((9,),))
    with pytest.raises(ValueError):
        estimate_frequency(EstimatorState(), ((1,),))


def test_estimator_state_merges():
    rows = [((1,), (2,)), ((1, 3), (2,)), ((3,), (4,))]
    weights = [2, 3, 4]
    s = ((1,), (2,))
    whole = EstimatorState.from_records(rows, weights, [s])
    parts = EstimatorState.from_records(rows[:1], weights[:1], [s]) + EstimatorState.from_records(
        rows[1:], weights[1:], [s]
    )
    assert parts == whole
    assert whole.accumulators[s] == 5 and whole.total_weight == 9


def test_unbiased_on_fig1_single_path(fig1):
    s = to_ids(fig1, "(i3)(i3)(i3)(i1)")
    estimates = []
    for seed in range(60):
        batch = sample_batch(fig1, 3, 200, seed=seed)
        state = EstimatorState.from_batch(batch, [s])
        estimates.append(estimate_frequency(state, s, p_l_count=1, total_path_weight=12))
    mean = statistics.mean(estimates)
    se = statistics.stdev(estimates) / len(estimates) ** 0.5
    assert abs(mean - 8 / 12) < 3 * se


def test_mine_fig1_top9(fig1):
    ranked = mine_topk(sample_batch(fig1, 3, 2000, seed=1), 9)
    assert ranked.score_kind == WEIGHTED_SUPPORT
    assert {to_names(fig1, s) for s in ranked.patterns} == {parse_names(t) for t in FIGURE3}
    ratio = ranked.entries[0].support / ranked.entries[-1].support
    assert ratio == pytest.approx(12 / 8, rel=0.10)
    assert all(0 <= e.freq <= 1 for e in ranked)


def test_identical_records_full_pattern(fig1):
    rec = SampleRecord(path=(0, 1, 3, 6), tids=(0, 0, 0, 0), weight=12)
    batch = SampleBatch(records=[rec] * 10, l=3, seed=None, weight_mode="walk-count", graph=fig1)
    ranked = mine_topk(batch, 1)
    full = fig1.itemsets(rec.path, rec.tids)
    # ties at support 120 are broken canonically, so the top entry is the
    # smallest pattern; the full pattern must tie with it
    assert ranked.entries[0].support == 120
    table = RecordTable(batch.itemset_rows(), batch.weights())
    assert table.pattern_support(full) == 120


def test_identical_records_single_maximal_pattern():
    g = build_graph([("a", [["x"]]), ("b", [["y"]])], [("a", "b")])
    rec = SampleRecord(path=(0, 1), tids=(0, 0), weight=1)
    batch = SampleBatch(records=[rec] * 4, l=1, seed=None, weight_mode="walk-count", graph=g)
    ranked = mine_topk(batch, 1)
    assert ranked.patterns == [((0,), (1,))]
    assert ranked.entries[0].support == 4


def test_mine_returns_fewer_when_few():
    g = build_graph([("a", [["x"]]), ("b", [["y"]])], [("a", "b")])
    ranked = mine_topk(sample_batch(g, 1, 10), 5)
    assert len(ranked) == 1


def test_mine_rejects_bad_k(fig1):
    with pytest.raises(ValueError):
        mine_topk(sample_batch(fig1, 3, 10), 0)


def test_max_width_caps_itemsets(fig1):
    ranked = mine_topk(sample_batch(fig1, 3, 500, seed=2), 50, max_width=1)
    assert all(len(x) == 1 for s in ranked.patterns for x in s)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 40))
def test_pruning_is_sound(seed, k):
    g = random_graph(seed, n_vertices=5, p_edge=0.5, n_items=4)
    if count_paths(g, 1) == 0:
        return
    batch = sample_batch(g, 1, 300, seed=seed)
    pruned = mine_topk(batch, k)
    full = mine_topk(batch, k, prune=False)
    assert [(e.pattern, e.support) for e in pruned] == [(e.pattern, e.support) for e in full]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_ranking_invariant_under_denominator(seed):
    g = random_graph(seed, n_vertices=5, p_edge=0.5, n_items=4)
    l = 1
    if count_paths(g, l) == 0:
        return
    batch = sample_batch(g, l, 400, seed=seed)
    ranked = mine_topk(batch, 30)
    state = EstimatorState.from_batch(batch, ranked.patterns)
    n_paths = count_paths(g, l)
    total = induced_size(g, l)
    eq4 = [estimate_frequency(state, s, n_paths, total) for s in ranked.patterns]
    resorted = sorted(ranked.patterns, key=lambda s: (-eq4[ranked.patterns.index(s)], canonical_key(s)))
    assert resorted == ranked.patterns
    assert [state.accumulators[s] for s in ranked.patterns] == [e.support for e in ranked]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), data=st.data())
def test_weighted_support_anti_monotone(seed, data):
    g = random_graph(seed, n_vertices=5, p_edge=0.5, n_items=4)
    if count_paths(g, 1) == 0:
        return
    batch = sample_batch(g, 1, 200, seed=seed)
    table = RecordTable(batch.itemset_rows(), batch.weights())
    itemset = st.lists(st.integers(0, g.n_items - 1), min_size=1, max_size=2, unique=True)
    sub = tuple(tuple(sorted(x)) for x in data.draw(st.lists(itemset, min_size=2, max_size=2)))
    pos = data.draw(st.integers(0, 1))
    extra = data.draw(st.integers(0, g.n_items - 1))
    sup = list(sub)
    sup[pos] = tuple(sorted(set(sup[pos]) | {extra}))
    assert table.pattern_support(tuple(sup)) <= table.pattern_support(sub)
    assert 0 <= table.pattern_support(sub) <= table.total_weight


def test_many_weight_classes_use_dense_support():
    rows = [((i % 3,), (1,)) for i in range(200)]
    weights = list(range(1, 201))
    table = RecordTable(rows, weights)
    assert table._dense is not None
    assert table.pattern_support(((0,), (1,))) == sum(w for i, w in enumerate(weights) if i % 3 == 0)
    # residue classes mod 3 carry weight sums 6700, 6767 and 6633
    assert topk_patterns(table, 5) == [(((1,), (1,)), 6767), (((0,), (1,)), 6700), (((2,), (1,)), 6633)]


def test_exact_frequency_vs_estimate_converges(fig1):
    s = to_ids(fig1, "(i1)(i3)")
    batch = sample_batch(fig1, 1, 20_000, seed=8)
    state = EstimatorState.from_batch(batch, [s])
    assert estimate_frequency(state, s) == pytest.approx(float(exact_frequency(fig1, 1, s)), abs=0.02)
