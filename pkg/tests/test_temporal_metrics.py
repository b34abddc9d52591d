import random

import pytest

import oracles
from ls_ledger.fixtures import random_links, random_stream
from ls_ledger.stream_core import Link, build_stream, induced_graph
from ls_ledger.temporal_metrics import (
    aggregated_neighborhood,
    closure_distribution,
    neighborhood,
    neighborhood_overlap,
    three_closure,
    two_closure,
)

# frozen brute-force tables for the 12-link example (see tests/oracles.py)
SAMPLE_K2 = {
    (0, "c", "b"): None, (0, "a", "d"): None, (1, "d", "a"): 1,
    (2, "b", "a"): None, (2, "c", "d"): None, (4, "c", "b"): None,
    (4, "b", "d"): None, (5, "a", "b"): 3, (5, "b", "c"): 1,
    (5, "d", "c"): 3, (6, "a", "b"): 4, (6, "d", "a"): 6,
}
SAMPLE_K3 = {
    (0, "c", "b"): None, (0, "a", "d"): None, (1, "d", "a"): None,
    (2, "b", "a"): None, (2, "c", "d"): None, (4, "c", "b"): None,
    (4, "b", "d"): None, (5, "a", "b"): 4, (5, "b", "c"): None,
    (5, "d", "c"): 1, (6, "a", "b"): 5, (6, "d", "a"): 2,
}


def test_neighborhood_example(sample_stream):
    s, table = sample_stream
    cluster = neighborhood(s, table.id_of("a"))
    labeled = {(t, table.key_of(n)) for t, n in cluster.elements}
    assert labeled == {(0, "d"), (1, "d"), (2, "b"), (5, "b"), (6, "b"), (6, "d")}


def test_neighborhood_isolated_and_single():
    s = build_stream([Link(3, 0, 1)], interval=(0, 5))
    assert neighborhood(s, 0).elements == {(3, 1)}
    iso = build_stream([Link(3, 0, 1)])
    with pytest.raises(KeyError):
        neighborhood(iso, 9)


def test_aggregated_neighborhood_example(sample_stream):
    s, table = sample_stream
    agg = aggregated_neighborhood(s, table.id_of("a"))
    assert {table.key_of(n) for n in agg} == {"b", "d"}


def test_aggregated_equals_induced_undirected_neighborhood():
    rng = random.Random(21)
    for trial in range(25):
        s = build_stream(random_links(rng, rng.randint(2, 9), rng.randint(1, 80)))
        adj = induced_graph(s).undirected_adjacency()
        for node in s.nodes:
            assert aggregated_neighborhood(s, node) == adj[node]


def test_neighborhood_size_with_distinct_elements():
    links = [Link(1, 0, 1), Link(2, 0, 2), Link(3, 3, 0)]
    s = build_stream(links)
    assert len(neighborhood(s, 0).elements) == 3


def test_overlap_examples():
    s1 = build_stream([Link(0, 0, 1), Link(1, 0, 2)])  # N(0) = {1, 2}
    s2 = build_stream([Link(5, 1, 0)])  # N(0) = {1}
    res = neighborhood_overlap(0, s1, s2)
    assert res.inclusion == pytest.approx(1.0)
    assert res.jaccard == pytest.approx(0.5)

    disjoint = build_stream([Link(3, 0, 3)])
    res = neighborhood_overlap(0, s1, disjoint)
    assert res.inclusion == 0.0 and res.jaccard == 0.0

    res = neighborhood_overlap(0, s1, s1)
    assert res.inclusion == 1.0 and res.jaccard == 1.0


def test_overlap_empty_neighborhood_markers():
    s1 = build_stream([Link(0, 0, 1)])
    s2 = build_stream([Link(0, 2, 3)])  # node 0 absent
    res = neighborhood_overlap(0, s1, s2)
    assert res.inclusion is None  # empty transaction-side neighborhood
    assert res.jaccard == 0.0
    with pytest.raises(KeyError):
        neighborhood_overlap(9, s1, s2)


def _link(s, table, t, u, v):
    return Link(t, table.id_of(u), table.id_of(v))


def test_two_closure_example(sample_stream):
    s, table = sample_stream
    assert two_closure(s, _link(s, table, 6, "a", "b")).lookback == 4
    assert two_closure(s, _link(s, table, 2, "b", "a")).lookback is None


def test_two_closure_simultaneous_reverse():
    s = build_stream([Link(5, 0, 1), Link(5, 1, 0)])
    assert two_closure(s, Link(5, 0, 1)).lookback == 0
    assert two_closure(s, Link(5, 1, 0)).lookback == 0


def test_two_closure_unknown_link(sample_stream):
    s, table = sample_stream
    with pytest.raises(KeyError):
        two_closure(s, _link(s, table, 3, "a", "b"))


def test_three_closure_example(sample_stream):
    s, table = sample_stream
    assert three_closure(s, _link(s, table, 6, "a", "b")).lookback == 5


def test_three_closure_single_link():
    s = build_stream([Link(0, 0, 1)])
    assert three_closure(s, Link(0, 0, 1)).lookback is None


def test_three_closure_requires_strictly_earlier_supports():
    # a simultaneous cycle does not close: supports must precede the link
    s = build_stream([Link(0, 1, 2), Link(0, 2, 0), Link(0, 0, 1)])
    assert three_closure(s, Link(0, 0, 1)).lookback is None
    # one second earlier, the same supports close it at look-back 1
    s2 = build_stream([Link(0, 1, 2), Link(0, 2, 0), Link(1, 0, 1)])
    assert three_closure(s2, Link(1, 0, 1)).lookback == 1


def test_closure_distribution_full_tables(sample_stream):
    s, table = sample_stream
    for k, expected in ((2, SAMPLE_K2), (3, SAMPLE_K3)):
        dist = closure_distribution(s, k=k)
        got = {
            (r.link.t, table.key_of(r.link.source), table.key_of(r.link.target)): r.lookback
            for r in dist.results
        }
        assert got == expected
        assert dist.infinite_count == sum(1 for v in expected.values() if v is None)
        assert sum(dist.finite.values()) + dist.infinite_count == 12


def test_closure_distribution_no_reverse_links():
    s = build_stream([Link(t, 0, 1) for t in range(5)])
    dist = closure_distribution(s, k=2)
    assert dist.infinite_count == 5 and not dist.finite


def test_closure_distribution_rejects_bad_k(sample_stream):
    s, _ = sample_stream
    with pytest.raises(ValueError):
        closure_distribution(s, k=4)


def test_closures_match_oracle_random():
    rng = random.Random(31)
    for trial in range(40):
        s = random_stream(seed=1000 + trial, max_nodes=8, max_links=60)
        events = [(ln.t, ln.source, ln.target) for ln in s.links]
        d2 = closure_distribution(s, k=2)
        d3 = closure_distribution(s, k=3)
        for i in range(len(events)):
            assert d2.results[i].lookback == oracles.two_closure(events, i)
            assert d3.results[i].lookback == oracles.three_closure(events, i)


def test_closure_time_shift_equivariance():
    rng = random.Random(32)
    for trial in range(10):
        s = random_stream(seed=2000 + trial, max_nodes=6, max_links=40)
        shift = rng.randint(1, 500)
        shifted = build_stream(
            [Link(ln.t + shift, ln.source, ln.target) for ln in s.links]
        )
        for k in (2, 3):
            a = [r.lookback for r in closure_distribution(s, k=k).results]
            b = [r.lookback for r in closure_distribution(shifted, k=k).results]
            assert a == b


def test_three_closure_monotone_under_added_supports():
    rng = random.Random(33)
    for trial in range(10):
        s = random_stream(seed=3000 + trial, max_nodes=6, max_links=30)
        query = s.links[-1]
        if query.t == 0:
            continue  # no strictly earlier instant exists
        before = three_closure(s, query).lookback
        # add an earlier support pair through a fresh node
        w = max(s.nodes) + 1
        extra = [
            Link(query.t - 1, query.target, w),
            Link(query.t - 1, w, query.source),
        ]
        enlarged = build_stream(list(s.links) + extra)
        after = three_closure(enlarged, query).lookback
        assert after is not None
        if before is not None:
            assert after <= before
