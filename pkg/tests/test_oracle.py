import random

import pytest
from hypothesis import given, settings, strategies as st

from dynconn.core import BaseGraph, Counters, GeomObject, StateError
from dynconn.oracle import (
    oracle_components_geom,
    oracle_connected_geom,
    oracle_connected_subgraph,
    oracle_intersects,
    oracle_subgraph_labels,
    partition_of,
)

P5 = BaseGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])


def test_same_vertex():
    assert oracle_connected_subgraph(P5, {2}, 2, 2)


def test_path_missing_middle():
    assert not oracle_connected_subgraph(P5, {0, 1, 3, 4}, 0, 4)
    assert oracle_connected_subgraph(P5, set(range(5)), 0, 4)


def test_inactive_endpoint_rejected_and_calls_counted():
    c = Counters()
    oracle_connected_subgraph(P5, {0, 1}, 0, 1, counters=c)
    assert c.oracle_calls == 1
    with pytest.raises(StateError):
        oracle_connected_subgraph(P5, {0}, 0, 1)


def test_extra_edges_join():
    assert oracle_connected_subgraph(P5, {0, 4}, 0, 4, [(0, 4)])


def _union_find_partition(n, edges, active):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if u in active and v in active:
            parent[find(u)] = find(v)
    groups = {}
    for v in active:
        groups.setdefault(find(v), set()).add(v)
    return {frozenset(s) for s in groups.values()}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 15).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30),
    st.sets(st.integers(0, n - 1)),
)))
def test_labels_match_union_find(case):
    n, edges, active = case
    labels = oracle_subgraph_labels(BaseGraph(n, edges), active)
    assert partition_of(labels) == _union_find_partition(n, edges, active)


def test_intersection_predicate():
    a = GeomObject.box(0, (0, 1))
    assert oracle_intersects(a, GeomObject.box(1, (0, 1)))
    assert oracle_intersects(a, GeomObject.box(1, (1, 2)))
    assert not oracle_intersects(a, GeomObject.box(1, (2, 3)))
    sq = GeomObject.box(0, (0, 2), (0, 2))
    assert not oracle_intersects(sq, GeomObject.box(1, (1, 3), (3, 4)))
    assert oracle_intersects(sq, GeomObject.box(1, (2, 3), (2, 4)))


def test_component_basics():
    assert oracle_components_geom([]) == []
    apart = [GeomObject.box(i, (3 * i, 3 * i + 1)) for i in range(3)]
    assert oracle_components_geom(apart) == [frozenset({0}), frozenset({1}), frozenset({2})]
    chain = [GeomObject.box(i, (i, i + 1)) for i in range(6)]
    assert oracle_components_geom(chain) == [frozenset(range(6))]
    assert oracle_connected_geom(chain, 0, 5)


def _pairwise_partition(objs):
    parent = {o.id: o.id for o in objs}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for i, a in enumerate(objs):
        for b in objs[i + 1 :]:
            if a.intersects(b):
                parent[find(a.id)] = find(b.id)
    groups = {}
    for o in objs:
        groups.setdefault(find(o.id), set()).add(o.id)
    return {frozenset(s) for s in groups.values()}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_components_match_pairwise(d):
    rng = random.Random(d)
    for _ in range(30):
        objs = []
        for i in range(rng.randint(1, 60)):
            lo = [rng.randrange(50) for _ in range(d)]
            objs.append(GeomObject(i, tuple(lo), tuple(a + rng.randrange(8) for a in lo)))
        assert set(oracle_components_geom(objs)) == _pairwise_partition(objs)
