import random

import pytest
from hypothesis import given, settings, strategies as st

from dynconn.dyn_edge_conn import DynForest


def forest(n):
    f = DynForest()
    for _ in range(n):
        f.add_vertex()
    return f


def test_single_vertex():
    f = DynForest()
    v = f.add_vertex(weight=5)
    h = f.component_of(v)
    assert (h.size, h.weight) == (1, 5)


def test_two_vertices_unlinked():
    f = forest(2)
    assert not f.connected(0, 1)


def test_parallel_edges():
    f = forest(2)
    e1 = f.link(0, 1)
    f.link(0, 1)
    rep = f.cut(e1)
    assert not rep.split
    assert f.connected(0, 1)


def test_self_loop_is_harmless():
    f = forest(2)
    e = f.link(0, 0)
    assert f.component_size(0) == 1
    assert not f.cut(e).split


def test_path_cut_reports_smaller_side():
    f = forest(3)
    f.link(0, 1)
    e = f.link(1, 2)
    rep = f.cut(e)
    assert rep.split and rep.smaller == (2,)
    assert rep.larger_size == 2


def test_triangle_cut_does_not_split():
    for k in range(3):
        f = forest(3)
        es = [f.link(0, 1), f.link(1, 2), f.link(2, 0)]
        assert not f.cut(es[k]).split
        assert f.component_size(0) == 3


def test_tie_goes_to_side_without_min_id():
    f = forest(4)
    f.link(0, 1)
    e = f.link(1, 2)
    f.link(2, 3)
    rep = f.cut(e)
    assert rep.smaller == (2, 3)


def test_component_iteration_and_conservation():
    f = forest(4)
    f.link(0, 1)
    e = f.link(1, 2)
    f.link(2, 3)
    assert sorted(f.iter_component(f.component_of(3))) == [0, 1, 2, 3]
    f.cut(e)
    assert f.component_of(0).size + f.component_of(3).size == 4


def test_stale_edge_rejected():
    f = forest(2)
    e = f.link(0, 1)
    f.cut(e)
    with pytest.raises(KeyError):
        f.cut(e)


def _bfs_connected(n, edges, u, v):
    adj = {i: [] for i in range(n)}
    for a, b in edges.values():
        adj[a].append(b)
        adj[b].append(a)
    seen, todo = {u}, [u]
    while todo:
        x = todo.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return v in seen


@pytest.mark.parametrize("seed", range(3))
def test_random_link_cut_against_bfs(seed):
    rng = random.Random(seed)
    n = 30
    f = forest(n)
    live = {}
    for _ in range(1000):
        r = rng.random()
        if r < 0.45 or not live:
            u, v = rng.randrange(n), rng.randrange(n)
            live[f.link(u, v)] = (u, v)
        elif r < 0.8:
            e = rng.choice(list(live))
            del live[e]
            f.cut(e)
        else:
            u, v = rng.randrange(n), rng.randrange(n)
            assert f.connected(u, v) == _bfs_connected(n, live, u, v)
    comps = {frozenset(c) for c in f.components()}
    for c in comps:
        x = min(c)
        assert all(_bfs_connected(n, live, x, y) for y in c)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=25), st.data())
def test_split_report_matches_components(edges, data):
    f = forest(8)
    ids = [f.link(u, v) for u, v in edges]
    for e in data.draw(st.permutations(ids)):
        before = {frozenset(c) for c in f.components()}
        rep = f.cut(e)
        after = {frozenset(c) for c in f.components()}
        if rep.split:
            assert frozenset(rep.smaller) in after
            assert len(after) == len(before) + 1
            assert len(rep.smaller) <= rep.larger_size
        else:
            assert after == before
