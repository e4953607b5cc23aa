import random

import pytest
from hypothesis import given, settings, strategies as st

from dynconn.core import GeomObject
from dynconn.range_provider import BOXES, BRUTE, CanonicalCollection

Z = 10**6  # id for query boxes


def random_boxes(rng, n, d, span=100, side=15):
    out = []
    for i in range(n):
        lo = [rng.randrange(span) for _ in range(d)]
        out.append(GeomObject(i, tuple(lo), tuple(a + rng.randrange(side) for a in lo)))
    return out


def check_answer(coll, objs, z):
    ans = coll.query(z)
    got = coll.union(ans)
    assert len(got) == len(set(got)), "canonical subsets overlap"
    assert set(got) == {o.id for o in objs if o.intersects(z)}
    return ans


def test_single_object():
    coll = CanonicalCollection([GeomObject.box(7, (0, 1))])
    assert any(7 in s for s in coll.subsets)


def test_disjoint_unit_intervals():
    objs = [GeomObject.box(i, (2 * i, 2 * i + 1)) for i in range(20)]
    coll = CanonicalCollection(objs)
    for a in range(-1, 42):
        for w in (0, 1, 3, 10):
            check_answer(coll, objs, GeomObject.box(Z, (a, a + w)))


def test_total_size_within_declared_bound():
    rng = random.Random(1)
    coll = CanonicalCollection(random_boxes(rng, 256, 1, span=1000, side=40))
    assert coll.total_size <= 256 * (2 * 8 + 2) ** 2
    assert coll.total_size <= coll.s_bound()


def test_far_query_is_empty_and_cover_query_is_everything():
    rng = random.Random(2)
    objs = random_boxes(rng, 50, 2)
    coll = CanonicalCollection(objs)
    assert len(coll.query(GeomObject.box(Z, (500, 600), (500, 600)))) == 0
    everything = check_answer(coll, objs, GeomObject.box(Z, (0, 200), (0, 200)))
    assert sorted(coll.union(everything)) == list(range(50))


@pytest.mark.parametrize("provider", [BOXES, BRUTE])
def test_random_2d_queries(provider):
    rng = random.Random(3)
    objs = random_boxes(rng, 200, 2)
    coll = CanonicalCollection(objs, provider)
    for z in random_boxes(rng, 500, 2):
        ans = check_answer(coll, objs, z)
        assert len(ans) <= coll.query_count_bound()


def test_partition_stats_thresholds():
    rng = random.Random(4)
    objs = random_boxes(rng, 64, 1)
    coll = CanonicalCollection(objs)
    z = GeomObject.box(Z, (0, 200))
    ans = coll.query(z)
    assert coll.partition_stats(z, 1) == (0, 64)
    big, small = coll.partition_stats(z, 64)
    assert big == sum(1 for sid in ans if coll.size(sid) > 1)
    with pytest.raises(ValueError):
        coll.partition_stats(z, 65)
    with pytest.raises(ValueError):
        coll.partition_stats(z, 0)


def test_partition_stats_within_bounds():
    rng = random.Random(5)
    objs = random_boxes(rng, 128, 2)
    coll = CanonicalCollection(objs)
    for z in random_boxes(rng, 40, 2, side=60):
        for delta in range(2, 129, 2):
            big, small = coll.partition_stats(z, delta)
            assert big <= coll.bound_big(delta)
            assert small <= coll.bound_small(delta)


def test_three_dimensions():
    rng = random.Random(6)
    objs = random_boxes(rng, 40, 3, span=30)
    coll = CanonicalCollection(objs)
    for z in random_boxes(rng, 60, 3, span=30):
        check_answer(coll, objs, z)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        CanonicalCollection([GeomObject.box(0, (0, 1)), GeomObject.box(0, (2, 3))])
    with pytest.raises(ValueError):
        CanonicalCollection([GeomObject.box(0, (0, 1)), GeomObject.box(1, (0, 1), (0, 1))])
    with pytest.raises(ValueError):
        CanonicalCollection([], "kd")


boxes_1d = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 6)), min_size=1, max_size=30)


@settings(max_examples=60, deadline=None)
@given(boxes_1d, st.integers(-2, 35), st.integers(0, 8))
def test_answer_is_exact_disjoint_union(spans, a, w):
    objs = [GeomObject.box(i, (lo, lo + ln)) for i, (lo, ln) in enumerate(spans)]
    coll = CanonicalCollection(objs)
    check_answer(coll, objs, GeomObject.box(Z, (a, a + w)))
