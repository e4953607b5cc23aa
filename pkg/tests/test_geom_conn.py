from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from drivers import geom_run

from dynconn.core import ConfigError, GeomObject, StateError, UnknownError
from dynconn.geom_conn import GeomState, exponents_for_b, inner_delta, phase_length
from dynconn.oracle import oracle_components_geom


def iv(i, a, b):
    return GeomObject.box(i, (a, b))


def audited(gs: GeomState):
    gs.check_invariants()
    gs.check_activation()
    assert gs.typed_edges() == gs.expected_typed_edges()
    return gs


def test_two_overlapping_intervals():
    gs = GeomState()
    gs.insert(iv(0, 0, 2))
    gs.insert(iv(1, 1, 3))
    assert gs.connected(0, 1)


def test_new_object_reaches_settled_subset():
    gs = GeomState(objects=[iv(i, 3 * i, 3 * i + 1) for i in range(8)])
    assert not gs.connected(0, 1)
    gs.insert(iv(100, 1, 3))
    audited(gs)
    assert gs.connected(0, 1) and gs.connected(1, 100)
    assert not gs.connected(0, 2)


def test_split_rewires_smaller_side():
    objs = [iv(0, 0, 2), iv(1, 2, 4), iv(2, 4, 6), iv(3, 6, 8), iv(4, 8, 10)]
    gs = GeomState(objects=objs)
    gs.insert(iv(9, 9, 12))
    gs.delete(1)
    audited(gs)
    assert not gs.connected(0, 2)
    assert gs.connected(2, 9)
    gs.delete(3)
    audited(gs)
    assert not gs.connected(2, 4) and gs.connected(4, 9)


def test_identity_and_disjoint():
    gs = GeomState()
    gs.insert(iv(0, 0, 1))
    gs.insert(iv(1, 5, 6))
    assert gs.connected(0, 0)
    assert not gs.connected(0, 1)


def test_errors():
    gs = GeomState()
    gs.insert(iv(0, 0, 1))
    with pytest.raises(StateError):
        gs.insert(iv(0, 4, 5))
    with pytest.raises(UnknownError):
        gs.delete(3)
    with pytest.raises(UnknownError):
        gs.connected(0, 3)
    with pytest.raises(ValueError):
        gs.insert(GeomObject.box(2, (0, 1), (0, 1)))
    with pytest.raises(ConfigError):
        GeomState(b=2)


def test_exponents():
    assert exponents_for_b(Fraction(1, 2)) == (Fraction(9, 10), Fraction(1, 5))
    assert exponents_for_b(Fraction(1, 3)) == (Fraction(20, 21), Fraction(1, 7))
    assert exponents_for_b(1) == (Fraction(2, 3), Fraction(1, 3))
    with pytest.raises(ConfigError):
        exponents_for_b(0)


def test_phase_parameters():
    assert phase_length(1000, Fraction(1)) == 1000
    assert phase_length(1000, Fraction(1, 3)) == 10
    assert inner_delta(1000, Fraction(1)) == 10
    assert phase_length(0, Fraction(1)) == 1


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("b", [None, Fraction(1, 2), Fraction(1, 3)])
def test_random_workload(d, b):
    answers, checks = geom_run(40 + d, 120, 1000, d, b=b)
    assert answers and checks


def test_brute_provider():
    answers, _ = geom_run(7, 60, 600, 2, provider="brute")
    assert answers


def test_edge_budgets_hold_over_a_run():
    gs = GeomState(b=Fraction(1, 2))
    for i in range(80):
        gs.insert(iv(i, (7 * i) % 101, (7 * i) % 101 + 4))
        if i % 3 == 2:
            gs.delete(i - 2)
        counts, budgets = gs.edge_counts(), gs.edge_budgets()
        for k in budgets:
            assert counts[k] <= budgets[k], k
    audited(gs)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 40), st.integers(0, 5)), max_size=60))
def test_small_sequences_match_oracle(ops):
    gs = GeomState()
    live = {}
    nid = 0
    for ins, a, w in ops:
        if ins or not live:
            o = iv(nid, a, a + w)
            gs.insert(o)
            live[nid] = o
            nid += 1
        else:
            oid = sorted(live)[a % len(live)]
            gs.delete(oid)
            del live[oid]
        audited(gs)
        parts = oracle_components_geom(live.values())
        for p in parts:
            x = min(p)
            assert all(gs.connected(x, y) for y in p)
        reps = [min(p) for p in parts]
        assert not any(gs.connected(x, y) for i, x in enumerate(reps) for y in reps[i + 1 :])
