import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dynconn.cli import gen_trace, oracle_answers
from dynconn.core import BaseGraph, ConfigError, Counters, parse_trace
from dynconn.offline import (
    DEFAULT_ALPHA,
    BoolMatrix,
    OfflineConfig,
    bool_matmul_dense,
    bool_matmul_reference,
    bool_matmul_sparse,
    geom_offline_params,
    geom_param_constraints,
    offline_exponents,
    run_offline_geom,
    run_offline_subgraph,
    split_middle,
    subgraph_offline_config,
)


def rand_matrix(rng, r, c, p):
    return BoolMatrix.from_pairs(r, c, [(i, j) for i in range(r) for j in range(c) if rng.random() < p])


def test_identity_squares_to_itself():
    eye = BoolMatrix.identity(8)
    assert bool_matmul_dense(eye, eye) == eye
    assert bool_matmul_sparse(eye, eye, 1) == eye


def test_zero_product():
    rng = random.Random(0)
    A = rand_matrix(rng, 8, 8, 0.5)
    zero = BoolMatrix(8, 8)
    assert bool_matmul_dense(A, zero).ones == 0
    assert bool_matmul_sparse(A, zero, 1).ones == 0


def test_dense_against_triple_loop():
    rng = random.Random(1)
    for _ in range(200):
        A, B = rand_matrix(rng, 32, 32, 0.1), rand_matrix(rng, 32, 32, 0.1)
        assert bool_matmul_dense(A, B) == bool_matmul_reference(A, B)


def test_threshold_extremes():
    rng = random.Random(2)
    A, B = rand_matrix(rng, 20, 30, 0.1), rand_matrix(rng, 30, 25, 0.1)
    ref = bool_matmul_dense(A, B)
    high, low = split_middle(A, 1)
    assert set(high) == {j for j, c in enumerate(A.column_counts()) if c}
    assert bool_matmul_sparse(A, B, 1) == ref
    high, _ = split_middle(A, A.ones)
    assert high == [] or max(A.column_counts()) == A.ones
    assert bool_matmul_sparse(A, B, A.ones) == ref


def test_threshold_validation():
    A = BoolMatrix.identity(3)
    with pytest.raises(ValueError):
        bool_matmul_sparse(A, A, 0)
    with pytest.raises(ValueError):
        bool_matmul_sparse(A, A, 4)
    with pytest.raises(ValueError):
        bool_matmul_dense(A, BoolMatrix(2, 2))


def test_sparse_charges_bit_ops():
    rng = random.Random(3)
    A, B = rand_matrix(rng, 30, 30, 0.05), rand_matrix(rng, 30, 30, 0.05)
    c = Counters()
    bool_matmul_sparse(A, B, 2, c)
    assert c.bit_ops > 0


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.floats(0, 1), st.randoms(use_true_random=False), st.data())
def test_sparse_equals_dense(n1, n2, n3, p, rnd, data):
    A = BoolMatrix.from_pairs(n1, n2, [(i, j) for i in range(n1) for j in range(n2) if rnd.random() < p])
    B = BoolMatrix.from_pairs(n2, n3, [(i, j) for i in range(n2) for j in range(n3) if rnd.random() < p])
    t = data.draw(st.integers(1, max(A.ones, 1)))
    assert bool_matmul_sparse(A, B, t) == bool_matmul_dense(A, B) == bool_matmul_reference(A, B)


def test_offline_exponents():
    assert offline_exponents(1) == (Fraction(1000, 1147), Fraction(294, 1147))
    assert offline_exponents(Fraction(1, 10**9))[0] > Fraction(999_999, 10**6)
    for b in (Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(1)):
        up, qu = offline_exponents(b)
        assert 0 < qu < 1 and 0 < up < 1
    with pytest.raises(ConfigError):
        offline_exponents(0)


def test_geom_params_n4096():
    cfg = geom_offline_params(4096, 1)
    den = 1 + DEFAULT_ALPHA - DEFAULT_ALPHA / 2
    assert 1 / den == Fraction(1000, 1147)
    # q = ceil(4096^(1000/1147)): the smallest integer with q^1147 >= 4096^1000
    assert cfg.q**1147 >= 4096**1000 > (cfg.q - 1) ** 1147
    assert all(geom_param_constraints(4096, cfg, 1).values())


@pytest.mark.parametrize("b", [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 10)])
def test_param_constraints_sweep(b):
    for n in (1, 2, 10, 100, 1000, 4096, 10**5):
        assert all(geom_param_constraints(n, geom_offline_params(n, b), b).values())


def test_subgraph_config_defaults():
    cfg = subgraph_offline_config(1000)
    assert (cfg.delta, cfg.q, cfg.t) == (10, 100, 4)
    cfg.validate(1000)
    with pytest.raises(ConfigError):
        OfflineConfig(5, 10, 1).validate(1000)


def test_static_queries_match_oracle():
    g = BaseGraph(6, [(0, 1), (1, 2), (3, 4)])
    tr = parse_trace("graph 6\nedge 0 1\nedge 1 2\nedge 3 4\n" + "".join(f"conn {u} {v}\n" for u in range(5) for v in range(5)))
    got = run_offline_subgraph(g, tr.events, initially_active=range(5))
    want = [(u < 3) == (v < 3) for u in range(5) for v in range(5)]
    assert got == want


@pytest.mark.parametrize("seed", range(10))
def test_random_subgraph_traces_match_oracle(seed):
    tr = parse_trace(gen_trace("subgraph", 16 + 16 * (seed % 4), 500, seed))
    assert run_offline_subgraph(tr.graph, tr.events, audit=True) == oracle_answers(tr)


def test_small_phases_and_custom_high_set():
    tr = parse_trace(gen_trace("subgraph", 24, 400, 99))
    cfg = OfflineConfig(q=7, delta=3, t=1)
    want = oracle_answers(tr)
    assert run_offline_subgraph(tr.graph, tr.events, cfg, audit=True) == want
    assert run_offline_subgraph(tr.graph, tr.events, cfg, high=range(10), audit=True) == want


def test_geom_all_inserts_then_queries():
    ivs = [(0, 2), (1, 3), (5, 6), (6, 9), (20, 21)]
    text = "geom 1\n" + "".join(f"insert {i} box 1 {a} {b}\n" for i, (a, b) in enumerate(ivs))
    text += "".join(f"conn {i} {j}\n" for i in range(5) for j in range(5))
    tr = parse_trace(text)
    assert run_offline_geom(tr.events) == oracle_answers(tr)


@pytest.mark.parametrize("seed", range(6))
def test_random_geom_traces_match_oracle(seed):
    tr = parse_trace(gen_trace("geom", 50, 400, seed, d=1 + seed % 2))
    assert run_offline_geom(tr.events, audit=True) == oracle_answers(tr)
    assert run_offline_geom(tr.events, b=Fraction(1, 2)) == oracle_answers(tr)


def test_geom_reinserted_id():
    tr = parse_trace("geom 1\ninsert 0 box 1 0 2\ninsert 1 box 1 1 3\ndelete 0\ninsert 0 box 1 9 9\nconn 0 1\n")
    assert run_offline_geom(tr.events) == [False]
