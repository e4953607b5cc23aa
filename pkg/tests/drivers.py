"""Trace drivers shared by the unit and acceptance tests."""

from __future__ import annotations

from dynconn.cli import gen_trace
from dynconn.core import parse_trace
from dynconn.geom_conn import GeomState
from dynconn.oracle import oracle_components_geom, oracle_connected_subgraph, oracle_subgraph_labels, partition_of
from dynconn.subgraph_conn import SubgraphConn


def subgraph_run(seed: int, n: int, ops: int, policy: str, audit_every: int = 1, pairs_every: int = 50):
    """Run one random trace online; check every conn and periodic all-pairs against BFS.

    Returns (answers, number of audits run).  Raises AssertionError on a mismatch.
    """
    trace = parse_trace(gen_trace("subgraph", n, ops, seed))
    g = trace.graph
    s = SubgraphConn(g, policy)
    active: set[int] = set()
    dyn: dict[int, tuple[int, int]] = {}
    handles: dict[int, int] = {}
    answers = []
    audits = 0
    for k, ev in enumerate(trace.events, 1):
        a = ev.args
        if ev.kind == "on":
            s.turn_on(a[0])
            active.add(a[0])
        elif ev.kind == "off":
            s.turn_off(a[0])
            active.discard(a[0])
        elif ev.kind == "adde":
            handles[a[2]] = s.add_dyn_edge(a[0], a[1])
            dyn[a[2]] = (a[0], a[1])
        elif ev.kind == "dele":
            s.remove_dyn_edge(handles.pop(a[0]))
            del dyn[a[0]]
        else:
            got = s.connected(a[0], a[1])
            want = oracle_connected_subgraph(g, active, a[0], a[1], dyn.values())
            assert got == want, f"seed {seed} op {k}: conn {a} got {got}"
            answers.append(got)
        if audit_every and k % audit_every == 0:
            s.check_invariants()
            audits += 1
        if pairs_every and k % pairs_every == 0:
            labels = oracle_subgraph_labels(g, active, dyn.values())
            vs = sorted(active)
            for i, u in enumerate(vs):
                for v in vs[i + 1 :]:
                    assert s.connected(u, v) == (labels[u] == labels[v]), f"seed {seed} op {k}: pair {u},{v}"
    return answers, audits


def geom_run(seed: int, n: int, ops: int, d: int, provider: str = "boxes", b=None, check_blocks: bool = True):
    """Run one random geometric trace through GeomState, checking every query.

    With ``check_blocks`` the component partition kept by the state's own
    BlockState (over the settled objects X) is compared with the oracle after
    every block insertion and every deletion it sees.
    Returns (answers, number of partition checks).
    """
    trace = parse_trace(gen_trace("geom", n, ops, seed, d=d))
    gs = GeomState(provider, b)
    live: dict = {}
    answers = []
    checks = 0
    seen = (0, 0)
    label: dict[int, int] | None = None  # oracle labels, valid until the next update
    for k, ev in enumerate(trace.events, 1):
        if ev.kind == "insert":
            gs.insert(ev.obj)
            live[ev.obj.id] = ev.obj
            label = None
        elif ev.kind == "delete":
            gs.delete(ev.args[0])
            del live[ev.args[0]]
            label = None
        else:
            id1, id2 = ev.args
            got = gs.connected(id1, id2)
            if label is None:
                label = {i: min(p) for p in oracle_components_geom(live.values()) for i in p}
            want = label[id1] == label[id2]
            assert got == want, f"seed {seed} op {k}: conn {id1} {id2} got {got}"
            answers.append(got)
        bs = gs.blocks
        state = (bs.blocks, len(bs))
        if check_blocks and state != seen:
            seen = state
            assert set(bs.components()) == set(oracle_components_geom(gs.X.values())), f"seed {seed} op {k}: block partition"
            checks += 1
    return answers, checks
