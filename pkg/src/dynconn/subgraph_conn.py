"""Dynamic subgraph connectivity under vertex on/off updates.

Active vertices are split into ``P`` (deletion-only, rebuilt each phase) and
``Q`` (fully dynamic, at most ``q`` vertices).  Components of ``P`` are kept
as records; ``gamma`` links every vertex to the records it is adjacent to;
``C[u, w]`` counts the low records adjacent to both ``u`` and ``w``.  The
intermediate graph ``G*`` over Q-vertices and records is maintained in a
:class:`DynForest`, and two Q-vertices are connected in the active subgraph
iff they are connected in ``G*``.

Two edge policies share the skeleton:

* ``CLASSIC``:  (a) Q-pairs with ``C > 0``, (b) Q-vertex to adjacent high
  record, (c) Q-pairs joined by a graph edge.
* ``DEGREE``:  (a') like (a) but only when one end is a high vertex,
  (b) as above, (b') low Q-vertex to every adjacent record, (c) as above.

Dynamic edges are simulated by degree-2 vertices.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import BaseGraph, ConfigError, Counters, StaleHandleError, StateError, UnknownError, icbrt_ceil
from .dyn_edge_conn import DynForest


def balanced_exponents() -> dict[str, Fraction]:
    """Threshold, update and query exponents (in m) when delta balances rebuild and update cost.

    The amortized update cost delta^2 + m/delta is minimised at delta = m^(1/3).
    """
    d = Fraction(1, 3)
    return {"delta": d, "q": 1 - d, "update": 2 * d, "query": d}


class Policy(enum.Enum):
    CLASSIC = "classic"
    DEGREE = "degree"


@dataclass(frozen=True)
class SubgraphConfig:
    delta: int
    q: int

    @classmethod
    def auto(cls, m: int, delta: int | None = None) -> "SubgraphConfig":
        if delta is None:
            delta = max(1, icbrt_ceil(m))
        return cls(delta, max(1, -(-m // delta)))


class _Record:
    __slots__ = ("deg", "high", "size", "gnode")

    def __init__(self, gnode: int):
        self.deg = 0
        self.high = False
        self.size = 0
        self.gnode = gnode


def _pairs(nbrs: Iterable[int], out: Counter) -> None:
    ns = sorted(nbrs)
    for i, a in enumerate(ns):
        for b in ns[i + 1 :]:
            out[(a, b)] += 1


class SubgraphConn:
    """Vertex-update connectivity structure over a frozen base graph.

    >>> from dynconn.core import BaseGraph
    >>> s = SubgraphConn(BaseGraph(3, [(0, 1), (1, 2)]), initially_active=[0, 1, 2])
    >>> s.connected(0, 2)
    True
    >>> s.turn_off(1); s.connected(0, 2)
    False
    """

    def __init__(
        self,
        g: BaseGraph,
        policy: Policy | str = Policy.CLASSIC,
        cfg: SubgraphConfig | None = None,
        initially_active: Iterable[int] = (),
        counters: Counters | None = None,
        dyn_edges: Iterable[tuple[int, int]] = (),
    ):
        self.policy = Policy(policy)
        self.degree_policy = self.policy is Policy.DEGREE
        self.counters = counters if counters is not None else Counters()
        self.base = g
        m = g.m
        if cfg is None:
            cfg = SubgraphConfig.auto(m)
        if not (1 <= cfg.delta <= max(m, 1)):
            raise ConfigError(f"delta={cfg.delta} outside [1, {max(m, 1)}]")
        if cfg.q < 1:
            raise ConfigError("phase length q must be positive")
        self.cfg = cfg
        self.delta = cfg.delta
        self.q = cfg.q

        n = g.n
        self.adj: list[dict[int, int]] = [dict() for _ in range(n)]
        self.deg: list[int] = list(g.degree)
        for u, v in g.edges:
            a = self.adj[u]
            if u == v:
                a[u] = a.get(u, 0) + 2
            else:
                a[v] = a.get(v, 0) + 1
                b = self.adj[v]
                b[u] = b.get(u, 0) + 1
        self.m = m
        self.alive: list[bool] = [True] * n
        self.hv: list[bool] = [False] * n  # high-vertex flags, frozen per phase
        self.gv: list[dict[int, int]] = [dict() for _ in range(n)]
        self.cnb: list[dict[int, int]] = [dict() for _ in range(n)]
        self.sim: dict[int, int] = {}
        self._next_handle = 0
        self.phases = 0

        active = set()
        for v in initially_active:
            if not (0 <= v < n):
                raise UnknownError(f"unknown vertex {v}")
            active.add(v)
        self.P: set[int] = set(active)
        self.Q: set[int] = set()
        self.initial_handles = []
        for u, v in dyn_edges:
            if u not in self.P or v not in self.P:
                raise StateError("dynamic edge endpoints must be initially active")
            z = self._attach_sim_vertex(u, v)
            self.P.add(z)
            h = self._next_handle
            self._next_handle += 1
            self.sim[h] = z
            self.initial_handles.append(h)
        self.rebuild_phase()

    # -- vertex bookkeeping ------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.adj)

    def is_active(self, v: int) -> bool:
        return v in self.P or v in self.Q

    def active_vertices(self) -> set[int]:
        return self.P | self.Q

    def _new_vertex(self) -> int:
        z = len(self.adj)
        self.adj.append({})
        self.deg.append(0)
        self.alive.append(True)
        self.hv.append(False)
        self.gv.append({})
        self.cnb.append({})
        return z

    def add_vertex(self) -> int:
        """Append an isolated, inactive vertex and return its id."""
        return self._new_vertex()

    def _check(self, v: int) -> None:
        if not (0 <= v < len(self.adj)) or not self.alive[v]:
            raise UnknownError(f"unknown vertex {v}")

    def _attach_sim_vertex(self, u: int, v: int) -> int:
        """Create an inactive vertex adjacent to u and v (no gamma bookkeeping)."""
        z = self._new_vertex()
        az = self.adj[z]
        for x in (u, v):
            az[x] = az.get(x, 0) + 1
            ax = self.adj[x]
            ax[z] = ax.get(z, 0) + 1
            self.deg[x] += 1
        self.deg[z] = 2
        self.m += 2
        return z

    # -- phase rebuild -----------------------------------------------------

    def rebuild_phase(self) -> None:
        """Move Q into P and recompute records, gamma, C and G* from scratch."""
        self.phases += 1
        ctr = self.counters
        P = self.P | self.Q
        self.P = P
        self.Q = set()
        self.highQ: set[int] = set()
        N = len(self.adj)
        adj = self.adj
        # high-vertex classification for this phase
        self.m_phase = self.m
        thr_num = self.m
        self.hv = [False] * N
        if self.degree_policy:
            delta = self.delta
            for v in range(N):
                if self.alive[v] and self.deg[v] * delta > thr_num:
                    self.hv[v] = True
            for z in self.sim.values():
                self.hv[z] = False
        self.phase_deg = list(self.deg)
        self.phase_sim = set(self.sim.values())

        edges = []
        for x in P:
            for y, c in adj[x].items():
                if x < y and y in P:
                    edges.extend([(x, y)] * c)
        self.engine, eids = DynForest.from_edges(N, edges)
        self.pedges: list[set[int]] = [set() for _ in range(N)]
        for eid, (x, y) in zip(eids, edges):
            self.pedges[x].add(eid)
            self.pedges[y].add(eid)

        self.gstar = DynForest()
        self.gkeys: dict[tuple, int] = {}
        self.ginc: dict[int, set] = {}
        self.qnode: dict[int, int] = {}
        self._free_gnodes: list[int] = []
        self.recs: dict[int, _Record] = {}
        self.gm: dict[int, dict[int, int]] = {}
        self.rec: dict[int, int] = {}
        self._next_rid = 0
        self.gv = [dict() for _ in range(N)]
        self.cnb = [dict() for _ in range(N)]

        gv = self.gv
        delta = self.delta
        for comp in self.engine.components():
            if comp[0] not in P:
                continue
            rid = self._new_record()
            R = self.recs[rid]
            gmr = self.gm[rid]
            for x in comp:
                self.rec[x] = rid
                R.deg += self.deg[x]
                for u, c in adj[x].items():
                    gmr[u] = gmr.get(u, 0) + c
                    gvu = gv[u]
                    gvu[rid] = gvu.get(rid, 0) + c
                    ctr.gamma_updates += c
            R.size = len(comp)
            R.high = R.deg > delta
        cnb = self.cnb
        for rid, R in self.recs.items():
            if R.high:
                continue
            ns = sorted(self.gm[rid])
            for i, a in enumerate(ns):
                ca = cnb[a]
                for b in ns[i + 1 :]:
                    ca[b] = ca.get(b, 0) + 1
                    cb = cnb[b]
                    cb[a] = cb.get(a, 0) + 1
                    ctr.c_updates += 1
        self.countdown = self.q

    def _new_record(self) -> int:
        rid = self._next_rid
        self._next_rid += 1
        gnode = self._free_gnodes.pop() if self._free_gnodes else self.gstar.add_vertex()
        self.recs[rid] = _Record(gnode)
        self.gm[rid] = {}
        self.ginc.setdefault(gnode, set())
        return rid

    def _drop_record(self, rid: int) -> None:
        R = self.recs.pop(rid)
        assert not self.gm.pop(rid)
        assert not self.ginc[R.gnode]
        self._free_gnodes.append(R.gnode)

    # -- G* maintenance ------------------------------------------------------

    def _qn(self, v: int) -> int:
        node = self.qnode.get(v)
        if node is None:
            node = self.qnode[v] = self.gstar.add_vertex()
            self.ginc[node] = set()
        return node

    def _g_add(self, key: tuple, n1: int, n2: int) -> None:
        self.gkeys[key] = self.gstar.link(n1, n2)
        self.ginc[n1].add(key)
        self.ginc[n2].add(key)
        self.counters.gstar_edge_updates += 1

    def _g_remove(self, key: tuple) -> None:
        eid = self.gkeys.pop(key)
        n1, n2 = self.gstar.edge_endpoints(eid)
        self.gstar.cut(eid)
        self.ginc[n1].discard(key)
        self.ginc[n2].discard(key)
        self.counters.gstar_edge_updates += 1

    def _want_a(self, u: int, w: int) -> bool:
        Q = self.Q
        if u not in Q or w not in Q or self.cnb[u].get(w, 0) <= 0:
            return False
        return not self.degree_policy or self.hv[u] or self.hv[w]

    def _sync_a(self, u: int, w: int) -> None:
        key = ("a", u, w) if u < w else ("a", w, u)
        want = self._want_a(u, w)
        if want and key not in self.gkeys:
            self._g_add(key, self.qnode[u], self.qnode[w])
        elif not want and key in self.gkeys:
            self._g_remove(key)

    def _want_b(self, u: int, rid: int) -> bool:
        if u not in self.Q or self.gv[u].get(rid, 0) <= 0:
            return False
        return self.recs[rid].high or (self.degree_policy and not self.hv[u])

    def _sync_b(self, u: int, rid: int) -> None:
        key = ("b", u, rid)
        want = self._want_b(u, rid)
        if want and key not in self.gkeys:
            self._g_add(key, self.qnode[u], self.recs[rid].gnode)
        elif not want and key in self.gkeys:
            self._g_remove(key)

    # -- C table -----------------------------------------------------------

    def _c_add(self, a: int, b: int, d: int) -> None:
        ca = self.cnb[a]
        old = ca.get(b, 0)
        new = old + d
        if new < 0:
            raise AssertionError("negative C entry")
        cb = self.cnb[b]
        if new:
            ca[b] = new
            cb[a] = new
        else:
            del ca[b]
            del cb[a]
        self.counters.c_updates += abs(d)
        if (old == 0) != (new == 0) and a in self.Q and b in self.Q:
            self._sync_a(a, b)

    def _contrib(self, rids: Iterable[int]) -> Counter:
        out: Counter = Counter()
        for rid in rids:
            if rid in self.recs and not self.recs[rid].high:
                _pairs(self.gm[rid], out)
        return out

    def _apply_contrib(self, old: Counter, new: Counter) -> None:
        for key in old.keys() | new.keys():
            d = new.get(key, 0) - old.get(key, 0)
            if d:
                self._c_add(key[0], key[1], d)

    # -- gamma -------------------------------------------------------------

    def _gamma_change(self, u: int, rid: int, d: int) -> None:
        gmr = self.gm[rid]
        gvu = self.gv[u]
        new = gmr.get(u, 0) + d
        if new:
            gmr[u] = new
            gvu[rid] = new
        else:
            del gmr[u]
            del gvu[rid]
        self.counters.gamma_updates += abs(d)

    def _reclassify(self, rids: Iterable[int], flipped: list[int]) -> None:
        for rid in rids:
            R = self.recs.get(rid)
            if R is None:
                continue
            want = R.deg > self.delta
            if want != R.high:
                R.high = want
                flipped.append(rid)

    def _sync_records(self, rids: Iterable[int], affected: Iterable[int], flipped: Iterable[int]) -> None:
        Q = self.Q
        rids = [r for r in rids if r in self.recs]
        for u in affected:
            if u in Q:
                for rid in rids:
                    self._sync_b(u, rid)
        for rid in flipped:
            if rid in self.recs:
                for u in list(self.gm[rid]):
                    if u in Q:
                        self._sync_b(u, rid)

    # -- updates -----------------------------------------------------------

    def _tick(self) -> None:
        self.countdown -= 1
        if self.countdown <= 0:
            self.rebuild_phase()

    def turn_on(self, v: int) -> None:
        self._check(v)
        if self.is_active(v):
            raise StateError(f"vertex {v} is already active")
        self._activate(v)
        self._tick()

    def turn_off(self, v: int) -> None:
        self._check(v)
        if not self.is_active(v):
            raise StateError(f"vertex {v} is already inactive")
        self._deactivate(v)
        self._tick()

    def _activate(self, v: int) -> None:
        Q = self.Q
        Q.add(v)
        hv = self.hv[v]
        if hv:
            self.highQ.add(v)
        node = self._qn(v)
        for w in self.adj[v]:
            if w != v and w in Q:
                key = ("c", v, w) if v < w else ("c", w, v)
                self._g_add(key, node, self.qnode[w])
        cv = self.cnb[v]
        if not self.degree_policy or hv:
            cands = [w for w in cv if w in Q]
        elif len(self.highQ) < len(cv):
            cands = [w for w in self.highQ if w in cv]
        else:
            cands = [w for w in cv if w in self.highQ]
        for w in cands:
            self._sync_a(v, w)
        for rid in self.gv[v]:
            self._sync_b(v, rid)

    def _deactivate(self, v: int) -> None:
        if v in self.Q:
            node = self.qnode[v]
            for key in list(self.ginc[node]):
                self._g_remove(key)
            self.Q.discard(v)
            self.highQ.discard(v)
        else:
            self._remove_from_p(v)

    def _remove_from_p(self, v: int) -> None:
        ctr = self.counters
        r0 = self.rec[v]
        R0 = self.recs[r0]
        old = self._contrib([r0])
        affected = set()
        adj = self.adj
        for u, c in adj[v].items():
            self._gamma_change(u, r0, -c)
            affected.add(u)
        R0.deg -= self.deg[v]
        touched = [r0]
        engine = self.engine
        pedges = self.pedges
        for eid in sorted(pedges[v]):
            x, y = engine.edge_endpoints(eid)
            pedges[x].discard(eid)
            pedges[y].discard(eid)
            rep = engine.cut(eid)
            if not rep.split:
                continue
            side = rep.smaller
            r_cur = self.rec[side[0]]
            r_new = self._new_record()
            touched.append(r_new)
            Rc, Rn = self.recs[r_cur], self.recs[r_new]
            Rn.high = Rc.high
            moved = 0
            for x in side:
                self.rec[x] = r_new
                if x == v:
                    continue
                moved += self.deg[x]
                for u, c in adj[x].items():
                    self._gamma_change(u, r_cur, -c)
                    self._gamma_change(u, r_new, c)
                    affected.add(u)
            Rc.deg -= moved
            Rn.deg = moved
            Rc.size -= len(side)
            Rn.size = len(side)
            ctr.component_splits += 1
        rv = self.rec.pop(v)
        self.P.discard(v)
        Rv = self.recs[rv]
        Rv.size -= 1
        assert Rv.size == 0 and Rv.deg == 0
        flipped: list[int] = []
        self._reclassify(touched, flipped)
        live = [r for r in touched if r != rv]
        self._apply_contrib(old, self._contrib(live))
        # removes stale b-edges at rv and r0 too
        self._sync_records(touched, affected, flipped)
        self._drop_record(rv)

    # -- simulated edges ------------------------------------------------------

    def add_dyn_edge(self, u: int, v: int) -> int:
        self._check(u)
        self._check(v)
        if not (self.is_active(u) and self.is_active(v)):
            raise StateError("dynamic edge endpoints must be active")
        h = self._insert_sim(u, v)
        self._tick()
        return h

    def _insert_sim(self, u: int, v: int) -> int:
        z = self._attach_sim_vertex(u, v)
        touched = sorted({self.rec[x] for x in (u, v) if x in self.P})
        old = self._contrib(touched)
        for x in (u, v):
            if x in self.P:
                rid = self.rec[x]
                self._gamma_change(z, rid, 1)
                self.recs[rid].deg += 1
        flipped: list[int] = []
        self._reclassify(touched, flipped)
        self._apply_contrib(old, self._contrib(touched))
        self._sync_records(touched, (), flipped)
        self._activate(z)
        h = self._next_handle
        self._next_handle += 1
        self.sim[h] = z
        return h

    def remove_dyn_edge(self, h: int) -> None:
        z = self.sim.pop(h, None)
        if z is None:
            raise StaleHandleError(f"dynamic edge handle {h} is not live")
        if self.is_active(z):
            self._deactivate(z)
        nbrs = list(self.adj[z].items())
        touched = sorted({self.rec[x] for x, _ in nbrs if x in self.P})
        old = self._contrib(touched)
        for x, c in nbrs:
            del self.adj[x][z]
            self.deg[x] -= c
            if x in self.P:
                rid = self.rec[x]
                self._gamma_change(z, rid, -c)
                self.recs[rid].deg -= c
        self.adj[z] = {}
        self.deg[z] = 0
        self.m -= 2
        self.alive[z] = False
        flipped: list[int] = []
        self._reclassify(touched, flipped)
        self._apply_contrib(old, self._contrib(touched))
        self._sync_records(touched, (), flipped)
        self._tick()

    def dyn_edge_vertex(self, h: int) -> int:
        return self.sim[h]

    # -- queries -----------------------------------------------------------

    def _rep(self, u: int):
        if u in self.Q:
            return self.qnode[u]
        rid = self.rec[u]
        R = self.recs[rid]
        if R.high or (self.degree_policy and self.ginc[R.gnode]):
            return R.gnode
        Q = self.Q
        for w in self.gm[rid]:
            if w in Q:
                return self.qnode[w]
        return ("iso", rid)

    def connected(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        if not (self.is_active(u) and self.is_active(v)):
            raise StateError("query endpoints must be active")
        if u == v:
            return True
        a = self._rep(u)
        b = self._rep(v)
        if isinstance(a, tuple) or isinstance(b, tuple):
            return a == b
        return self.gstar.connected(a, b)

    # -- audits ------------------------------------------------------------

    def expected_gstar_keys(self) -> set[tuple]:
        """G* edge keys rebuilt from scratch from P, Q, gamma and C."""
        Q = sorted(self.Q)
        keys = set()
        hv = self.hv
        for i, u in enumerate(Q):
            for w in Q[i + 1 :]:
                if self.adj[u].get(w, 0) > 0:
                    keys.add(("c", u, w))
                if self.cnb[u].get(w, 0) > 0 and (not self.degree_policy or hv[u] or hv[w]):
                    keys.add(("a", u, w))
            for rid, mult in self.gv[u].items():
                if mult > 0 and (self.recs[rid].high or (self.degree_policy and not hv[u])):
                    keys.add(("b", u, rid))
        return keys

    def brute_c_table(self) -> dict[tuple[int, int], int]:
        out: Counter = Counter()
        for rid, R in self.recs.items():
            if R.deg <= self.delta:
                _pairs([u for u, c in self.gm[rid].items() if c > 0], out)
        return dict(out)

    def c_table(self) -> dict[tuple[int, int], int]:
        return {(a, b): c for a, row in enumerate(self.cnb) for b, c in row.items() if a < b}

    def check_invariants(self) -> None:
        """Recompute every derived structure by brute force and compare; raises AssertionError."""
        P, Q = self.P, self.Q
        assert not (P & Q), "P and Q overlap"
        assert len(Q) <= self.q, f"|Q|={len(Q)} exceeds q={self.q}"
        # components of P by BFS over the graph restricted to P
        seen: dict[int, int] = {}
        for s in sorted(P):
            if s in seen:
                continue
            stack = [s]
            seen[s] = s
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y in P and y not in seen:
                        seen[y] = s
                        stack.append(y)
        groups: dict[int, set[int]] = {}
        for x, lab in seen.items():
            groups.setdefault(lab, set()).add(x)
        by_rec: dict[int, set[int]] = {}
        for x, rid in self.rec.items():
            by_rec.setdefault(rid, set()).add(x)
        assert set(self.rec) == P, "record map does not cover P"
        assert {frozenset(s) for s in groups.values()} == {frozenset(s) for s in by_rec.values()}, "records differ from components of P"
        assert set(by_rec) == set(self.recs), "dangling records"
        # gamma, degrees, classification
        nhigh = 0
        for rid, members in by_rec.items():
            R = self.recs[rid]
            want: Counter = Counter()
            for x in members:
                for u, c in self.adj[x].items():
                    want[u] += c
            assert dict(want) == self.gm[rid], f"gamma mismatch at record {rid}"
            for u, c in want.items():
                assert self.gv[u].get(rid) == c
            assert R.deg == sum(want.values()) == sum(self.deg[x] for x in members)
            assert R.size == len(members)
            assert R.high == (R.deg > self.delta), "stale high/low flag"
            nhigh += R.high
        assert sum(len(row) for row in self.gv) == sum(len(g) for g in self.gm.values())
        if self.m:
            assert nhigh * self.delta <= 2 * self.m, "too many high components"
        # C table
        assert self.brute_c_table() == self.c_table(), "C table mismatch"
        # G*
        assert self.expected_gstar_keys() == set(self.gkeys), "G* edge set mismatch"
        # vertex classification (degree policy)
        if self.degree_policy:
            nhv = 0
            for v in range(len(self.adj)):
                if not self.alive[v]:
                    continue
                expect = (
                    v < len(self.phase_deg)
                    and v not in self.phase_sim
                    and self.phase_deg[v] * self.delta > self.m_phase
                    and v not in self.sim.values()
                )
                assert self.hv[v] == expect, f"vertex {v} high flag stale"
                nhv += expect
            assert nhv <= 2 * self.delta
        assert self.highQ == {v for v in Q if self.hv[v]}

    def canonical_state(self) -> tuple:
        by_rec: dict[int, list[int]] = {}
        for x, rid in self.rec.items():
            by_rec.setdefault(rid, []).append(x)
        canon = {rid: min(xs) for rid, xs in by_rec.items()}

        def key(k):
            return (k[0], k[1], canon[k[2]]) if k[0] == "b" else k

        return (
            tuple(sorted(self.P)),
            tuple(sorted(self.Q)),
            tuple(sorted(tuple(sorted(xs)) for xs in by_rec.values())),
            tuple(sorted(self.c_table().items())),
            tuple(sorted(key(k) for k in self.gkeys)),
        )

    def stats(self) -> dict:
        return {
            "delta": self.delta,
            "q": self.q,
            "P": len(self.P),
            "Q": len(self.Q),
            "records": len(self.recs),
            "high_records": sum(r.high for r in self.recs.values()),
            "c_entries": sum(len(r) for r in self.cnb) // 2,
            "gstar_edges": len(self.gkeys),
            "phases": self.phases,
        }


def build(
    g: BaseGraph,
    policy: Policy | str = Policy.CLASSIC,
    cfg: SubgraphConfig | None = None,
    initially_active: Iterable[int] = (),
    counters: Counters | None = None,
) -> SubgraphConn:
    return SubgraphConn(g, policy, cfg, initially_active, counters)
