"""Fully dynamic connectivity of an intersection graph of boxes.

Objects are split into ``X`` (deletion-only during a phase) and ``Y`` (recent
insertions, at most ``y`` of them).  Components of ``X`` come from a
:class:`BlockState`.  Connectivity is answered in an auxiliary graph ``G`` kept
in a degree-sensitive :class:`SubgraphConn`; its vertices are the objects,
one vertex per component of ``X`` and one per canonical subset of ``X``:

* (a) component -- each of its objects (simulated edges, rewired on splits);
* (b) canonical subset -- each of its ``X`` members (base edges);
* (c) ``Y``-object ``z`` -- each subset in ``C_z`` that still has a live member;
* (d) every two intersecting ``Y``-objects.

A subset vertex is active iff some ``Y``-object is assigned to it.  At the end
of a phase ``Y`` is merged into ``X`` as one block and ``G`` is rebuilt.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .core import BaseGraph, ConfigError, Counters, GeomObject, StateError, UnknownError, ceil_pow
from .geom_components import BlockState
from .range_provider import BOXES, CanonicalCollection
from .subgraph_conn import Policy, SubgraphConfig, SubgraphConn


def exponents_for_b(b) -> tuple[Fraction, Fraction]:
    """(update exponent, query exponent) for range-searching exponent ``b``.

    >>> exponents_for_b(Fraction(1, 2))
    (Fraction(9, 10), Fraction(1, 5))
    """
    b = Fraction(b)
    if not 0 < b <= 1:
        raise ConfigError(f"b={b} outside (0, 1]")
    return 1 - b * b / (2 + b), b / (2 + b)


def phase_length(n: int, b: Fraction) -> int:
    return max(1, ceil_pow(n, Fraction(b)))


def inner_delta(n: int, b: Fraction) -> int:
    b = Fraction(b)
    return max(1, ceil_pow(n, b / (2 + b)))


class GeomState:
    """Dynamic set of boxes answering "are these two objects connected?".

    ``b`` defaults to the provider's exponent; it only tunes phase length and
    the inner threshold, never correctness.
    """

    def __init__(
        self,
        provider: str = BOXES,
        b=None,
        counters: Counters | None = None,
        objects: Iterable[GeomObject] = (),
    ):
        self.provider = provider
        if b is None:
            b = CanonicalCollection([], provider).b
        self.b = Fraction(b)
        if not 0 <= self.b <= 1:
            raise ConfigError(f"b={self.b} outside [0, 1]")
        self.counters = counters if counters is not None else Counters()
        self.d: int | None = None
        self.blocks = BlockState(provider)
        self.X: dict[int, GeomObject] = {}
        self.Y: dict[int, GeomObject] = {}
        self.phases = 0
        self.max_y_seen = 0
        objects = list(objects)
        if objects:
            for o in objects:
                self._check_dim(o)
            self.blocks.insert_block(objects)
            self.X.update((o.id, o) for o in objects)
        self._rebuild()

    def _check_dim(self, o: GeomObject) -> None:
        if self.d is None:
            self.d = o.d
        elif o.d != self.d:
            raise ValueError(f"object {o.id} has dimension {o.d}, expected {self.d}")

    # -- phase management ---------------------------------------------------

    def _rebuild(self, coll: CanonicalCollection | None = None) -> None:
        """Start a phase: new collection over X, new component vertices, new G."""
        self.phases += 1
        X = self.X
        n = len(X)
        self.n_phase = n
        self.y = phase_length(n, self.b)
        self.updates_left = self.y
        xs = sorted(X)
        if coll is None:
            coll = CanonicalCollection((X[i] for i in xs), self.provider)
        self.coll = coll
        comps = self.blocks.components()

        self.ovx: dict[int, int] = {oid: k for k, oid in enumerate(xs)}
        base = len(xs)
        self.cvx: list[int] = list(range(base, base + len(comps)))
        base += len(comps)
        self.svx: list[int] = list(range(base, base + len(coll)))
        nv = base + len(coll)

        bedges = []
        self.member_of: dict[int, list[int]] = {oid: [] for oid in xs}
        self.xlive: list[int] = []
        for sid, members in enumerate(coll.subsets):
            sv = self.svx[sid]
            for oid in members:
                bedges.append((sv, self.ovx[oid]))
                self.member_of[oid].append(sid)
            self.xlive.append(len(members))
        g = BaseGraph(nv, bedges)

        self.compv: dict[int, int] = {}
        self.comp_size: dict[int, int] = {}
        aedges = []
        a_owner = []
        for cv, comp in zip(self.cvx, comps):
            self.comp_size[cv] = len(comp)
            for oid in sorted(comp):
                self.compv[oid] = cv
                aedges.append((cv, self.ovx[oid]))
                a_owner.append(oid)
        self.free_comp: list[int] = []

        delta = min(inner_delta(n, self.b), max(g.m, 1))
        cfg = SubgraphConfig.auto(g.m, delta)
        self.delta = delta
        active = list(range(len(xs) + len(comps)))
        self.G = SubgraphConn(g, Policy.DEGREE, cfg, active, self.counters, aedges)
        self.aedge: dict[int, int] = dict(zip(a_owner, self.G.initial_handles))
        self.assigned: list[dict[int, int]] = [dict() for _ in range(len(coll))]  # sid -> {y id: handle}
        self.cedges: dict[int, list[int]] = {}
        self.dedges: dict[int, dict[int, int]] = {}

    def _end_phase(self) -> None:
        coll = None
        if self.Y:
            block = list(self.Y.values())
            self.X.update(self.Y)
            self.Y = {}
            coll = CanonicalCollection(self.X.values(), self.provider)
            self.blocks.insert_block(block, coll)
        self._rebuild(coll)

    def _tick(self) -> None:
        self.updates_left -= 1
        if self.updates_left <= 0:
            self._end_phase()

    # -- updates -----------------------------------------------------------

    def __contains__(self, oid: int) -> bool:
        return oid in self.X or oid in self.Y

    def __len__(self) -> int:
        return len(self.X) + len(self.Y)

    def objects(self) -> list[GeomObject]:
        return [*self.X.values(), *self.Y.values()]

    def insert(self, obj: GeomObject) -> None:
        if obj.id in self:
            raise StateError(f"duplicate object id {obj.id}")
        self._check_dim(obj)
        G = self.G
        v = G.add_vertex()
        G.turn_on(v)
        self.ovx[obj.id] = v
        cl: list[int] = []
        if self.coll.n:
            for sid in self.coll.query(obj):
                if self.xlive[sid] == 0:
                    continue
                asg = self.assigned[sid]
                if not asg:
                    G.turn_on(self.svx[sid])
                asg[obj.id] = G.add_dyn_edge(v, self.svx[sid])
                cl.append(sid)
        self.cedges[obj.id] = cl
        dn: dict[int, int] = {}
        for w, other in self.Y.items():
            if other.intersects(obj):
                h = G.add_dyn_edge(v, self.ovx[w])
                dn[w] = h
                self.dedges[w][obj.id] = h
        self.dedges[obj.id] = dn
        self.Y[obj.id] = obj
        self.max_y_seen = max(self.max_y_seen, len(self.Y))
        self._tick()

    def delete(self, oid: int) -> None:
        if oid in self.Y:
            self._delete_y(oid)
        elif oid in self.X:
            self._delete_x(oid)
        else:
            raise UnknownError(f"unknown object {oid}")
        self._tick()

    def _delete_y(self, oid: int) -> None:
        G = self.G
        for w, h in self.dedges.pop(oid).items():
            G.remove_dyn_edge(h)
            del self.dedges[w][oid]
        for sid in self.cedges.pop(oid):
            asg = self.assigned[sid]
            G.remove_dyn_edge(asg.pop(oid))
            if not asg:
                G.turn_off(self.svx[sid])
        G.turn_off(self.ovx.pop(oid))
        del self.Y[oid]

    def _drop_subset(self, sid: int) -> None:
        """Last X member of ``sid`` is gone: its assignments no longer certify anything."""
        asg = self.assigned[sid]
        if not asg:
            return
        G = self.G
        for yid, h in asg.items():
            G.remove_dyn_edge(h)
            self.cedges[yid].remove(sid)
        asg.clear()
        G.turn_off(self.svx[sid])

    def _delete_x(self, oid: int) -> None:
        G = self.G
        G.remove_dyn_edge(self.aedge.pop(oid))
        G.turn_off(self.ovx[oid])
        for sid in self.member_of.pop(oid):
            self.xlive[sid] -= 1
            if self.xlive[sid] == 0:
                self._drop_subset(sid)
        del self.X[oid]
        for side in self.blocks.delete_object(oid):
            self._split_off([o for o in side if o != oid])
        cv = self.compv.pop(oid)
        self._shrink(cv)
        del self.ovx[oid]

    def _shrink(self, cv: int) -> None:
        self.comp_size[cv] -= 1
        if self.comp_size[cv] == 0:
            del self.comp_size[cv]
            self.G.turn_off(cv)
            self.free_comp.append(cv)

    def _split_off(self, side: list[int]) -> None:
        """Move the (smaller) side of a split onto a fresh component vertex."""
        if not side:
            return
        G = self.G
        if self.free_comp:
            cv = self.free_comp.pop()
        else:
            cv = G.add_vertex()
        G.turn_on(cv)
        self.comp_size[cv] = 0
        for o in side:
            G.remove_dyn_edge(self.aedge[o])
            self.aedge[o] = G.add_dyn_edge(cv, self.ovx[o])
            old = self.compv[o]
            self.compv[o] = cv
            self.comp_size[cv] += 1
            self._shrink(old)
        self.counters.component_splits += 1

    # -- queries -----------------------------------------------------------

    def connected(self, id1: int, id2: int) -> bool:
        for i in (id1, id2):
            if i not in self:
                raise UnknownError(f"unknown object {i}")
        if id1 == id2:
            return True
        return self.G.connected(self.ovx[id1], self.ovx[id2])

    # -- audits ------------------------------------------------------------

    def _edge_ends(self, h: int) -> tuple[int, int]:
        z = self.G.dyn_edge_vertex(h)
        ends = sorted(self.G.adj[z])
        if len(ends) != 2:
            raise AssertionError(f"simulated edge {h} has endpoints {ends}")
        return ends[0], ends[1]

    def typed_edges(self) -> dict[str, set[tuple[int, int]]]:
        """Maintained edges of G by type, as (object-or-vertex, vertex) pairs."""
        out = {"a": set(), "b": set(), "c": set(), "d": set()}
        for oid, h in self.aedge.items():
            out["a"].add(self._edge_ends(h))
        G = self.G
        for u, v in G.base.edges:
            if G.is_active(v):
                out["b"].add((u, v))
        for sid, asg in enumerate(self.assigned):
            for yid, h in asg.items():
                out["c"].add(self._edge_ends(h))
        for a, nb in self.dedges.items():
            for b, h in nb.items():
                out["d"].add(self._edge_ends(h))
        return out

    def expected_typed_edges(self) -> dict[str, set[tuple[int, int]]]:
        """The same edge sets rebuilt from X, Y, the collection and the components."""
        ovx = self.ovx
        out = {"a": set(), "b": set(), "c": set(), "d": set()}
        comp_vertex: dict[frozenset, int] = {}
        for part in self.blocks.components():
            cvs = {self.compv[o] for o in part}
            if len(cvs) != 1:
                raise AssertionError(f"component {sorted(part)} spread over vertices {sorted(cvs)}")
            cv = cvs.pop()
            if cv in comp_vertex.values():
                raise AssertionError(f"component vertex {cv} shared by two components")
            comp_vertex[part] = cv
            for o in part:
                out["a"].add(tuple(sorted((cv, ovx[o]))))
        for sid, members in enumerate(self.coll.subsets):
            for o in members:
                if o in self.X:
                    out["b"].add((self.svx[sid], ovx[o]))
        for yid, obj in self.Y.items():
            if self.coll.n:
                for sid in self.coll.query(obj):
                    if any(o in self.X for o in self.coll.subsets[sid]):
                        out["c"].add(tuple(sorted((ovx[yid], self.svx[sid]))))
        ys = sorted(self.Y)
        for i, a in enumerate(ys):
            for b in ys[i + 1 :]:
                if self.Y[a].intersects(self.Y[b]):
                    out["d"].add(tuple(sorted((ovx[a], ovx[b]))))
        return out

    def check_invariants(self) -> None:
        if set(self.X) != set(self.blocks.objects):
            raise AssertionError("X differs from the block structure's object set")
        if len(self.Y) > self.y:
            raise AssertionError(f"|Y|={len(self.Y)} exceeds y={self.y}")
        got, want = self.typed_edges(), self.expected_typed_edges()
        for t in "abcd":
            if got[t] != want[t]:
                raise AssertionError(f"type ({t}) edges differ: extra {got[t] - want[t]}, missing {want[t] - got[t]}")
        self.check_activation()
        self.blocks.check_invariants()

    def check_activation(self) -> None:
        G = self.G
        for sid, asg in enumerate(self.assigned):
            live = sum(o in self.X for o in self.coll.subsets[sid])
            if live != self.xlive[sid]:
                raise AssertionError(f"subset {sid}: live member count drift")
            if G.is_active(self.svx[sid]) != bool(asg):
                raise AssertionError(f"subset {sid}: active={G.is_active(self.svx[sid])} with {len(asg)} assignments")
        for oid in [*self.X, *self.Y]:
            if not G.is_active(self.ovx[oid]):
                raise AssertionError(f"object {oid} vertex inactive")
        for cv in self.comp_size:
            if not G.is_active(cv):
                raise AssertionError(f"component vertex {cv} inactive")

    def edge_counts(self) -> dict[str, int]:
        return {
            "a": len(self.aedge),
            "b": sum(len(s) for s in self.coll.subsets),
            "c": sum(len(a) for a in self.assigned),
            "d": sum(len(nb) for nb in self.dedges.values()) // 2,
        }

    def edge_budgets(self) -> dict[str, int]:
        """Declared caps: (c) <= |Y| * per-query subset bound, (d) <= |Y|^2."""
        ny = len(self.Y)
        return {
            "a": self.n_phase,
            "b": self.coll.s_bound(),
            "c": ny * self.coll.query_count_bound(),
            "d": ny * ny,
        }


def new(provider: str = BOXES, b=None, counters: Counters | None = None) -> GeomState:
    return GeomState(provider, b, counters)
