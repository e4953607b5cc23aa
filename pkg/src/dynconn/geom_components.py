"""Connected components of an object set under block insertions and single deletions.

The objects are vertices of a multigraph ``H`` kept in a :class:`DynForest`.
Inserting a block builds a canonical collection over all current objects and
assigns every new object ``z`` to each subset of ``C_z``.  Each subset that got
an assignment becomes a *path record*: its members followed by its assignees,
linked consecutively in ``H``.  Every member of such a subset meets every
assignee, so the path never connects objects that are not geometrically
connected, and every intersecting pair involving a new object shares a path.

Deleting an object splices it out of each path (link the neighbours, then cut
the two old edges).  A path is torn down completely once it has no assignee
left or no member left: assignees need not meet one another, so they are only
known to be connected while some member survives.
"""

from __future__ import annotations

from typing import Iterable

from .core import GeomObject, StateError, UnknownError
from .dyn_edge_conn import DynForest
from .range_provider import BOXES, CanonicalCollection


class PathRecord:
    """One materialised canonical subset: a linked path in ``H``.

    Entries are H-vertex ids.  ``nxt``/``prv`` describe the alive entries in
    path order; ``eid[x]`` is the edge joining ``x`` to ``nxt[x]``.
    """

    __slots__ = ("order", "nxt", "prv", "eid", "assignees", "assigned", "members", "initial_length", "edge_deletions", "alive")

    def __init__(self, entries: list[int], members: set[int], assignees: set[int]):
        self.order = entries
        self.nxt: dict[int, int | None] = {}
        self.prv: dict[int, int | None] = {}
        for i, x in enumerate(entries):
            self.prv[x] = entries[i - 1] if i else None
            self.nxt[x] = entries[i + 1] if i + 1 < len(entries) else None
        self.eid: dict[int, int] = {}
        self.assignees = set(assignees)
        self.assigned = len(assignees)
        self.members = set(members)
        self.initial_length = len(entries)
        self.edge_deletions = 0
        self.alive = True

    @property
    def length(self) -> int:
        return len(self.nxt)

    def entries(self) -> list[int]:
        return [x for x in self.order if x in self.nxt]


class BlockState:
    """Component structure for a set of boxes, updated by blocks and deletions.

    >>> st = BlockState()
    >>> st.insert_block([GeomObject.box(0, (0, 2)), GeomObject.box(1, (1, 3))])
    >>> st.connected(0, 1)
    True
    """

    def __init__(self, provider: str = BOXES):
        self.provider = provider
        self.H = DynForest()
        self.objects: dict[int, GeomObject] = {}
        self.hv: dict[int, int] = {}  # object id -> H vertex
        self.hobj: dict[int, int] = {}  # H vertex -> object id (live only)
        self.records: list[PathRecord] = []
        self.refs: dict[int, list[int]] = {}  # H vertex -> record indices
        self.blocks = 0
        self.d: int | None = None

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, oid: int) -> bool:
        return oid in self.objects

    # -- updates -----------------------------------------------------------

    def insert_block(self, block: Iterable[GeomObject], collection: CanonicalCollection | None = None) -> None:
        """Add ``block``; ``collection`` may be passed if already built over the union."""
        block = list(block)
        seen = set()
        for o in block:
            if o.id in self.objects or o.id in seen:
                raise StateError(f"duplicate object id {o.id}")
            if self.d is None:
                self.d = o.d
            elif o.d != self.d:
                raise ValueError(f"object {o.id} has dimension {o.d}, expected {self.d}")
            seen.add(o.id)
        if not block:
            return
        self.blocks += 1
        for o in block:
            self.objects[o.id] = o
            x = self.H.add_vertex()
            self.hv[o.id] = x
            self.hobj[x] = o.id
            self.refs[x] = []
        coll = collection
        if coll is None:
            coll = CanonicalCollection(self.objects.values(), self.provider)
        elif coll.n != len(self.objects):
            raise ValueError("collection does not cover the current object set")
        assigned: dict[int, list[int]] = {}
        for o in block:
            for sid in coll.query(o):
                assigned.setdefault(sid, []).append(o.id)
        H, hv = self.H, self.hv
        for sid in sorted(assigned):
            entries = [hv[i] for i in coll.subsets[sid]]
            present = set(entries)
            assignees = {hv[i] for i in assigned[sid]}
            entries.extend(hv[i] for i in assigned[sid] if hv[i] not in present)
            rec = PathRecord(entries, present, assignees)
            ri = len(self.records)
            self.records.append(rec)
            for a, b in zip(entries, entries[1:]):
                rec.eid[a] = H.link(a, b)
            for x in entries:
                self.refs[x].append(ri)

    def delete_object(self, oid: int) -> list[tuple[int, ...]]:
        """Remove ``oid``; return the smaller side of every component split, in order.

        Each side is a tuple of object ids; it may include ``oid`` itself
        because ``oid`` is isolated only after its last path is spliced.
        """
        if oid not in self.objects:
            raise UnknownError(f"unknown object {oid}")
        x = self.hv[oid]
        splits: list[tuple[int, ...]] = []
        for ri in self.refs.pop(x):
            rec = self.records[ri]
            if not rec.alive:
                continue
            self._splice(rec, x, splits)
            rec.members.discard(x)
            if x in rec.assignees:
                rec.assignees.discard(x)
                rec.assigned -= 1
            if rec.assigned == 0 or not rec.members:
                self._tear_down(rec, splits)
        del self.objects[oid]
        del self.hv[oid]
        del self.hobj[x]
        return splits

    def _cut(self, rec: PathRecord, eid: int, splits: list) -> None:
        rep = self.H.cut(eid)
        rec.edge_deletions += 1
        if rep.split:
            splits.append(tuple(self.hobj[v] for v in rep.smaller if v in self.hobj))

    def _splice(self, rec: PathRecord, x: int, splits: list) -> None:
        p, n = rec.prv.pop(x), rec.nxt.pop(x)
        if p is not None:
            rec.nxt[p] = n
        if n is not None:
            rec.prv[n] = p
        # link around x first so the cuts below never split p from n
        old_p = rec.eid.pop(p, None) if p is not None else None
        old_n = rec.eid.pop(x, None)
        if p is not None and n is not None:
            rec.eid[p] = self.H.link(p, n)
        if old_p is not None:
            self._cut(rec, old_p, splits)
        if old_n is not None:
            self._cut(rec, old_n, splits)

    def _tear_down(self, rec: PathRecord, splits: list) -> None:
        for a in list(rec.eid):
            self._cut(rec, rec.eid.pop(a), splits)
        rec.alive = False

    # -- queries -----------------------------------------------------------

    def connected(self, id1: int, id2: int) -> bool:
        for i in (id1, id2):
            if i not in self.objects:
                raise UnknownError(f"unknown object {i}")
        return id1 == id2 or self.H.connected(self.hv[id1], self.hv[id2])

    def component_ids(self, oid: int) -> list[int]:
        if oid not in self.objects:
            raise UnknownError(f"unknown object {oid}")
        return [self.hobj[v] for v in self.H.iter_component(self.H.component_of(self.hv[oid]))]

    def components(self) -> list[frozenset[int]]:
        """Partition of the live objects, ordered by smallest id."""
        parts = []
        for comp in self.H.components():
            ids = frozenset(self.hobj[v] for v in comp if v in self.hobj)
            if ids:
                parts.append(ids)
        parts.sort(key=min)
        return parts

    # -- audits ------------------------------------------------------------

    def live_edges(self) -> int:
        return sum(len(r.eid) for r in self.records)

    def check_invariants(self) -> None:
        H = self.H
        for ri, rec in enumerate(self.records):
            ents = rec.entries()
            if rec.edge_deletions > 2 * rec.initial_length:
                raise AssertionError(f"record {ri}: {rec.edge_deletions} edge deletions > 2x{rec.initial_length}")
            if rec.assigned != len(rec.assignees):
                raise AssertionError(f"record {ri}: assigned count drift")
            if not rec.alive or rec.assigned == 0 or not rec.members:
                if rec.eid:
                    raise AssertionError(f"record {ri}: unassigned path still has edges")
                continue
            if len(rec.eid) != len(ents) - 1:
                raise AssertionError(f"record {ri}: {len(rec.eid)} edges for {len(ents)} entries")
            for a, b in zip(ents, ents[1:]):
                e = rec.eid.get(a)
                if e is None or not H.is_live(e) or set(H.edge_endpoints(e)) != {a, b}:
                    raise AssertionError(f"record {ri}: consecutive entries {a},{b} not linked")
        for x, ris in self.refs.items():
            for ri in ris:
                rec = self.records[ri]
                if rec.alive and x not in rec.nxt:
                    raise AssertionError(f"back-reference of vertex {x} to record {ri} is stale")
