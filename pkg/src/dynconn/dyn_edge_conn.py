"""Fully dynamic connectivity under edge updates.

Holm, de Lichtenberg and Thorup's level scheme: every edge carries a level,
forest ``F_i`` spans the edges of level >= i, and each ``F_i`` is stored as
Euler tours in splay trees.  Updates cost amortized O(log^2 n) tree
operations.  Splay trees keep everything deterministic.

Each Euler tour holds one node per vertex and two arc nodes per tree edge.
Aggregates per splay subtree: vertex count, node count, weight sum, and two
flags (some vertex with non-tree edges at this level; some tree edge whose
level equals this level).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import StaleHandleError, UnknownError


class _Node:
    __slots__ = ("l", "r", "p", "vx", "eid", "nv", "nn", "w", "ws", "fnt", "fte", "ant", "ate")

    def __init__(self, vx: int = -1, eid: int = -1, w=0, fte: bool = False):
        self.l = self.r = self.p = None
        self.vx = vx
        self.eid = eid
        self.w = w
        self.ws = w
        self.nv = 1 if vx >= 0 else 0
        self.nn = 1
        self.fnt = False
        self.ant = False
        self.fte = fte
        self.ate = fte


def _pull(x: _Node) -> None:
    l, r = x.l, x.r
    nv = 1 if x.vx >= 0 else 0
    nn = 1
    ws = x.w
    ant = x.fnt
    ate = x.fte
    if l is not None:
        nv += l.nv
        nn += l.nn
        ws += l.ws
        ant = ant or l.ant
        ate = ate or l.ate
    if r is not None:
        nv += r.nv
        nn += r.nn
        ws += r.ws
        ant = ant or r.ant
        ate = ate or r.ate
    x.nv = nv
    x.nn = nn
    x.ws = ws
    x.ant = ant
    x.ate = ate


def _rotate(x: _Node) -> None:
    p = x.p
    g = p.p
    if p.l is x:
        b = x.r
        p.l = b
        x.r = p
    else:
        b = x.l
        p.r = b
        x.l = p
    if b is not None:
        b.p = p
    p.p = x
    x.p = g
    if g is not None:
        if g.l is p:
            g.l = x
        else:
            g.r = x
    _pull(p)


def _splay(x: _Node) -> int:
    """Splay ``x`` to the root of its tree; returns the number of rotations."""
    rot = 0
    while x.p is not None:
        p = x.p
        g = p.p
        if g is None:
            _rotate(x)
            rot += 1
        elif (g.l is p) == (p.l is x):
            _rotate(p)
            _rotate(x)
            rot += 2
        else:
            _rotate(x)
            _rotate(x)
            rot += 2
    _pull(x)
    return rot


def _collect_vertices(root: _Node | None) -> list[int]:
    out = []
    stack = [root] if root is not None else []
    while stack:
        x = stack.pop()
        if x.vx >= 0:
            out.append(x.vx)
        if x.l is not None:
            stack.append(x.l)
        if x.r is not None:
            stack.append(x.r)
    return out


def _build_balanced(seq: Sequence[_Node], lo: int, hi: int) -> _Node | None:
    if lo >= hi:
        return None
    mid = (lo + hi) >> 1
    x = seq[mid]
    x.l = _build_balanced(seq, lo, mid)
    x.r = _build_balanced(seq, mid + 1, hi)
    if x.l is not None:
        x.l.p = x
    if x.r is not None:
        x.r.p = x
    _pull(x)
    return x


class _Level:
    __slots__ = ("nodes", "arcs", "nt")

    def __init__(self):
        self.nodes: dict[int, _Node] = {}
        self.arcs: dict[int, tuple[_Node, _Node]] = {}
        self.nt: dict[int, set[int]] = {}


class _Edge:
    __slots__ = ("u", "v", "level", "tree")

    def __init__(self, u: int, v: int):
        self.u = u
        self.v = v
        self.level = 0
        self.tree = False


@dataclass(frozen=True)
class SplitReport:
    """Outcome of :meth:`DynForest.cut`.

    When ``split`` is true, ``smaller`` lists (ascending) the vertices of the
    smaller resulting component; on equal sizes it is the side that does not
    hold the smaller minimum vertex id.  ``larger_vertex`` is any vertex of
    the other side.
    """

    split: bool
    smaller: tuple[int, ...] = ()
    larger_vertex: int = -1
    larger_size: int = 0


@dataclass(frozen=True)
class ComponentHandle:
    """Stable token for one component, valid until the next structural update."""

    token: object = field(repr=False)
    size: int
    weight: float
    version: int = field(repr=False)


class DynForest:
    """Dynamic connectivity over a growable vertex set and an edge multiset.

    >>> f = DynForest()
    >>> a, b = f.add_vertex(), f.add_vertex()
    >>> e = f.link(a, b)
    >>> f.connected(a, b)
    True
    >>> f.cut(e).split
    True
    """

    def __init__(self):
        self._levels: list[_Level] = [_Level()]
        self._edges: dict[int, _Edge] = {}
        self._next_eid = 0
        self._n = 0
        self._version = 0
        self.rotations = 0

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def edge_endpoints(self, eid: int) -> tuple[int, int]:
        e = self._edges.get(eid)
        if e is None:
            raise StaleHandleError(f"edge {eid} is not live")
        return e.u, e.v

    def is_live(self, eid: int) -> bool:
        return eid in self._edges

    def _check_vertex(self, u: int) -> None:
        if not (0 <= u < self._n):
            raise UnknownError(f"unknown vertex {u}")

    # -- splay helpers -----------------------------------------------------

    def _sp(self, x: _Node) -> _Node:
        self.rotations += _splay(x)
        return x

    def _node(self, i: int, v: int) -> _Node:
        nodes = self._levels[i].nodes
        x = nodes.get(v)
        if x is None:
            x = nodes[v] = _Node(vx=v)
        return x

    def _same(self, x: _Node, y: _Node) -> bool:
        if x is y:
            return True
        self._sp(x)
        self._sp(y)
        return x.p is not None

    def _join(self, a: _Node | None, b: _Node | None) -> _Node | None:
        if a is None:
            return b
        if b is None:
            return a
        m = a
        while m.r is not None:
            m = m.r
        self._sp(m)
        m.r = b
        b.p = m
        _pull(m)
        return m

    def _reroot(self, x: _Node) -> _Node:
        self._sp(x)
        left = x.l
        if left is None:
            return x
        left.p = None
        x.l = None
        _pull(x)
        return self._join(x, left)

    def _ett_link(self, i: int, u: int, v: int, eid: int, mark: bool) -> None:
        lvl = self._levels[i]
        ru = self._reroot(self._node(i, u))
        rv = self._reroot(self._node(i, v))
        a = _Node(eid=eid, fte=mark)
        b = _Node(eid=eid)
        lvl.arcs[eid] = (a, b)
        self._join(self._join(ru, a), self._join(rv, b))

    def _ett_cut(self, i: int, eid: int) -> None:
        a, b = self._levels[i].arcs.pop(eid)
        self._sp(a)
        pa = a.l.nn if a.l is not None else 0
        self._sp(b)
        pb = b.l.nn if b.l is not None else 0
        if pa > pb:
            a, b = b, a
        self._sp(a)
        left, right = a.l, a.r
        if left is not None:
            left.p = None
        right.p = None  # b lies to the right of a
        a.l = a.r = None
        self._sp(b)
        mid, tail = b.l, b.r
        if mid is not None:
            mid.p = None
        if tail is not None:
            tail.p = None
        b.l = b.r = None
        self._join(left, tail)

    def _set_nt_flag(self, i: int, v: int) -> None:
        x = self._node(i, v)
        self._sp(x)
        x.fnt = bool(self._levels[i].nt.get(v))
        _pull(x)

    def _nt_add(self, i: int, eid: int, e: _Edge) -> None:
        nt = self._levels[i].nt
        for x in (e.u, e.v):
            s = nt.get(x)
            if s is None:
                s = nt[x] = set()
            s.add(eid)
            if len(s) == 1:
                self._set_nt_flag(i, x)

    def _nt_remove(self, i: int, eid: int, e: _Edge) -> None:
        nt = self._levels[i].nt
        for x in (e.u, e.v):
            s = nt[x]
            s.discard(eid)
            if not s:
                del nt[x]
                self._set_nt_flag(i, x)

    def _find_te(self, root: _Node) -> _Node:
        x = root
        while True:
            if x.l is not None and x.l.ate:
                x = x.l
            elif x.fte:
                return x
            else:
                x = x.r

    def _find_nt(self, root: _Node) -> _Node:
        x = root
        while True:
            if x.l is not None and x.l.ant:
                x = x.l
            elif x.fnt:
                return x
            else:
                x = x.r

    # -- public API --------------------------------------------------------

    def add_vertex(self, weight=0) -> int:
        v = self._n
        self._n += 1
        self._levels[0].nodes[v] = _Node(vx=v, w=weight)
        self._version += 1
        return v

    def weight(self, v: int):
        self._check_vertex(v)
        return self._levels[0].nodes[v].w

    def set_weight(self, v: int, weight) -> None:
        self._check_vertex(v)
        x = self._sp(self._levels[0].nodes[v])
        x.w = weight
        _pull(x)

    def link(self, u: int, v: int) -> int:
        """Insert edge ``uv``; returns its handle.  Self-loops and parallels are accepted."""
        self._check_vertex(u)
        self._check_vertex(v)
        eid = self._next_eid
        self._next_eid += 1
        e = self._edges[eid] = _Edge(u, v)
        self._version += 1
        if u == v:
            return eid
        nodes = self._levels[0].nodes
        if self._same(nodes[u], nodes[v]):
            self._nt_add(0, eid, e)
        else:
            e.tree = True
            self._ett_link(0, u, v, eid, True)
        return eid

    def cut(self, eid: int) -> SplitReport:
        e = self._edges.pop(eid, None)
        if e is None:
            raise StaleHandleError(f"edge {eid} is not live")
        self._version += 1
        if e.u == e.v:
            return SplitReport(False)
        if not e.tree:
            self._nt_remove(e.level, eid, e)
            return SplitReport(False)
        u, v, top = e.u, e.v, e.level
        for i in range(top + 1):
            self._ett_cut(i, eid)
        for i in range(top, -1, -1):
            if self._replace(i, u, v):
                return SplitReport(False)
        return self._split_report(u, v)

    def _replace(self, i: int, u: int, v: int) -> bool:
        levels = self._levels
        xu = self._sp(self._node(i, u))
        su = xu.nv
        xv = self._sp(self._node(i, v))
        sv = xv.nv
        small = xu if su <= sv else xv
        root = self._sp(small)
        if len(levels) <= i + 1:
            levels.append(_Level())
        # push this level's tree edges of the smaller tree one level up
        while root.ate:
            x = self._sp(self._find_te(root))
            x.fte = False
            _pull(x)
            f = self._edges[x.eid]
            f.level = i + 1
            self._ett_link(i + 1, f.u, f.v, x.eid, True)
            root = self._sp(x)
        nt = levels[i].nt
        while root.ant:
            x = self._sp(self._find_nt(root))
            vx = x.vx
            for g in sorted(nt[vx]):
                f = self._edges[g]
                other = f.v if f.u == vx else f.u
                self._nt_remove(i, g, f)
                if self._same(self._node(i, other), x):
                    f.level = i + 1
                    if len(levels) <= i + 1:
                        levels.append(_Level())
                    self._nt_add(i + 1, g, f)
                else:
                    f.tree = True
                    for j in range(i + 1):
                        self._ett_link(j, f.u, f.v, g, j == i)
                    return True
            root = self._sp(x)
        return False

    def _split_report(self, u: int, v: int) -> SplitReport:
        nodes = self._levels[0].nodes
        ru = self._sp(nodes[u])
        su = ru.nv
        rv = self._sp(nodes[v])
        sv = rv.nv
        if su != sv:
            small, big, sbig = (ru, v, sv) if su < sv else (rv, u, su)
            verts = _collect_vertices(self._sp(small))
        else:
            vu = _collect_vertices(self._sp(nodes[u]))
            vv = _collect_vertices(self._sp(nodes[v]))
            if min(vu) < min(vv):
                verts, big, sbig = vv, u, su
            else:
                verts, big, sbig = vu, v, sv
        verts.sort()
        return SplitReport(True, tuple(verts), big, sbig)

    def connected(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        nodes = self._levels[0].nodes
        return self._same(nodes[u], nodes[v])

    def component_size(self, u: int) -> int:
        self._check_vertex(u)
        return self._sp(self._levels[0].nodes[u]).nv

    def component_of(self, u: int) -> ComponentHandle:
        self._check_vertex(u)
        x = self._sp(self._levels[0].nodes[u])
        while x.l is not None:
            x = x.l
        self._sp(x)
        return ComponentHandle(x, x.nv, x.ws, self._version)

    def iter_component(self, h: ComponentHandle) -> Iterator[int]:
        if h.version != self._version:
            raise StaleHandleError("component handle is stale")
        return iter(sorted(_collect_vertices(self._sp(h.token))))

    def components(self) -> list[list[int]]:
        """All components as ascending vertex lists, ordered by minimum vertex."""
        seen = bytearray(self._n)
        out = []
        nodes = self._levels[0].nodes
        for v in range(self._n):
            if seen[v]:
                continue
            comp = sorted(_collect_vertices(self._sp(nodes[v])))
            for x in comp:
                seen[x] = 1
            out.append(comp)
        return out

    def tree_edge_levels(self) -> dict[int, int]:
        return {eid: e.level for eid, e in self._edges.items() if e.tree}

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[tuple[int, int]], weights: Sequence | None = None
    ) -> tuple["DynForest", list[int]]:
        """Bulk construction in O((n + m) log n); returns the forest and edge handles in input order."""
        f = cls()
        nodes = f._levels[0].nodes
        for v in range(n):
            nodes[v] = _Node(vx=v, w=weights[v] if weights is not None else 0)
        f._n = n
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        eids = []
        tree_adj: dict[int, list[tuple[int, int]]] = {}
        nt = f._levels[0].nt
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise UnknownError(f"edge ({u}, {v}) outside the vertex range")
            eid = f._next_eid
            f._next_eid += 1
            eids.append(eid)
            e = f._edges[eid] = _Edge(u, v)
            if u == v:
                continue
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                e.tree = True
                tree_adj.setdefault(u, []).append((v, eid))
                tree_adj.setdefault(v, []).append((u, eid))
            else:
                nt.setdefault(u, set()).add(eid)
                nt.setdefault(v, set()).add(eid)
        for x in nt:
            nodes[x].fnt = True
            _pull(nodes[x])
        arcs = f._levels[0].arcs
        visited = bytearray(n)
        for root in range(n):
            if visited[root]:
                continue
            visited[root] = 1
            seq = [nodes[root]]
            stack = [(root, iter(tree_adj.get(root, ())), None)]
            while stack:
                x, it, closing = stack[-1]
                for y, eid in it:
                    if visited[y]:
                        continue
                    visited[y] = 1
                    a = _Node(eid=eid, fte=True)
                    b = _Node(eid=eid)
                    arcs[eid] = (a, b)
                    seq.append(a)
                    seq.append(nodes[y])
                    stack.append((y, iter(tree_adj.get(y, ())), b))
                    break
                else:
                    stack.pop()
                    if closing is not None:
                        seq.append(closing)
            _build_balanced(seq, 0, len(seq))
        return f, eids
