"""Offline dynamic connectivity, where the whole update sequence is known upfront.

Subgraph version: the update sequence is cut into phases of ``q`` low-vertex
updates.  In a phase the vertices that will be touched (plus every high
vertex) form ``Q0``; everything else active is ``P`` and stays fixed.  Only the
entries ``C[u, v]`` with ``u`` high are needed, and since ``P`` is static they
are Boolean, so one sparse Boolean product of incidence matrices computes them.

Geometric version: phases of ``q`` object updates.  Objects touched in the
phase form ``Y0``; the rest is ``X``.  A static graph ``G`` over objects,
components of ``X`` and the big canonical subsets is built per phase, and each
object update becomes a constant number of vertex updates in ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    BaseGraph,
    ConfigError,
    Counters,
    GeomObject,
    StaleHandleError,
    StateError,
    TraceEvent,
    UnknownError,
    ceil_pow,
)
from .dyn_edge_conn import DynForest
from .geom_components import BlockState
from .range_provider import BOXES, CanonicalCollection

DEFAULT_ALPHA = Fraction(147, 500)
WORD = 64


# ---------------------------------------------------------------------------
# Boolean matrices
# ---------------------------------------------------------------------------


class BoolMatrix:
    """Bit-packed Boolean matrix; row ``i`` is the Python int ``data[i]``."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[int] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [0] * rows
        else:
            if len(data) != rows:
                raise ValueError("row count mismatch")
            limit = 1 << cols
            for r in data:
                if r < 0 or r >= limit:
                    raise ValueError("row has bits beyond the column count")
            self.data = list(data)

    @classmethod
    def from_dense(cls, m: Sequence[Sequence]) -> "BoolMatrix":
        rows = len(m)
        cols = len(m[0]) if rows else 0
        data = []
        for r in m:
            if len(r) != cols:
                raise ValueError("ragged matrix")
            data.append(sum(1 << j for j, x in enumerate(r) if x))
        return cls(rows, cols, data)

    @classmethod
    def from_pairs(cls, rows: int, cols: int, ones: Iterable[tuple[int, int]]) -> "BoolMatrix":
        data = [0] * rows
        for i, j in ones:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i}, {j}) outside {rows}x{cols}")
            data[i] |= 1 << j
        return cls(rows, cols, data)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @property
    def ones(self) -> int:
        return sum(r.bit_count() for r in self.data)

    def get(self, i: int, j: int) -> bool:
        return bool(self.data[i] >> j & 1)

    def to_dense(self) -> list[list[int]]:
        return [[r >> j & 1 for j in range(self.cols)] for r in self.data]

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.data) for j in _bits(r)]

    def column_counts(self) -> list[int]:
        counts = [0] * self.cols
        for r in self.data:
            for j in _bits(r):
                counts[j] += 1
        return counts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.data) == (other.rows, other.cols, other.data)

    def __repr__(self) -> str:
        return f"BoolMatrix({self.rows}x{self.cols}, ones={self.ones})"


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _words(cols: int) -> int:
    return max(1, -(-cols // WORD))


def bool_matmul_dense(A: BoolMatrix, B: BoolMatrix, counters: Counters | None = None) -> BoolMatrix:
    """OR of the rows of ``B`` selected by each row of ``A``, one word-parallel OR each."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    out = []
    ops = 0
    bd = B.data
    for r in A.data:
        acc = 0
        for j in _bits(r):
            acc |= bd[j]
            ops += 1
        out.append(acc)
    if counters is not None:
        counters.bit_ops += ops * _words(B.cols)
    return BoolMatrix(A.rows, B.cols, out)


def split_middle(A: BoolMatrix, t: int) -> tuple[list[int], list[int]]:
    """Middle indices with at least ``t`` ones in their column of ``A`` (high), and the other nonzero ones."""
    counts = A.column_counts()
    high = [j for j, c in enumerate(counts) if c >= t]
    low = [j for j, c in enumerate(counts) if 0 < c < t]
    return high, low


def bool_matmul_sparse(A: BoolMatrix, B: BoolMatrix, t: int, counters: Counters | None = None) -> BoolMatrix:
    """Product via the high/low split of the middle index.

    High middle indices (at most ones(A)/t of them) go through the dense kernel
    on the restricted matrices.  For a low index ``j`` every one ``(j, k)`` of
    ``B`` is combined with the fewer than ``t`` rows ``i`` having ``A[i, j]``.
    """
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    m1 = A.ones
    if not 1 <= t <= max(m1, 1):
        raise ValueError(f"threshold t={t} outside [1, {max(m1, 1)}]")
    high, low = split_middle(A, t)
    # dense part on the high columns only
    pos = {j: k for k, j in enumerate(high)}
    a_high = []
    for r in A.data:
        packed = 0
        for j in _bits(r):
            k = pos.get(j)
            if k is not None:
                packed |= 1 << k
        a_high.append(packed)
    dense = bool_matmul_dense(
        BoolMatrix(A.rows, len(high), a_high), BoolMatrix(len(high), B.cols, [B.data[j] for j in high]), counters
    )
    out = list(dense.data)
    # enumeration over low middle indices
    col_rows: dict[int, list[int]] = {j: [] for j in low}
    for i, r in enumerate(A.data):
        for j in _bits(r):
            if j in col_rows:
                col_rows[j].append(i)
    ops = 0
    for j in low:
        us = col_rows[j]
        for k in _bits(B.data[j]):
            bit = 1 << k
            for i in us:
                out[i] |= bit
                ops += 1
    if counters is not None:
        counters.bit_ops += ops
    return BoolMatrix(A.rows, B.cols, out)


def bool_matmul_reference(A: BoolMatrix, B: BoolMatrix) -> BoolMatrix:
    """Naive triple loop."""
    if A.cols != B.rows:
        raise ValueError("dimension mismatch")
    a, b = A.to_dense(), B.to_dense()
    c = [[int(any(a[i][j] and b[j][k] for j in range(A.cols))) for k in range(B.cols)] for i in range(A.rows)]
    return BoolMatrix.from_dense(c) if A.rows else BoolMatrix(0, B.cols)


def predicted_matmul_cost(n1: int, n3: int, m1: int, m2: int, t: int) -> int:
    """Word operations of the reduction: dense n1 x (m1/t) x n3 plus m2*t enumeration."""
    return n1 * -(-m1 // max(t, 1)) * _words(n3) + m2 * t


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OfflineConfig:
    q: int
    delta: int
    t: int
    alpha: Fraction = DEFAULT_ALPHA

    def validate(self, m: int) -> None:
        if not 1 <= self.delta <= self.q <= max(m, 1):
            raise ConfigError(f"need 1 <= delta={self.delta} <= q={self.q} <= m={max(m, 1)}")
        if self.t < 1:
            raise ConfigError("threshold t must be positive")


def subgraph_offline_config(m: int, delta: int | None = None) -> OfflineConfig:
    """Defaults for the subgraph version: delta = ceil(m^(1/3)), q = max(delta, ceil(m/delta)), t = ceil(delta^(1/2))."""
    m1 = max(m, 1)
    if delta is None:
        delta = max(1, ceil_pow(m1, Fraction(1, 3)))
    q = min(m1, max(delta, -(-m1 // delta)))
    return OfflineConfig(q, delta, max(1, ceil_pow(delta, Fraction(1, 2))))


def offline_exponents(b, alpha=DEFAULT_ALPHA) -> tuple[Fraction, Fraction]:
    """(update exponent, query exponent) of the offline geometric structure.

    >>> offline_exponents(1)
    (Fraction(1000, 1147), Fraction(294, 1147))
    """
    b, alpha = Fraction(b), Fraction(alpha)
    if not 0 < b <= 1:
        raise ConfigError(f"b={b} outside (0, 1]")
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha={alpha} outside (0, 1)")
    den = 1 + alpha - b * alpha / 2
    return (1 + alpha - b * alpha) / den, alpha / den


def geom_offline_params(n: int, b, alpha=DEFAULT_ALPHA) -> OfflineConfig:
    """q = ceil(n^(1/(1+alpha-b*alpha/2))), delta = ceil(q^alpha), t = ceil(delta^(b/2)), floors at 1."""
    b, alpha = Fraction(b), Fraction(alpha)
    offline_exponents(b, alpha)
    q = max(1, ceil_pow(max(n, 1), 1 / (1 + alpha - b * alpha / 2)))
    delta = max(1, ceil_pow(q, alpha))
    t = max(1, ceil_pow(delta, b / 2))
    return OfflineConfig(q, delta, t, alpha)


def geom_param_constraints(n: int, cfg: OfflineConfig, b) -> dict[str, bool]:
    """The parameter inequalities of the offline geometric analysis.

    Each value was rounded up from its real-valued target, so the checks use
    ``q - 1``, ``delta - 1`` and ``t - 1`` as lower bounds of those targets; at
    ``b = 1`` the target product ``q * t`` equals ``n`` exactly.
    """
    b = Fraction(b)
    n = max(n, 1)
    e = 1 - b  # q <= n / delta^(1-b) becomes (q-1)^k (delta-1)^j <= n^k with e = j/k
    q1, d1, t1 = cfg.q - 1, cfg.delta - 1, cfg.t - 1
    return {
        "delta<=q": cfg.delta <= cfg.q,
        "q<=n/delta^(1-b)": q1**e.denominator * d1**e.numerator <= n**e.denominator,
        "q<=n/t": q1 * t1 <= n,
    }


# ---------------------------------------------------------------------------
# One phase of the offline subgraph structure
# ---------------------------------------------------------------------------


class OfflinePhase:
    """Static ``P``, static ``Q0``, dynamic ``Q`` subset of ``Q0``.

    ``C[u, v]`` is kept only for high ``u`` and is a Boolean: some component of
    ``P`` touches both.  All components are treated as low, so ``G*`` has no
    edges to high components.
    """

    def __init__(
        self,
        g: BaseGraph,
        high: Iterable[int],
        q0: Iterable[int],
        active: Iterable[int],
        t: int | None = None,
        counters: Counters | None = None,
    ):
        self.g = g
        self.counters = counters if counters is not None else Counters()
        self.Q0 = sorted(set(q0))
        self.high = set(high)
        if not self.high <= set(self.Q0):
            raise ValueError("high vertices must belong to Q0")
        q0set = set(self.Q0)
        active = set(active)
        self.P = active - q0set
        self.Q: set[int] = set()

        # components of the subgraph induced by P
        parent = {v: v for v in self.P}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in g.edges:
            if u in parent and v in parent:
                a, b = find(u), find(v)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        roots = sorted({find(v) for v in self.P})
        cid = {r: k for k, r in enumerate(roots)}
        self.comp = {v: cid[find(v)] for v in self.P}
        self.ncomp = len(roots)

        # gamma: Q0 vertex -> adjacent components, and the reverse index
        self.gamma: dict[int, set[int]] = {v: set() for v in self.Q0}
        self.touch: list[list[int]] = [[] for _ in range(self.ncomp)]
        for v in self.Q0:
            for w in g.neighbors(v):
                c = self.comp.get(w)
                if c is not None and c not in self.gamma[v]:
                    self.gamma[v].add(c)
                    self.touch[c].append(v)
                    self.counters.gamma_updates += 1
        self.nbr: dict[int, set[int]] = {v: {w for w in g.neighbors(v) if w in q0set and w != v} for v in self.Q0}

        # restricted C via one sparse Boolean product
        self.hrows = sorted(self.high)
        hidx = {u: i for i, u in enumerate(self.hrows)}
        qidx = {v: k for k, v in enumerate(self.Q0)}
        A = BoolMatrix.from_pairs(len(self.hrows), self.ncomp, ((hidx[u], c) for u in self.hrows for c in self.gamma[u]))
        B = BoolMatrix.from_pairs(self.ncomp, len(self.Q0), ((c, qidx[v]) for v in self.Q0 for c in self.gamma[v]))
        m1 = A.ones
        if t is None:
            t = 1
        self.t = max(1, min(t, max(m1, 1)))
        self.cost = {"n1": A.rows, "n2": A.cols, "n3": B.cols, "m1": m1, "m2": B.ones, "t": self.t}
        self.cost["predicted"] = predicted_matmul_cost(A.rows, B.cols, m1, B.ones, self.t)
        before = self.counters.bit_ops
        Cm = bool_matmul_sparse(A, B, self.t, self.counters)
        self.cost["bit_ops"] = self.counters.bit_ops - before
        self.C: dict[int, set[int]] = {u: {self.Q0[k] for k in _bits(Cm.data[i])} - {u} for i, u in enumerate(self.hrows)}
        self.counters.c_updates += sum(len(s) for s in self.C.values())

        # G*: one node per Q0 vertex, then one per component
        self.gstar = DynForest()
        self.node = {v: self.gstar.add_vertex() for v in self.Q0}
        self.cnode = [self.gstar.add_vertex() for _ in range(self.ncomp)]
        self.edges: dict[tuple, int] = {}
        self.inc: dict[int, set[tuple]] = {}
        for v in sorted(active & q0set):
            self.activate(v)

    # -- G* maintenance ----------------------------------------------------

    def _add(self, key: tuple, a: int, b: int) -> None:
        self.edges[key] = self.gstar.link(a, b)
        self.inc.setdefault(a, set()).add(key)
        self.inc.setdefault(b, set()).add(key)
        self.counters.gstar_edge_updates += 1

    def _remove(self, key: tuple) -> None:
        eid = self.edges.pop(key)
        a, b = self.gstar.edge_endpoints(eid)
        self.inc[a].discard(key)
        self.inc[b].discard(key)
        self.gstar.cut(eid)
        self.counters.gstar_edge_updates += 1

    def _cval(self, u: int, v: int) -> bool:
        return (u in self.high and v in self.C[u]) or (v in self.high and u in self.C[v])

    def activate(self, v: int) -> None:
        if v not in self.node:
            raise StateError(f"vertex {v} is not in Q0 for this phase")
        if v in self.Q:
            raise StateError(f"vertex {v} already active")
        self.Q.add(v)
        nv = self.node[v]
        for w in self.nbr[v]:
            if w in self.Q:
                self._add(("c",) + tuple(sorted((v, w))), nv, self.node[w])
        if v in self.high:
            for w in self.C[v]:
                if w in self.Q:
                    self._add(("a",) + tuple(sorted((v, w))), nv, self.node[w])
        else:
            for u in self.hrows:
                if u in self.Q and v in self.C[u]:
                    self._add(("a",) + tuple(sorted((u, v))), nv, self.node[u])
            for c in sorted(self.gamma[v]):
                self._add(("b", v, c), nv, self.cnode[c])

    def deactivate(self, v: int) -> None:
        if v not in self.Q:
            raise StateError(f"vertex {v} is not active in Q")
        self.Q.discard(v)
        for key in sorted(self.inc.get(self.node[v], ())):
            self._remove(key)

    def is_active(self, v: int) -> bool:
        return v in self.P or v in self.Q

    def _rep(self, v: int):
        if v in self.Q:
            return self.node[v]
        c = self.comp[v]
        if self.inc.get(self.cnode[c]):
            return self.cnode[c]
        for u in self.touch[c]:
            if u in self.Q:
                return self.node[u]
        return ("iso", c)

    def connected(self, u: int, v: int) -> bool:
        if not (self.is_active(u) and self.is_active(v)):
            raise StateError("query endpoints must be active")
        if u == v:
            return True
        a, b = self._rep(u), self._rep(v)
        if isinstance(a, tuple) or isinstance(b, tuple):
            return a == b
        return self.gstar.connected(a, b)

    # -- audits ------------------------------------------------------------

    def brute_c_table(self) -> dict[int, set[int]]:
        return {u: {v for v in self.Q0 if v != u and self.gamma[u] & self.gamma[v]} for u in self.hrows}

    def check_invariants(self) -> None:
        if self.C != self.brute_c_table():
            raise AssertionError("restricted C-table differs from brute force")
        want = set()
        Q = self.Q
        for v in Q:
            for w in self.nbr[v]:
                if w in Q:
                    want.add(("c",) + tuple(sorted((v, w))))
            if v not in self.high:
                want.update(("b", v, c) for c in self.gamma[v])
        for u in self.hrows:
            if u in Q:
                want.update(("a",) + tuple(sorted((u, w))) for w in self.C[u] if w in Q)
        if want != set(self.edges):
            raise AssertionError("G* edges differ from their definition")
        if any(k[0] == "h" for k in self.edges):
            raise AssertionError("high-component edge present")


# ---------------------------------------------------------------------------
# Offline subgraph driver
# ---------------------------------------------------------------------------


def _lower_subgraph_trace(g: BaseGraph, events: Sequence[TraceEvent]) -> tuple[BaseGraph, list[tuple]]:
    """Validate the trace and turn dynamic edges into pre-created degree-2 vertices.

    Returns the augmented graph and a list of ``("on"|"off", v)`` / ``("conn", u, v)``.
    """
    n = g.n
    edges = list(g.edges)
    active: set[int] = set()
    live: dict[int, int] = {}
    low: list[tuple] = []
    for ev in events:
        k, a = ev.kind, ev.args
        if k == "on":
            if a[0] in active:
                raise StateError(f"vertex {a[0]} already active")
            active.add(a[0])
            low.append(("on", a[0]))
        elif k == "off":
            if a[0] not in active:
                raise StateError(f"vertex {a[0]} not active")
            active.discard(a[0])
            low.append(("off", a[0]))
        elif k == "conn":
            if a[0] not in active or a[1] not in active:
                raise StateError("query endpoints must be active")
            low.append(("conn", a[0], a[1]))
        elif k == "adde":
            u, v, h = a
            if u not in active or v not in active:
                raise StateError("dynamic edge endpoints must be active")
            if h in live:
                raise StateError(f"edge handle {h} already live")
            z = n
            n += 1
            edges.extend(((u, z), (z, v)))
            live[h] = z
            active.add(z)
            low.append(("on", z))
        elif k == "dele":
            z = live.pop(a[0], None)
            if z is None:
                raise StaleHandleError(f"dynamic edge handle {a[0]} is not live")
            active.discard(z)
            low.append(("off", z))
        else:
            raise ValueError(f"{k!r} is not a subgraph event")
    return BaseGraph(n, edges), low


def top_degree_vertices(g: BaseGraph, k: int) -> set[int]:
    """The ``k`` largest-degree vertices, ties broken by smaller id."""
    order = sorted(range(g.n), key=lambda v: (-g.degree[v], v))
    return set(order[:k])


def run_offline_subgraph(
    g: BaseGraph,
    events: Sequence[TraceEvent],
    cfg: OfflineConfig | None = None,
    high: Iterable[int] | None = None,
    initially_active: Iterable[int] = (),
    counters: Counters | None = None,
    audit: bool = False,
) -> list[bool]:
    """Answer every ``conn`` of a subgraph trace, processing it phase by phase."""
    counters = counters if counters is not None else Counters()
    init = set(initially_active)
    pre = [TraceEvent("on", (v,)) for v in sorted(init)]
    g2, low = _lower_subgraph_trace(g, pre + list(events))
    low = low[len(pre) :]
    if cfg is None:
        cfg = subgraph_offline_config(g2.m)
    cfg.validate(g2.m)
    hi = top_degree_vertices(g2, cfg.delta) if high is None else set(high)

    answers: list[bool] = []
    active = set(init)
    i = 0
    while i < len(low):
        # one phase: up to q low-vertex updates
        j, count, touched = i, 0, set()
        while j < len(low):
            op = low[j]
            if op[0] != "conn" and op[1] not in hi:
                if count == cfg.q:
                    break
                count += 1
                touched.add(op[1])
            j += 1
        phase = OfflinePhase(g2, hi, hi | touched, active, cfg.t, counters)
        if audit:
            phase.check_invariants()
        for op in low[i:j]:
            if op[0] == "on":
                phase.activate(op[1])
                active.add(op[1])
            elif op[0] == "off":
                phase.deactivate(op[1])
                active.discard(op[1])
            else:
                answers.append(phase.connected(op[1], op[2]))
            if audit:
                phase.check_invariants()
        i = j
    return answers


# ---------------------------------------------------------------------------
# Offline geometric driver
# ---------------------------------------------------------------------------


class _GeomPhase:
    """The static graph of one geometric phase and its offline subgraph structure."""

    def __init__(self, X: dict[int, GeomObject], y0: list[GeomObject], live_y: set[int], comps, cfg, provider, counters):
        # instance ids: X objects and Y0 instances share one namespace of serials
        self.coll = coll = CanonicalCollection([*X.values(), *y0], provider)
        n = coll.n
        big = [sid for sid in range(len(coll)) if len(coll.subsets[sid]) * cfg.delta > n]
        serials = sorted(X) + [o.id for o in y0]
        self.vx = {s: k for k, s in enumerate(serials)}
        nv = len(serials)
        cvx = list(range(nv, nv + len(comps)))
        nv += len(comps)
        self.svx = {sid: nv + k for k, sid in enumerate(big)}
        nv += len(big)
        y0ids = {o.id for o in y0}
        edges: list[tuple[int, int]] = []
        for cv, comp in zip(cvx, comps):  # (a)
            edges.extend((cv, self.vx[s]) for s in sorted(comp))
        self.members: dict[int, list[int]] = {}
        for sid in big:  # (b)
            self.members[sid] = list(coll.subsets[sid])
            edges.extend((self.svx[sid], self.vx[s]) for s in coll.subsets[sid])
        self.assigned_to: dict[int, list[int]] = {}
        self.member_of: dict[int, list[int]] = {s: [] for s in y0ids}
        for sid in big:
            for s in coll.subsets[sid]:
                if s in y0ids:
                    self.member_of[s].append(sid)
        self.assignees: dict[int, list[int]] = {sid: [] for sid in big}
        for o in y0:
            mine = []
            for sid in coll.query(o):
                if sid in self.svx:  # (c)
                    edges.append((self.vx[o.id], self.svx[sid]))
                    mine.append(sid)
                    self.assignees[sid].append(o.id)
                else:  # (d)
                    edges.extend((self.vx[o.id], self.vx[s]) for s in coll.subsets[sid] if s != o.id)
            self.assigned_to[o.id] = mine
        self.g = BaseGraph(nv, edges)
        self.live = set(X) | set(live_y)
        self.x_ids = set(X)
        self.big = big
        self.on_subsets = {sid for sid in big if self._want(sid)}
        high = set(self.svx.values())
        q0 = high | {self.vx[s] for s in y0ids}
        active = {self.vx[s] for s in self.live} | set(cvx) | {self.svx[sid] for sid in self.on_subsets}
        self.phase = OfflinePhase(self.g, high, q0, active, cfg.t, counters)

    def _want(self, sid: int) -> bool:
        """Active iff some live assignee and some live member exist."""
        live = self.live
        return any(s in live for s in self.assignees[sid]) and any(s in live for s in self.members[sid])

    def _refresh(self, sids: Iterable[int]) -> None:
        for sid in sorted(set(sids)):
            want = self._want(sid)
            if want and sid not in self.on_subsets:
                self.on_subsets.add(sid)
                self.phase.activate(self.svx[sid])
            elif not want and sid in self.on_subsets:
                self.on_subsets.discard(sid)
                self.phase.deactivate(self.svx[sid])

    def insert(self, s: int) -> None:
        self.live.add(s)
        self.phase.activate(self.vx[s])
        self._refresh(self.assigned_to[s] + self.member_of[s])

    def delete(self, s: int) -> None:
        self.live.discard(s)
        self.phase.deactivate(self.vx[s])
        self._refresh(self.assigned_to[s] + self.member_of[s])

    def connected(self, s1: int, s2: int) -> bool:
        return self.phase.connected(self.vx[s1], self.vx[s2])


def run_offline_geom(
    events: Sequence[TraceEvent],
    provider: str = BOXES,
    b=None,
    alpha=DEFAULT_ALPHA,
    counters: Counters | None = None,
    audit: bool = False,
) -> list[bool]:
    """Answer every ``conn`` of a geometric trace, processing it phase by phase."""
    counters = counters if counters is not None else Counters()
    if b is None:
        b = CanonicalCollection([], provider).b
    b = Fraction(b)
    if b == 0:
        b = Fraction(1)  # the brute provider's exponent only sizes phases here

    # validate and give every inserted instance a unique serial
    serial_of: dict[int, int] = {}
    inst: list[GeomObject] = []
    ops: list[tuple] = []
    d = None
    for ev in events:
        if ev.kind == "insert":
            o = ev.obj
            if o.id in serial_of:
                raise StateError(f"duplicate object id {o.id}")
            if d is None:
                d = o.d
            elif o.d != d:
                raise ValueError(f"object {o.id} has dimension {o.d}, expected {d}")
            s = len(inst)
            inst.append(GeomObject(s, o.lo, o.hi))
            serial_of[o.id] = s
            ops.append(("insert", s))
        elif ev.kind == "delete":
            s = serial_of.pop(ev.args[0], None)
            if s is None:
                raise UnknownError(f"unknown object {ev.args[0]}")
            ops.append(("delete", s))
        elif ev.kind == "conn":
            for i in ev.args:
                if i not in serial_of:
                    raise UnknownError(f"unknown object {i}")
            ops.append(("conn", serial_of[ev.args[0]], serial_of[ev.args[1]]))
        else:
            raise ValueError(f"{ev.kind!r} is not a geometric event")

    answers: list[bool] = []
    blocks = BlockState(provider)
    live: set[int] = set()
    i = 0
    while i < len(ops):
        cfg = geom_offline_params(len(live), b, alpha)
        j, count, touched = i, 0, set()
        while j < len(ops):
            if ops[j][0] != "conn":
                if count == cfg.q:
                    break
                count += 1
                touched.add(ops[j][1])
            j += 1
        # X = live objects not touched in this phase; bring the block structure in line
        X = {s: inst[s] for s in live if s not in touched}
        for s in sorted(set(blocks.objects) - set(X)):
            blocks.delete_object(s)
        fresh = [inst[s] for s in sorted(set(X) - set(blocks.objects))]
        if fresh:
            blocks.insert_block(fresh)
        y0 = [inst[s] for s in sorted(touched)]
        ph = _GeomPhase(X, y0, live & touched, blocks.components(), cfg, provider, counters)
        if audit:
            ph.phase.check_invariants()
        for op in ops[i:j]:
            if op[0] == "insert":
                ph.insert(op[1])
                live.add(op[1])
            elif op[0] == "delete":
                ph.delete(op[1])
                live.discard(op[1])
            else:
                answers.append(op[1] == op[2] or ph.connected(op[1], op[2]))
            if audit:
                ph.phase.check_invariants()
        i = j
    return answers
