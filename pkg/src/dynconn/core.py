"""Shared types: the static base graph, trace events, counters and errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Sequence, Union

VertexId = int


class DynConnError(Exception):
    """Base class for every error raised by this package."""


class TraceError(DynConnError, ValueError):
    """Malformed trace text.  ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class RangeError(TraceError):
    """A vertex index outside ``[0, n)``."""


class StateError(DynConnError, ValueError):
    """An update or query that violates the current state (e.g. on of an active vertex)."""


class UnknownError(DynConnError, KeyError):
    """Unknown vertex, object id or edge handle."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown"


class StaleHandleError(DynConnError, KeyError):
    pass


class ConfigError(DynConnError, ValueError):
    pass


# ---------------------------------------------------------------------------
# Counters
# ---------------------------------------------------------------------------

COUNTER_COLUMNS = (
    "op_index",
    "gstar_edge_updates",
    "gamma_updates",
    "c_updates",
    "component_splits",
    "bit_ops",
    "oracle_calls",
)


@dataclass
class Counters:
    """Charged-cost instrumentation shared by all structures of one run."""

    gstar_edge_updates: int = 0
    gamma_updates: int = 0
    c_updates: int = 0
    component_splits: int = 0
    bit_ops: int = 0
    oracle_calls: int = 0

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def copy(self) -> "Counters":
        return Counters(*self.as_tuple())


def counters_snapshot(c: Counters, op_index: int = 0) -> str:
    """One CSV row in :data:`COUNTER_COLUMNS` order."""
    return ",".join(str(x) for x in (op_index, *c.as_tuple()))


def counters_header() -> str:
    return ",".join(COUNTER_COLUMNS)


# ---------------------------------------------------------------------------
# Base graph
# ---------------------------------------------------------------------------


class BaseGraph:
    """Static undirected multigraph on dense vertex ids ``0..n-1``.

    Parallel edges are kept.  A self-loop adds 2 to the degree of its vertex.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("negative vertex count")
        self.n = n
        self.edges: list[tuple[int, int]] = []
        self.adjacency: list[list[int]] = [[] for _ in range(n)]
        self.degree: list[int] = [0] * n
        for u, v in edges:
            self._add(u, v)
        self.edges = tuple(self.edges)

    def _add(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise RangeError(f"edge ({u}, {v}) outside [0, {self.n})")
        idx = len(self.edges)
        self.edges.append((u, v))
        self.adjacency[u].append(idx)
        self.degree[u] += 1
        if u != v:
            self.adjacency[v].append(idx)
        self.degree[v] += 1

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> list[int]:
        """Neighbor list with multiplicity; a self-loop lists ``u`` twice."""
        out = []
        for idx in self.adjacency[u]:
            a, b = self.edges[idx]
            if a == b:
                out.extend((u, u))
            else:
                out.append(b if a == u else a)
        return out

    def to_text(self) -> str:
        lines = [f"graph {self.n}"]
        lines.extend(f"edge {u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BaseGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __repr__(self) -> str:
        return f"BaseGraph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# Geometry and trace events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeomObject:
    """Axis-parallel closed box with integer coordinates."""

    id: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("box needs matching non-empty lo/hi")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError(f"invalid interval [{a}, {b}] in object {self.id}")
            if not (-(2**63) <= a and b < 2**63):
                raise ValueError("coordinates must fit in signed 64-bit")
        if self.id < 0:
            raise ValueError("object ids are non-negative")

    @property
    def d(self) -> int:
        return len(self.lo)

    @classmethod
    def box(cls, id: int, *intervals: Sequence[int]) -> "GeomObject":
        return cls(id, tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    def intersects(self, other: "GeomObject") -> bool:
        for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi):
            if a1 > b2 or a2 > b1:
                return False
        return True

    def to_tokens(self) -> str:
        coords = " ".join(f"{a} {b}" for a, b in zip(self.lo, self.hi))
        return f"box {self.d} {coords}"


EVENT_KINDS = ("on", "off", "conn", "adde", "dele", "insert", "delete")


@dataclass(frozen=True)
class TraceEvent:
    """One update/query command.

    ``args`` holds the integer payload: a vertex for on/off, two vertices for
    conn, ``(u, v, handle)`` for adde, ``(handle,)`` for dele, an object id for
    delete.  ``obj`` is set only for insert.
    """

    kind: str
    args: tuple[int, ...]
    obj: GeomObject | None = None
    lineno: int | None = field(default=None, compare=False)

    def to_text(self) -> str:
        if self.kind == "insert":
            return f"insert {self.obj.id} {self.obj.to_tokens()}"
        return " ".join([self.kind, *map(str, self.args)])

    @property
    def is_query(self) -> bool:
        return self.kind == "conn"


_ARITY = {"on": 1, "off": 1, "conn": 2, "adde": 3, "dele": 1, "delete": 1}


@dataclass
class Trace:
    """A parsed trace: either a subgraph trace (``graph``) or a geometric one (``d``)."""

    kind: str  # "subgraph" or "geom"
    graph: BaseGraph | None = None
    d: int | None = None
    events: list[TraceEvent] = field(default_factory=list)

    def to_text(self) -> str:
        head = self.graph.to_text() if self.kind == "subgraph" else f"geom {self.d}\n"
        return head + "".join(e.to_text() + "\n" for e in self.events)


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise TraceError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_trace(text: Union[str, bytes]) -> Trace:
    """Parse the line-oriented trace grammar (see the README)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    trace: Trace | None = None
    n = 0
    pending_edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        if trace is None:
            if head == "graph":
                if len(tok) != 2:
                    raise TraceError("expected 'graph <n>'", lineno)
                (n,) = _ints(tok[1:], lineno)
                if n < 0:
                    raise TraceError("negative vertex count", lineno)
                trace = Trace("subgraph")
            elif head == "geom":
                if len(tok) != 2:
                    raise TraceError("expected 'geom <d>'", lineno)
                (d,) = _ints(tok[1:], lineno)
                if d < 1:
                    raise TraceError("dimension must be positive", lineno)
                trace = Trace("geom", d=d)
            else:
                raise TraceError(f"expected 'graph' or 'geom' header, got {head!r}", lineno)
            continue
        if head == "edge":
            if trace.kind != "subgraph" or trace.events:
                raise TraceError("'edge' only allowed after the graph header", lineno)
            if len(tok) != 3:
                raise TraceError("expected 'edge <u> <v>'", lineno)
            u, v = _ints(tok[1:], lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise RangeError(f"vertex out of range [0, {n})", lineno)
            pending_edges.append((u, v))
            continue
        if head == "insert":
            if trace.kind != "geom":
                raise TraceError("'insert' needs a geom trace", lineno)
            if len(tok) < 4 or tok[2] != "box":
                raise TraceError("expected 'insert <id> box <d> <a1> <b1> ...'", lineno)
            vals = _ints(tok[1:2] + tok[3:], lineno)
            oid, d, coords = vals[0], vals[1], vals[2:]
            if d != trace.d or len(coords) != 2 * d:
                raise TraceError(f"box must have dimension {trace.d} with {2 * trace.d} coordinates", lineno)
            try:
                obj = GeomObject(oid, tuple(coords[0::2]), tuple(coords[1::2]))
            except ValueError as exc:
                raise TraceError(str(exc), lineno) from None
            trace.events.append(TraceEvent("insert", (oid,), obj, lineno))
            continue
        if head not in _ARITY:
            raise TraceError(f"unknown command {head!r}", lineno)
        allowed = {"subgraph": ("on", "off", "conn", "adde", "dele"), "geom": ("conn", "delete")}
        if head not in allowed[trace.kind]:
            raise TraceError(f"{head!r} not valid in a {trace.kind} trace", lineno)
        if len(tok) - 1 != _ARITY[head]:
            raise TraceError(f"{head!r} takes {_ARITY[head]} argument(s)", lineno)
        args = tuple(_ints(tok[1:], lineno))
        if trace.kind == "subgraph" and head in ("on", "off", "conn", "adde"):
            verts = args[:2] if head == "adde" else args
            for x in verts:
                if not 0 <= x < n:
                    raise RangeError(f"vertex {x} out of range [0, {n})", lineno)
        trace.events.append(TraceEvent(head, args, None, lineno))
    if trace is None:
        raise TraceError("empty trace: missing header", 1)
    if trace.kind == "subgraph":
        trace.graph = BaseGraph(n, pending_edges)
    return trace


def load_graph(text: Union[str, bytes]) -> BaseGraph:
    trace = parse_trace(text)
    if trace.kind != "subgraph":
        raise TraceError("not a graph trace", 1)
    return trace.graph


# ---------------------------------------------------------------------------
# Exact parameter arithmetic
# ---------------------------------------------------------------------------


def ceil_pow(x: int, e: Fraction) -> int:
    """Exact ``ceil(x ** e)`` for integer ``x >= 0`` and rational ``e >= 0``."""
    e = Fraction(e)
    if x < 0 or e < 0:
        raise ValueError("ceil_pow needs x >= 0 and e >= 0")
    if x == 0:
        return 0 if e > 0 else 1
    num, den = e.numerator, e.denominator
    target = x**num
    # smallest k with k**den >= x**num
    k = max(1, math.ceil(math.exp(math.log(x) * num / den)))
    while k > 1 and (k - 1) ** den >= target:
        k -= 1
    while k**den < target:
        k += 1
    return k


def icbrt_ceil(m: int) -> int:
    return ceil_pow(m, Fraction(1, 3))
