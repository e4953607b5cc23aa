"""Brute-force ground truth.  Everything is recomputed from scratch per call."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import BaseGraph, Counters, GeomObject, StateError


def _bfs(adj: Mapping[int, Iterable[int]], src: int) -> set[int]:
    seen = {src}
    todo = deque([src])
    while todo:
        x = todo.popleft()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def induced_adjacency(
    g: BaseGraph, active: set[int], extra_edges: Iterable[tuple[int, int]] = ()
) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in active}
    for u, v in list(g.edges) + list(extra_edges):
        if u != v and u in active and v in active:
            adj[u].append(v)
            adj[v].append(u)
    return adj


def oracle_connected_subgraph(
    g: BaseGraph,
    active: set[int],
    u: int,
    v: int,
    extra_edges: Iterable[tuple[int, int]] = (),
    counters: Counters | None = None,
) -> bool:
    """BFS on the subgraph of ``g`` (plus ``extra_edges``) induced by ``active``."""
    if u not in active or v not in active:
        raise StateError("oracle query on an inactive vertex")
    if counters is not None:
        counters.oracle_calls += 1
    if u == v:
        return True
    return v in _bfs(induced_adjacency(g, active, extra_edges), u)


def oracle_subgraph_labels(
    g: BaseGraph, active: set[int], extra_edges: Iterable[tuple[int, int]] = ()
) -> dict[int, int]:
    """Component label (minimum member) per active vertex."""
    adj = induced_adjacency(g, active, extra_edges)
    label: dict[int, int] = {}
    for v in sorted(active):
        if v in label:
            continue
        comp = _bfs(adj, v)
        for x in comp:
            label[x] = v
    return label


def oracle_intersects(a: GeomObject, b: GeomObject) -> bool:
    if len(a.lo) != len(b.lo):
        raise ValueError("dimension mismatch")
    return all(a.lo[i] <= b.hi[i] and b.lo[i] <= a.hi[i] for i in range(len(a.lo)))


def oracle_components_geom(objects: Iterable[GeomObject]) -> list[frozenset[int]]:
    """Partition of object ids into components of the pairwise intersection graph.

    All n^2 pairs are tested at once with the closed-interval predicate.
    """
    objs = sorted(objects, key=lambda o: o.id)
    if not objs:
        return []
    lo = np.array([o.lo for o in objs], dtype=np.int64)
    hi = np.array([o.hi for o in objs], dtype=np.int64)
    meet = np.all((lo[:, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[:, None, :]), axis=2)
    _, labels = connected_components(csr_matrix(meet), directed=False)
    groups: dict[int, list[int]] = {}
    for o, lab in zip(objs, labels.tolist()):
        groups.setdefault(lab, []).append(o.id)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def oracle_connected_geom(objects: Iterable[GeomObject], id1: int, id2: int) -> bool:
    for part in oracle_components_geom(objects):
        if id1 in part:
            return id2 in part
    raise KeyError(id1)


def partition_of(labels: Mapping[int, int]) -> set[frozenset[int]]:
    groups: dict[int, set[int]] = {}
    for x, lab in labels.items():
        groups.setdefault(lab, set()).add(x)
    return {frozenset(s) for s in groups.values()}
