"""Canonical-subset intersection searching over axis-parallel boxes.

A box ``p`` meets a query box ``z`` iff, on every axis, ``p.lo <= z.hi`` and
``-p.hi <= -z.lo``.  That is a ``2d``-fold dominance query, answered by a
``2d``-level range tree: each level is a balanced tree over one key, every
node of a non-final level owns a secondary tree over its objects, and the
nodes of the final level are the canonical subsets.  A one-sided query picks
at most ``ceil(log2 n) + 1`` nodes per level, so the answer is a disjoint union
of polylogarithmically many canonical subsets.

The brute-force provider uses one singleton per object and exists for
cross-checking.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import GeomObject

BOXES = "boxes"
BRUTE = "brute"
PROVIDERS = (BOXES, BRUTE)


@dataclass(frozen=True)
class QueryAnswer:
    """Ids of the canonical subsets whose disjoint union is the query result."""

    subsets: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.subsets)

    def __iter__(self):
        return iter(self.subsets)


def _polylog(n: int, d: int) -> int:
    lg = (max(n, 1) - 1).bit_length()  # ceil(log2 n)
    return (2 * lg + 2) ** (2 * d)


class _Tree:
    """One level of the range tree over ``items`` sorted by key ``level``."""

    __slots__ = ("keys", "children", "size")

    def __init__(self, items: Sequence[tuple], level: int, last: int, coll: "CanonicalCollection"):
        items = sorted(items, key=lambda it: (it[0][level], it[1]))
        self.keys = [it[0][level] for it in items]
        self.size = len(items)
        self.children: dict[tuple[int, int], object] = {}
        stack = [(0, len(items))] if items else []
        while stack:
            i, j = stack.pop()
            seg = items[i:j]
            if level == last:
                self.children[(i, j)] = coll._intern(tuple(it[1] for it in seg))
            elif j - i == 1:
                # a one-item secondary chain reduces to checking its remaining keys
                key, oid = seg[0]
                self.children[(i, j)] = (coll._intern((oid,)), key)
            else:
                self.children[(i, j)] = _Tree(seg, level + 1, last, coll)
            if j - i > 1:
                mid = (i + j) // 2
                stack.append((i, mid))
                stack.append((mid, j))

    def query(self, thresholds: Sequence[int], level: int, last: int, out: list[int]) -> None:
        r = bisect.bisect_right(self.keys, thresholds[level])
        if r == 0:
            return
        stack = [(0, self.size)]
        while stack:
            i, j = stack.pop()
            if r >= j:
                child = self.children[(i, j)]
                if level == last:
                    out.append(child)
                elif type(child) is tuple:
                    sid, key = child
                    if all(key[k] <= thresholds[k] for k in range(level + 1, last + 1)):
                        out.append(sid)
                else:
                    child.query(thresholds, level + 1, last, out)
            elif r > i:
                mid = (i + j) // 2
                stack.append((mid, j))
                stack.append((i, mid))


class CanonicalCollection:
    """Canonical subsets over a frozen object set plus the provider's declared bounds.

    ``b`` is the range-searching exponent (query cost ~ n^(1-b)); the bound
    functions spell out the polylog factors the provider guarantees.
    """

    def __init__(self, objects: Iterable[GeomObject], provider: str = BOXES):
        if provider not in PROVIDERS:
            raise ValueError(f"unknown provider {provider!r}")
        objs = list(objects)
        self.objects: dict[int, GeomObject] = {}
        for o in objs:
            if o.id in self.objects:
                raise ValueError(f"duplicate object id {o.id}")
            self.objects[o.id] = o
        dims = {o.d for o in objs}
        if len(dims) > 1:
            raise ValueError("mixed dimensions")
        self.d = dims.pop() if dims else 1
        self.n = len(objs)
        self.provider = provider
        self.subsets: list[tuple[int, ...]] = []
        self._index: dict[tuple[int, ...], int] = {}
        self._root: _Tree | None = None
        if provider == BOXES:
            self.b = Fraction(1)
            items = [(o.lo + tuple(-h for h in o.hi), o.id) for o in objs]
            if items:
                self._root = _Tree(items, 0, 2 * self.d - 1, self)
        else:
            self.b = Fraction(0)
            for o in sorted(objs, key=lambda o: o.id):
                self._intern((o.id,))

    def _intern(self, members: tuple[int, ...]) -> int:
        key = tuple(sorted(members))
        sid = self._index.get(key)
        if sid is None:
            sid = self._index[key] = len(self.subsets)
            self.subsets.append(members)
        return sid

    def __len__(self) -> int:
        return len(self.subsets)

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self.subsets)

    def size(self, sid: int) -> int:
        return len(self.subsets[sid])

    def query(self, z: GeomObject) -> QueryAnswer:
        if self.n and z.d != self.d:
            raise ValueError(f"query dimension {z.d} != {self.d}")
        out: list[int] = []
        if self.provider == BOXES:
            if self._root is not None:
                thresholds = z.hi + tuple(-a for a in z.lo)
                self._root.query(thresholds, 0, 2 * self.d - 1, out)
        else:
            for sid, (oid,) in enumerate(self.subsets):
                if self.objects[oid].intersects(z):
                    out.append(sid)
        return QueryAnswer(tuple(out))

    def union(self, answer: QueryAnswer) -> list[int]:
        return [x for sid in answer for x in self.subsets[sid]]

    def partition_stats(self, z: GeomObject, delta: int, answer: QueryAnswer | None = None) -> tuple[int, int]:
        """(number of subsets in C_z larger than n/delta, total size of the rest)."""
        if not 1 <= delta <= max(self.n, 1):
            raise ValueError(f"delta={delta} outside [1, {max(self.n, 1)}]")
        if answer is None:
            answer = self.query(z)
        big = small = 0
        for sid in answer:
            s = len(self.subsets[sid])
            if s * delta > self.n:
                big += 1
            else:
                small += s
        return big, small

    # declared bounds ------------------------------------------------------

    def s_bound(self) -> int:
        """Upper bound on the total size of all canonical subsets."""
        if self.provider == BRUTE:
            return self.n
        return self.n * _polylog(self.n, self.d)

    def query_count_bound(self) -> int:
        """Upper bound on |C_z| (equivalently sum |C|^(1-b) for b = 1)."""
        if self.provider == BRUTE:
            return self.n
        return _polylog(self.n, self.d)

    def bound_big(self, delta: int) -> Fraction:
        """Bound on the count of subsets in C_z of size > n/delta: delta^(1-b) polylog."""
        if self.provider == BRUTE:
            return Fraction(delta)
        return Fraction(_polylog(self.n, self.d))

    def bound_small(self, delta: int) -> Fraction:
        """Bound on the total size of subsets in C_z of size <= n/delta: n/delta^b polylog."""
        if self.provider == BRUTE:
            return Fraction(self.n)
        return Fraction(self.n * _polylog(self.n, self.d), delta)


def build(objects: Iterable[GeomObject], provider: str = BOXES) -> CanonicalCollection:
    return CanonicalCollection(objects, provider)
