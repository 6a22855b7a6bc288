"""Small helpers: total ordering on opaque ids, union-find, JSON conversion."""

from __future__ import annotations

import json
from typing import Any, Hashable, Iterable


def sort_key(value: Any):
    """Total order key for the heterogeneous ids used as states, letters and vertices."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, (int, float)):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, tuple(sort_key(v) for v in value))
    if isinstance(value, frozenset):
        return (3, tuple(sorted(sort_key(v) for v in value)))
    if value is None:
        return (-1,)
    return (4, repr(value))


def sorted_ids(values: Iterable[Any]) -> list:
    return sorted(values, key=sort_key)


class UnionFind:
    """Disjoint sets over arbitrary hashable elements, added lazily."""

    def __init__(self, elements: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.rank: dict = {}
        for e in elements:
            self.add(e)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True

    def groups(self) -> list[frozenset]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return [frozenset(g) for g in out.values()]


def to_jsonable(value: Any) -> Any:
    """Tuples become lists, sets become sorted lists; dict keys must already be strings."""
    if isinstance(value, (tuple, list)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [to_jsonable(v) for v in sorted_ids(value)]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    return value


def from_jsonable(value: Any) -> Any:
    """Inverse of to_jsonable for ids: lists become tuples, recursively."""
    if isinstance(value, list):
        return tuple(from_jsonable(v) for v in value)
    return value


def id_key(value: Any) -> str:
    """String form of an id, used where JSON needs object keys."""
    if isinstance(value, str):
        return value
    return json.dumps(to_jsonable(value), separators=(",", ":"))


def dumps(value: Any) -> str:
    """Canonical, byte-stable JSON text."""
    return json.dumps(to_jsonable(value), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
