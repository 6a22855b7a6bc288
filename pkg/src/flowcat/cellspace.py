"""Finite graph models of spaces, good enough for every path-component computation.

A :class:`CellSpace` is an undirected simple graph. Vertices stand for points
and edges for elementary homotopies, so its connected components are the path
components of the space it models. The sphere/disk dictionary is::

    S^-1 = empty graph      D^0 = one vertex
    S^0  = two vertices     D^1 = two vertices joined by an edge
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from ._util import UnionFind, sort_key, sorted_ids
from .errors import FlowError, UnsupportedDimension


@dataclass(frozen=True)
class CellSpace:
    vertices: frozenset
    edges: frozenset  # of 2-element frozensets

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        for e in self.edges:
            if len(e) != 2:
                raise FlowError(f"self-loop or malformed edge {set(e)!r}")
            if not e <= self.vertices:
                raise FlowError(f"edge {sorted_ids(e)!r} uses an undeclared vertex")

    @classmethod
    def from_lists(cls, vertices: Iterable[Hashable], edges: Iterable = ()) -> "CellSpace":
        return cls(frozenset(vertices), frozenset(frozenset(e) for e in edges))

    def __len__(self):
        return len(self.vertices)

    def sorted_vertices(self) -> list:
        return sorted_ids(self.vertices)

    def sorted_edges(self) -> list[tuple]:
        pairs = [tuple(sorted_ids(e)) for e in self.edges]
        return sorted(pairs, key=sort_key)

    def relabel(self, mapping) -> "CellSpace":
        """Image under an injective vertex relabeling (dict or callable)."""
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return CellSpace(
            frozenset(f(v) for v in self.vertices),
            frozenset(frozenset(f(v) for v in e) for e in self.edges),
        )

    def to_json(self) -> dict:
        return {"vertices": self.sorted_vertices(), "edges": self.sorted_edges()}

    @classmethod
    def from_json(cls, doc: dict) -> "CellSpace":
        from ._util import from_jsonable

        return cls.from_lists(
            [from_jsonable(v) for v in doc.get("vertices", [])],
            [tuple(from_jsonable(v) for v in e) for e in doc.get("edges", [])],
        )


EMPTY = CellSpace(frozenset(), frozenset())


def sphere_disk(n: int, kind: str) -> CellSpace:
    if kind not in ("sphere", "disk"):
        raise ValueError(f"kind must be 'sphere' or 'disk', got {kind!r}")
    if n == -1 and kind == "sphere":
        return EMPTY
    if n == 0 and kind == "disk":
        return CellSpace.from_lists([0])
    if n == 0 and kind == "sphere":
        return CellSpace.from_lists([-1, 1])
    if n == 1 and kind == "disk":
        return CellSpace.from_lists([-1, 1], [(-1, 1)])
    raise UnsupportedDimension(f"no graph model for {kind} of dimension {n}")


def point() -> CellSpace:
    return sphere_disk(0, "disk")


def discrete(points: Iterable[Hashable]) -> CellSpace:
    return CellSpace.from_lists(points)


def disjoint_union(a: CellSpace, b: CellSpace) -> CellSpace:
    """Tagged union: vertices of ``a`` become ``(0, v)``, those of ``b`` become ``(1, v)``."""
    left = a.relabel(lambda v: (0, v))
    right = b.relabel(lambda v: (1, v))
    return CellSpace(left.vertices | right.vertices, left.edges | right.edges)


def box_product(a: CellSpace, b: CellSpace) -> CellSpace:
    """Cartesian graph product; components of the result are products of components."""
    vertices = frozenset((v, w) for v in a.vertices for w in b.vertices)
    edges = set()
    for v in a.vertices:
        for e in b.edges:
            w1, w2 = tuple(e)
            edges.add(frozenset({(v, w1), (v, w2)}))
    for w in b.vertices:
        for e in a.edges:
            v1, v2 = tuple(e)
            edges.add(frozenset({(v1, w), (v2, w)}))
    return CellSpace(vertices, frozenset(edges))


def pi0(a: CellSpace) -> tuple[frozenset, ...]:
    """Connected components, ordered by their least vertex."""
    uf = UnionFind(a.vertices)
    for e in a.edges:
        v, w = tuple(e)
        uf.union(v, w)
    groups = uf.groups()
    return tuple(sorted(groups, key=lambda g: sort_key(min(g, key=sort_key))))


def component_map(a: CellSpace) -> dict:
    """Vertex -> least vertex of its component (the canonical class representative)."""
    out = {}
    for comp in pi0(a):
        rep = min(comp, key=sort_key)
        for v in comp:
            out[v] = rep
    return out
