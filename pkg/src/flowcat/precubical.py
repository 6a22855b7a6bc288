"""Precubical sets, the cubical identities, and realization as flow presentations.

Face maps are stored per (n, i, sign): ``faces[(n, i, "-")][x]`` is the i-th
lower face of the n-cell x (1 <= i <= n). Grid cubes are encoded as
``(base, dirs)`` where ``base`` is a vertex and ``dirs`` the sorted tuple of
axes along which the cube extends; vertices are plain coordinate tuples.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from . import cellspace as cs
from ._util import from_jsonable, id_key, sort_key, sorted_ids, to_jsonable
from .errors import DanglingFace
from .presentation import FlowPresentation, GlobAttachment, extend, new_presentation

SIGNS = ("-", "+")


@dataclass(frozen=True, eq=False)
class PrecubicalSet:
    cells: Mapping  # n -> frozenset of cell ids
    faces: Mapping = field(default_factory=dict)  # (n, i, sign) -> {cell: face}

    @property
    def dimension(self) -> int:
        dims = [n for n, c in self.cells.items() if c]
        return max(dims) if dims else -1

    def k(self, n: int) -> frozenset:
        return frozenset(self.cells.get(n, ()))

    def face(self, n: int, i: int, sign: str, x):
        try:
            return self.faces[(n, i, sign)][x]
        except KeyError:
            raise DanglingFace(f"missing face d{i}{sign} of {n}-cell {x!r}") from None

    def source(self, edge):
        return self.face(1, 1, "-", edge)

    def target(self, edge):
        return self.face(1, 1, "+", edge)

    def with_face(self, n: int, i: int, sign: str, x, value) -> "PrecubicalSet":
        faces = {key: dict(table) for key, table in self.faces.items()}
        faces.setdefault((n, i, sign), {})[x] = value
        return PrecubicalSet(dict(self.cells), faces)

    def to_json(self) -> dict:
        return precubical_to_json(self)


@dataclass(frozen=True)
class CubicalViolation:
    n: int
    i: int
    j: int
    alpha: str
    beta: str
    cell: object
    message: str = ""

    def __str__(self):
        if self.message:
            return self.message
        return (
            f"d{self.i}{self.alpha} d{self.j}{self.beta} != d{self.j - 1}{self.beta} d{self.i}{self.alpha}"
            f" on {self.n}-cell {self.cell!r}"
        )


def validate_cubical(k: PrecubicalSet) -> list[CubicalViolation]:
    """Every failure of the face typing and of d_i^a d_j^b = d_{j-1}^b d_i^a, i < j."""
    out = []
    for n in sorted(k.cells):
        if n < 1:
            continue
        lower = k.k(n - 1)
        for x in sorted_ids(k.k(n)):
            for i in range(1, n + 1):
                for sign in SIGNS:
                    f = k.faces.get((n, i, sign), {}).get(x, _MISSING)
                    if f is _MISSING or f not in lower:
                        out.append(
                            CubicalViolation(n, i, i, sign, sign, x, f"face d{i}{sign} of {x!r} is not a {n - 1}-cell")
                        )
    if out:
        return out
    for n in sorted(k.cells):
        if n < 2:
            continue
        for x in sorted_ids(k.k(n)):
            for j in range(2, n + 1):
                for i in range(1, j):
                    for alpha in SIGNS:
                        for beta in SIGNS:
                            lhs = k.face(n - 1, i, alpha, k.face(n, j, beta, x))
                            rhs = k.face(n - 1, j - 1, beta, k.face(n, i, alpha, x))
                            if lhs != rhs:
                                out.append(CubicalViolation(n, i, j, alpha, beta, x))
    return out


_MISSING = object()


# -- grids -----------------------------------------------------------------------


def cube_vertices(cell) -> list:
    """Corner vertices of a grid cube (base, dirs)."""
    base, dirs = cell
    out = []
    for bits in itertools.product((0, 1), repeat=len(dirs)):
        v = list(base)
        for axis, b in zip(dirs, bits):
            v[axis] += b
        out.append(tuple(v))
    return out


def cube_barycenter(cell) -> tuple:
    base, dirs = cell
    c = [float(b) for b in base]
    for axis in dirs:
        c[axis] += 0.5
    return tuple(c)


def grid_face(cell, i: int, sign: str):
    """i-th face of a grid cube: drop the i-th direction, shifting the base on the + side."""
    base, dirs = cell
    axis = dirs[i - 1]
    rest = dirs[: i - 1] + dirs[i:]
    b = list(base)
    if sign == "+":
        b[axis] += 1
    b = tuple(b)
    return b if not rest else (b, rest)


def grid_precubical(
    shape: Iterable[int], max_dim: int = 2, keep: Callable | None = None
) -> PrecubicalSet:
    """Cubical grid with ``shape[a] + 1`` vertices along axis a.

    ``keep(cell)`` filters cubes of dimension >= 1; a cube is kept only when
    all its faces are kept as well, so the result is always closed under faces.
    """
    shape = tuple(shape)
    dim = len(shape)
    vertices = list(itertools.product(*(range(s + 1) for s in shape)))
    cells: dict = {0: frozenset(vertices)}
    faces: dict = {}
    for n in range(1, min(max_dim, dim) + 1):
        kept = set()
        for dirs in itertools.combinations(range(dim), n):
            for base in vertices:
                if any(base[a] >= shape[a] for a in dirs):
                    continue
                cell = (base, dirs)
                if keep is not None and not keep(cell):
                    continue
                fs = {(i, s): grid_face(cell, i, s) for i in range(1, n + 1) for s in SIGNS}
                if not all(f in cells[n - 1] for f in fs.values()):
                    continue
                kept.add(cell)
                for (i, s), f in fs.items():
                    faces.setdefault((n, i, s), {})[cell] = f
        cells[n] = frozenset(kept)
    return PrecubicalSet(cells, faces)


# -- realization --------------------------------------------------------------------


def realize_flow(k: PrecubicalSet) -> FlowPresentation:
    """States = vertices, 1-cells = letters, 2-cells = homotopies.

    A square x identifies the composite d1- x . d2+ x with d2- x . d1+ x.
    Cells of dimension >= 3 do not affect path classes and are dropped.
    """
    if k.dimension >= 3:
        warnings.warn(
            "cells of dimension >= 3 are ignored when realizing a flow", stacklevel=2
        )
    steps: list = [("state", v) for v in sorted_ids(k.k(0))]
    vertices = k.k(0)
    for e in sorted_ids(k.k(1)):
        s, t = k.source(e), k.target(e)
        for v in (s, t):
            if v not in vertices:
                raise DanglingFace(f"edge {e!r} ends at unknown vertex {v!r}")
        steps.append(("glob", GlobAttachment(cs.point(), {}, s, t, e)))
    edges = k.k(1)
    for sq in sorted_ids(k.k(2)):
        d1m, d1p = k.face(2, 1, "-", sq), k.face(2, 1, "+", sq)
        d2m, d2p = k.face(2, 2, "-", sq), k.face(2, 2, "+", sq)
        for e in (d1m, d1p, d2m, d2p):
            if e not in edges:
                raise DanglingFace(f"square {sq!r} has unknown face {e!r}")
        left, right = (d1m, d2p), (d2m, d1p)
        src, tgt = k.source(d1m), k.target(d2p)
        steps.append(
            (
                "glob",
                GlobAttachment(cs.sphere_disk(1, "disk"), {-1: left, 1: right}, src, tgt, sq),
            )
        )
    return extend(new_presentation(), steps)


# -- serialization and DOT -------------------------------------------------------------


def precubical_to_json(k: PrecubicalSet) -> dict:
    cells = {str(n): [to_jsonable(c) for c in sorted_ids(k.k(n))] for n in sorted(k.cells)}
    faces: dict = {}
    for n in sorted(k.cells):
        if n < 1:
            continue
        table = {}
        for x in sorted_ids(k.k(n)):
            row = []
            for i in range(1, n + 1):
                row.append([to_jsonable(k.faces.get((n, i, s), {}).get(x)) for s in SIGNS])
            table[id_key(x)] = row
        faces[str(n)] = table
    return {"cells": cells, "faces": faces}


def precubical_from_json(doc: Mapping) -> PrecubicalSet:
    cells = {
        int(n): frozenset(from_jsonable(c) for c in items)
        for n, items in doc.get("cells", {}).items()
    }
    faces: dict = {}
    for n_str, table in doc.get("faces", {}).items():
        n = int(n_str)
        by_key = {id_key(c): c for c in cells.get(n, ())}
        for key, row in table.items():
            x = by_key.get(key, from_jsonable(key))
            for i, pair in enumerate(row, start=1):
                for s, f in zip(SIGNS, pair):
                    if f is not None:
                        faces.setdefault((n, i, s), {})[x] = from_jsonable(f)
    return PrecubicalSet(cells, faces)


def _dot_id(v) -> str:
    return '"' + id_key(v).replace('"', "'") + '"'


def to_dot(
    k: PrecubicalSet,
    removed_edges: Iterable = (),
    vertex_colors: Mapping | None = None,
    name: str = "progress",
) -> str:
    """1-skeleton in DOT; ``removed_edges`` are drawn dashed and grey."""
    vertex_colors = vertex_colors or {}
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle, fontsize=10];"]
    for v in sorted_ids(k.k(0)):
        attrs = [f'label="{_label(v)}"']
        if v in vertex_colors:
            attrs += ["style=filled", f'fillcolor="{vertex_colors[v]}"']
        lines.append(f"  {_dot_id(v)} [{', '.join(attrs)}];")
    for e in sorted_ids(k.k(1)):
        lines.append(f"  {_dot_id(k.source(e))} -> {_dot_id(k.target(e))};")
    for s, t in sorted(removed_edges, key=sort_key):
        lines.append(f'  {_dot_id(s)} -> {_dot_id(t)} [style=dashed, color="grey"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _label(v) -> str:
    if isinstance(v, tuple) and all(isinstance(c, int) for c in v):
        return ",".join(str(c) for c in v)
    return id_key(v).replace('"', "'")
