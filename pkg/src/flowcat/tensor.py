"""Pairing with finite discrete spaces, cotensors, the square flow, and
component-level predicates on morphisms.

Only discrete U are accepted. For those, U⊠X is the free flow on the letters
(u, x) modulo (u, x)*(u, y) = (u, x*y), and {U, X} has |U|-tuples of classes.
S-homotopy is decided by its component shadow: a homotopy through morphisms
keeps every path inside its path component, so two morphisms are S-homotopic
at this resolution exactly when they agree on states and on classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ._congruence import Congruence
from ._util import sorted_ids
from .cellspace import CellSpace
from .colim import FlowDiagram, colimit
from .enumerated import (
    FlowMorphism,
    Pi0Flow,
    as_pi0,
    discrete_flow,
    hom_enumerate,
    pi0_to_json,
)
from .errors import FlowError, NotParallel, SizeLimitExceeded

MAX_COTENSOR_CLASSES = 50_000


@dataclass(frozen=True)
class DiscreteSpace:
    points: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))

    @classmethod
    def of(cls, points: Iterable) -> "DiscreteSpace":
        return cls(frozenset(points))

    def sorted_points(self) -> list:
        return sorted_ids(self.points)

    def __len__(self):
        return len(self.points)


def as_discrete(u) -> DiscreteSpace:
    if isinstance(u, DiscreteSpace):
        return u
    if isinstance(u, CellSpace):
        if u.edges:
            raise FlowError("pairing is only defined here for discrete spaces")
        return DiscreteSpace(u.vertices)
    return DiscreteSpace.of(u)


def product_space(u, v) -> DiscreteSpace:
    u, v = as_discrete(u), as_discrete(v)
    return DiscreteSpace.of((p, q) for p in u.points for q in v.points)


def tensor(u, x) -> Pi0Flow:
    u, x = as_discrete(u), as_pi0(x)
    letters = {}
    relations = []
    for p in u.sorted_points():
        for (a, b), cl in x.hom.items():
            for c in cl:
                letters[(p, c)] = (a, b)
        for table in x.compose.values():
            for (c1, c2), c3 in table.items():
                relations.append((((p, c1), (p, c2)), ((p, c3),)))
    hom, compose = Congruence(x.states, letters, relations).tables()
    return Pi0Flow(tuple(x.states), hom, compose)


def cotensor(u, x, max_classes: int = MAX_COTENSOR_CLASSES) -> Pi0Flow:
    u, x = as_discrete(u), as_pi0(x)
    pts = u.sorted_points()
    states = list(x.states)
    hom = {}
    if not pts:
        # TOP(empty, P) is a point for every pair, loops included
        for a in states:
            for b in states:
                hom[(a, b)] = ((),)
    else:
        total = sum(len(cl) ** len(pts) for cl in x.hom.values())
        if total > max_classes:
            raise SizeLimitExceeded(f"cotensor would have {total} classes")
        for pair, cl in x.hom.items():
            hom[pair] = tuple(_tuples(cl, len(pts)))
    compose = {}
    for (a, b), left in hom.items():
        for (b2, c), right in hom.items():
            if b2 != b:
                continue
            table = {}
            for s in left:
                for t in right:
                    table[(s, t)] = tuple(x.comp(a, b, c, p, q) for p, q in zip(s, t))
            compose[(a, b, c)] = table
    return Pi0Flow(tuple(states), hom, compose)


def _tuples(classes, n):
    out = [()]
    for _ in range(n):
        out = [t + (c,) for t in out for c in classes]
    return out


def square_flow(x) -> Pi0Flow:
    """Pushout of two copies of x along their common set of states."""
    x = as_pi0(x)
    base = discrete_flow(x.states)
    incl = FlowMorphism(base, x, {s: s for s in x.states}, {})
    d = FlowDiagram(
        {"0": base, "L": x, "R": x},
        {"l": ("0", "L", incl), "r": ("0", "R", incl)},
    )
    return colimit(d)


# -- predicates on morphisms ----------------------------------------------------


def synchronized(f: FlowMorphism) -> bool:
    images = [f.state_map[s] for s in f.source.states]
    return len(set(images)) == len(images) and set(images) == set(f.target.states)


def rlp_R_C(f: FlowMorphism) -> bool:
    """Right lifting property against {0,1} -> {0} and empty -> {0}.

    Every commutative square is enumerated and a lift is searched for, rather
    than reducing to injectivity/surjectivity up front.
    """
    xs, ys = list(f.source.states), list(f.target.states)
    # squares from R: states x0, x1 of the source with a common image y
    for x0 in xs:
        for x1 in xs:
            y = f.state_map[x0]
            if f.state_map[x1] != y:
                continue
            lifts = [s for s in xs if s == x0 and s == x1 and f.state_map[s] == y]
            if not lifts:
                return False
    # squares from C: any target state y
    for y in ys:
        if not [s for s in xs if f.state_map[s] == y]:
            return False
    return True


def _parallel(f: FlowMorphism, g: FlowMorphism) -> bool:
    for a, b in ((f.source, g.source), (f.target, g.target)):
        if a is not b and pi0_to_json(a) != pi0_to_json(b):
            return False
    return True


def s_homotopic_pi0(f: FlowMorphism, g: FlowMorphism) -> bool:
    if not _parallel(f, g):
        raise NotParallel("morphisms do not share source and target")
    if any(f.state_map[s] != g.state_map[s] for s in f.source.states):
        return False
    for pair, cl in f.source.hom.items():
        if any(f.class_maps[pair][c] != g.class_maps[pair][c] for c in cl):
            return False
    return True


def weak_equiv_pi0(f: FlowMorphism) -> bool:
    if not synchronized(f):
        return False
    x, y = f.source, f.target
    for a in x.states:
        for b in x.states:
            src = x.classes(a, b)
            tgt = y.classes(f.state_map[a], f.state_map[b])
            if len(src) != len(tgt):
                return False
            if src and len({f.class_maps[(a, b)][c] for c in src}) != len(tgt):
                return False
    return True


def adjunction_check(u, x, y, max_morphisms: int = 20_000) -> bool:
    left = hom_enumerate(tensor(u, x), y, max_morphisms=max_morphisms)
    right = hom_enumerate(x, cotensor(u, y), max_morphisms=max_morphisms)
    return len(left) == len(right)


def adjunction_counts(u, x, y, max_morphisms: int = 20_000) -> tuple[int, int]:
    left = hom_enumerate(tensor(u, x), y, max_morphisms=max_morphisms)
    right = hom_enumerate(x, cotensor(u, y), max_morphisms=max_morphisms)
    return len(left), len(right)


__all__ = [
    "DiscreteSpace",
    "adjunction_check",
    "adjunction_counts",
    "as_discrete",
    "cotensor",
    "product_space",
    "rlp_R_C",
    "s_homotopic_pi0",
    "square_flow",
    "synchronized",
    "tensor",
    "weak_equiv_pi0",
]
