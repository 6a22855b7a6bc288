"""Explicit finite flows, their path-component shadows, morphisms and limits.

:class:`EnumeratedFlow` keeps every path space as a :class:`CellSpace` together
with a full composition table. :class:`Pi0Flow` replaces each path space by its
set of components; because homotopy is a congruence the composition descends.
Morphisms are handled at the component level only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import cellspace as cs
from ._congruence import Congruence
from ._util import UnionFind, from_jsonable, sort_key, sorted_ids, to_jsonable
from .cellspace import CellSpace
from .errors import InvalidMorphism, SizeLimitExceeded
from .presentation import (
    FlowPresentation,
    _rule_index,
    all_words,
    check_acyclic,
    rewrite_neighbours,
)

DEFAULT_MAX_STATES = 16
DEFAULT_MAX_MORPHISMS = 100_000


@dataclass(frozen=True, eq=False)
class EnumeratedFlow:
    states: tuple
    hom: Mapping  # (a, b) -> CellSpace, absent pairs are empty
    compose: Mapping  # (a, b, c) -> {(x, y): z}

    def space(self, a, b) -> CellSpace:
        return self.hom.get((a, b), cs.EMPTY)

    def paths(self) -> Iterable[tuple]:
        """Tagged path vertices (a, b, x)."""
        for (a, b), space in sorted(self.hom.items(), key=lambda kv: sort_key(kv[0])):
            for x in space.sorted_vertices():
                yield (a, b, x)

    def path_count(self) -> int:
        return sum(len(s.vertices) for s in self.hom.values())


@dataclass(frozen=True, eq=False)
class Pi0Flow:
    states: tuple
    hom: Mapping  # (a, b) -> tuple of class ids, only non-empty pairs
    compose: Mapping  # (a, b, c) -> {(x, y): z}

    def classes(self, a, b) -> tuple:
        return self.hom.get((a, b), ())

    def comp(self, a, b, c, x, y):
        return self.compose[(a, b, c)][(x, y)]

    def class_count(self) -> int:
        return sum(len(v) for v in self.hom.values())

    def counts(self) -> dict:
        return {pair: len(v) for pair, v in self.hom.items()}

    def to_enumerated(self) -> EnumeratedFlow:
        hom = {pair: cs.discrete(v) for pair, v in self.hom.items()}
        return EnumeratedFlow(self.states, hom, self.compose)

    def zero_skeleton(self) -> "Pi0Flow":
        return Pi0Flow(self.states, {}, {})

    def to_json(self) -> dict:
        return pi0_to_json(self)


def as_pi0(x) -> Pi0Flow:
    if isinstance(x, Pi0Flow):
        return x
    if isinstance(x, EnumeratedFlow):
        return pi0_flow(x)
    if isinstance(x, FlowPresentation):
        return pi0_from_presentation(x)
    raise TypeError(f"cannot read {type(x).__name__} as a flow")


def as_enumerated(x) -> EnumeratedFlow:
    if isinstance(x, EnumeratedFlow):
        return x
    if isinstance(x, Pi0Flow):
        return x.to_enumerated()
    if isinstance(x, FlowPresentation):
        return from_presentation(x)
    raise TypeError(f"cannot read {type(x).__name__} as a flow")


def pi0_from_tables(states, hom, compose) -> Pi0Flow:
    return Pi0Flow(tuple(sorted_ids(states)), dict(hom), dict(compose))


def pi0_from_congruence(c: Congruence) -> Pi0Flow:
    hom, compose = c.tables()
    return pi0_from_tables(c.states, hom, compose)


# -- constructors -------------------------------------------------------------


def from_presentation(p: FlowPresentation) -> EnumeratedFlow:
    letters = p.letters
    states = p.states
    check_acyclic(states, letters)
    index = _rule_index(p.rules)
    hom = {}
    for a in states:
        for b in states:
            if a == b:
                continue
            words = all_words(letters, a, b)
            if not words:
                continue
            present = set(words)
            edges = set()
            for w in words:
                for other in rewrite_neighbours(w, index):
                    if other in present:
                        edges.add(frozenset((w, other)))
            hom[(a, b)] = CellSpace(frozenset(words), frozenset(edges))
    compose = _concat_table(hom)
    return EnumeratedFlow(tuple(states), hom, compose)


def _concat_table(hom) -> dict:
    compose: dict = {}
    for (a, b), left in hom.items():
        for (b2, c), right in hom.items():
            if b2 == b:
                compose[(a, b, c)] = {
                    (x, y): x + y for x in left.vertices for y in right.vertices
                }
    return compose


def pi0_from_presentation(p: FlowPresentation) -> Pi0Flow:
    """Component flow of a presentation, computed without enumerating words."""
    return pi0_from_congruence(Congruence(p.states, p.letters, p.rules))


def terminal_flow() -> EnumeratedFlow:
    return EnumeratedFlow((0,), {(0, 0): cs.discrete(["u"])}, {(0, 0, 0): {("u", "u"): "u"}})


def discrete_flow(states: Iterable) -> Pi0Flow:
    """A flow with no execution paths at all."""
    return Pi0Flow(tuple(sorted_ids(states)), {}, {})


def glob_pi0(classes: Iterable) -> Pi0Flow:
    """Glob of a discrete space, directly at component level."""
    classes = tuple(sorted_ids(classes))
    hom = {(0, 1): classes} if classes else {}
    return Pi0Flow((0, 1), hom, {})


def opposite(x: EnumeratedFlow) -> EnumeratedFlow:
    """Reverse every path: hom(b, a) of the result is hom(a, b) of ``x``."""
    hom = {(b, a): space for (a, b), space in x.hom.items()}
    compose = {}
    for (a, b, c), table in x.compose.items():
        compose[(c, b, a)] = {(y, z): w for (z, y), w in table.items()}
    return EnumeratedFlow(x.states, hom, compose)


def product(x: EnumeratedFlow, y: EnumeratedFlow) -> EnumeratedFlow:
    x, y = as_enumerated(x), as_enumerated(y)
    states = tuple((a, b) for a in x.states for b in y.states)
    hom = {}
    for (a, b), sx in x.hom.items():
        for (a2, b2), sy in y.hom.items():
            hom[((a, a2), (b, b2))] = cs.box_product(sx, sy)
    compose = {}
    for (a, b, c), tx in x.compose.items():
        for (a2, b2, c2), ty in y.compose.items():
            compose[((a, a2), (b, b2), (c, c2))] = {
                ((p, q), (r, s)): (tx[(p, r)], ty[(q, s)])
                for (p, r) in tx
                for (q, s) in ty
            }
    return EnumeratedFlow(states, hom, compose)


def product_pi0(x: Pi0Flow, y: Pi0Flow) -> Pi0Flow:
    """Binary product taken directly on component flows."""
    states = tuple((a, b) for a in x.states for b in y.states)
    hom = {}
    for (a, b), cx in x.hom.items():
        for (a2, b2), cy in y.hom.items():
            hom[((a, a2), (b, b2))] = tuple((p, q) for p in cx for q in cy)
    compose = {}
    for (a, b, c), tx in x.compose.items():
        for (a2, b2, c2), ty in y.compose.items():
            compose[((a, a2), (b, b2), (c, c2))] = {
                ((p, q), (r, s)): (tx[(p, r)], ty[(q, s)]) for (p, r) in tx for (q, s) in ty
            }
    return Pi0Flow(states, hom, compose)


def pi0_flow(x: EnumeratedFlow) -> Pi0Flow:
    reps = {pair: cs.component_map(space) for pair, space in x.hom.items()}
    hom = {
        pair: tuple(sorted_ids(set(m.values()))) for pair, m in reps.items() if m
    }
    compose = {}
    for (a, b, c), table in x.compose.items():
        if (a, b) not in hom or (b, c) not in hom:
            continue
        out = {}
        rac = reps[(a, c)]
        for p in hom[(a, b)]:
            for q in hom[(b, c)]:
                out[(p, q)] = rac[table[(p, q)]]
        compose[(a, b, c)] = out
    return Pi0Flow(tuple(x.states), hom, compose)


# -- structural checks ------------------------------------------------------


def associativity_failures(x, limit: int = 10) -> list:
    """Composable triples where (p*q)*r != p*(q*r); empty when associative."""
    comp = x.compose
    fails = []
    for (a, b, c), t1 in comp.items():
        for (b2, c2, d), t3 in comp.items():
            if (b2, c2) != (b, c):
                continue
            t_abd = comp.get((a, b, d))
            t_acd = comp.get((a, c, d))
            if t_abd is None or t_acd is None:
                continue
            for (p, q), pq in t1.items():
                for (q2, r), qr in t3.items():
                    if q2 != q:
                        continue
                    if t_acd[(pq, r)] != t_abd[(p, qr)]:
                        fails.append(((a, b, c, d), (p, q, r)))
                        if len(fails) >= limit:
                            return fails
    return fails


def edge_failures(x: EnumeratedFlow, limit: int = 10) -> list:
    """Whiskered edges that composition fails to send to edges or degenerate pairs."""
    fails = []
    for (a, b, c), table in x.compose.items():
        target = x.space(a, c)
        left, right = x.space(a, b), x.space(b, c)
        for e in left.edges:
            p, p2 = tuple(e)
            for q in right.vertices:
                u, v = table[(p, q)], table[(p2, q)]
                if u != v and frozenset((u, v)) not in target.edges:
                    fails.append(((a, b, c), (p, p2), q))
        for e in right.edges:
            q, q2 = tuple(e)
            for p in left.vertices:
                u, v = table[(p, q)], table[(p, q2)]
                if u != v and frozenset((u, v)) not in target.edges:
                    fails.append(((a, b, c), p, (q, q2)))
        if len(fails) >= limit:
            return fails[:limit]
    return fails


def descent_failures(x: EnumeratedFlow, limit: int = 10) -> list:
    """Pairs where composing other members of the same classes changes the class."""
    reps = {pair: cs.component_map(space) for pair, space in x.hom.items()}
    fails = []
    for (a, b, c), table in x.compose.items():
        rab, rbc, rac = reps[(a, b)], reps[(b, c)], reps[(a, c)]
        seen = {}
        for (p, q), r in table.items():
            key = (rab[p], rbc[q])
            cls = rac[r]
            if seen.setdefault(key, cls) != cls:
                fails.append(((a, b, c), (p, q)))
                if len(fails) >= limit:
                    return fails
    return fails


# -- branching and merging spaces ---------------------------------------------


def _quotient_closure(x: EnumeratedFlow, keep_left: bool) -> tuple[frozenset, ...]:
    uf = UnionFind(x.paths())
    for (a, b, c), table in x.compose.items():
        for (p, q), r in table.items():
            if keep_left:
                uf.union((a, c, r), (a, b, p))
            else:
                uf.union((a, c, r), (b, c, q))
    for (a, b), space in x.hom.items():
        for e in space.edges:
            v, w = tuple(e)
            uf.union((a, b, v), (a, b, w))
    groups = uf.groups()
    return tuple(sorted(groups, key=lambda g: sort_key(min(g, key=sort_key))))


def branching_space(x: EnumeratedFlow) -> tuple[frozenset, ...]:
    """Components of the quotient of all paths by p*q ~ p."""
    return _quotient_closure(as_enumerated(x), keep_left=True)


def merging_space(x: EnumeratedFlow) -> tuple[frozenset, ...]:
    """Components of the quotient of all paths by p*q ~ q."""
    return _quotient_closure(as_enumerated(x), keep_left=False)


# -- morphisms ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FlowMorphism:
    source: Pi0Flow
    target: Pi0Flow
    state_map: Mapping
    class_maps: Mapping  # (a, b) of source -> {class: class}

    def image(self, a, b, cls):
        return self.class_maps[(a, b)][cls]

    def key(self) -> tuple:
        sm = tuple((s, self.state_map[s]) for s in sorted_ids(self.state_map))
        cm = tuple(
            (pair, tuple((c, self.class_maps[pair][c]) for c in sorted_ids(self.class_maps[pair])))
            for pair in sorted_ids(self.class_maps)
        )
        return (sm, cm)

    def problems(self) -> list[str]:
        """Violated morphism axioms; empty for a valid morphism."""
        out = []
        x, y = self.source, self.target
        for s in x.states:
            if self.state_map.get(s) not in y.states:
                out.append(f"state {s!r} maps outside the target")
        if out:
            return out
        for (a, b), classes in x.hom.items():
            fa, fb = self.state_map[a], self.state_map[b]
            allowed = set(y.classes(fa, fb))
            cmap = self.class_maps.get((a, b), {})
            for c in classes:
                if cmap.get(c) not in allowed:
                    out.append(f"class {c!r} of {(a, b)!r} maps outside hom{(fa, fb)!r}")
        if out:
            return out
        for (a, b, c), table in x.compose.items():
            fa, fb, fc = (self.state_map[s] for s in (a, b, c))
            for (p, q), r in table.items():
                lhs = self.class_maps[(a, c)][r]
                rhs = y.comp(fa, fb, fc, self.class_maps[(a, b)][p], self.class_maps[(b, c)][q])
                if lhs != rhs:
                    out.append(f"composition not preserved at {(a, b, c)!r}: {(p, q)!r}")
        return out


def identity_morphism(x: Pi0Flow) -> FlowMorphism:
    return FlowMorphism(
        x, x, {s: s for s in x.states}, {pair: {c: c for c in cl} for pair, cl in x.hom.items()}
    )


def compose_morphisms(f: FlowMorphism, g: FlowMorphism) -> FlowMorphism:
    """g after f."""
    sm = {s: g.state_map[f.state_map[s]] for s in f.source.states}
    cm = {}
    for (a, b), m in f.class_maps.items():
        fa, fb = f.state_map[a], f.state_map[b]
        cm[(a, b)] = {c: g.class_maps[(fa, fb)][d] for c, d in m.items()}
    return FlowMorphism(f.source, g.target, sm, cm)


def induced_morphism(x, y, state_map=None, path_map=None) -> FlowMorphism:
    """Component-level morphism induced by a map of path vertices.

    ``x`` and ``y`` are enumerated flows; ``path_map`` sends a path vertex of
    ``x`` to one of ``y`` (identity by default, which suits inclusions of a
    presentation into a presentation with more cells).
    """
    x, y = as_enumerated(x), as_enumerated(y)
    state_map = state_map or {s: s for s in x.states}
    path_map = path_map or (lambda v: v)
    px, py = pi0_flow(x), pi0_flow(y)
    reps_x = {pair: cs.component_map(s) for pair, s in x.hom.items()}
    reps_y = {pair: cs.component_map(s) for pair, s in y.hom.items()}
    cm = {}
    for (a, b), rx in reps_x.items():
        target_pair = (state_map[a], state_map[b])
        ry = reps_y.get(target_pair, {})
        m = {}
        for v, rep in rx.items():
            image = path_map(v)
            if image not in ry:
                raise InvalidMorphism(f"path {v!r} has no image in hom{target_pair!r}")
            m[rep] = ry[image]
        cm[(a, b)] = m
    f = FlowMorphism(px, py, dict(state_map), cm)
    bad = f.problems()
    if bad:
        raise InvalidMorphism(bad[0])
    return f


def _state_maps(x: Pi0Flow, y: Pi0Flow, bijective: bool):
    """Partial-assignment search over state maps, pruned by hom emptiness/counts."""
    xs, ys = list(x.states), list(y.states)
    nx = {pair: len(c) for pair, c in x.hom.items()}
    ny = {pair: len(c) for pair, c in y.hom.items()}

    def consistent(assign, s):
        fs = assign[s]
        for t, ft in assign.items():
            for pair, fpair in (((s, t), (fs, ft)), ((t, s), (ft, fs))):
                n = nx.get(pair, 0)
                m = ny.get(fpair, 0)
                if bijective and n != m:
                    return False
                if not bijective and n and not m:
                    return False
        return True

    def extend(i, assign, used):
        if i == len(xs):
            yield dict(assign)
            return
        s = xs[i]
        for t in ys:
            if bijective and t in used:
                continue
            assign[s] = t
            if consistent(assign, s):
                used.add(t)
                yield from extend(i + 1, assign, used)
                used.discard(t)
            del assign[s]

    yield from extend(0, {}, set())


def _class_colours(x: Pi0Flow, table: dict, rounds: int = 3) -> dict:
    """Colour refinement of classes by their roles in the composition table.

    ``table`` interns signatures to small ints; share it between two flows so
    that equal colours mean equal signatures. An isomorphism preserves colours.
    """
    roles: dict = {(a, b, c): [] for (a, b), cl in x.hom.items() for c in cl}
    for (a, b, c), t in x.compose.items():
        for (p, q), r in t.items():
            left, right, prod = (a, b, p), (b, c, q), (a, c, r)
            roles[left].append(("l", right, prod))
            roles[right].append(("r", left, prod))
            roles[prod].append(("p", left, right))
    colour = {v: 0 for v in roles}
    for _ in range(rounds):
        colour = {
            v: table.setdefault(
                (colour[v], tuple(sorted((k, colour[u], colour[w]) for k, u, w in rs))), len(table)
            )
            for v, rs in roles.items()
        }
    return colour


def _class_maps(x: Pi0Flow, y: Pi0Flow, sm: Mapping, bijective: bool, colours=None):
    variables = [(a, b, c) for (a, b), cl in sorted(x.hom.items(), key=lambda kv: sort_key(kv[0])) for c in cl]
    domains = {v: y.classes(sm[v[0]], sm[v[1]]) for v in variables}
    if colours is not None:
        cx, cy = colours
        domains = {
            v: tuple(d for d in dom if cy[(sm[v[0]], sm[v[1]], d)] == cx[v]) for v, dom in domains.items()
        }
    if any(not d for d in domains.values()):
        return
    # constraints touching each variable: (left, right, product) triples
    touching: dict = {v: [] for v in variables}
    products = set()
    for (a, b, c), table in x.compose.items():
        for (p, q), r in table.items():
            con = ((a, b, p), (b, c, q), (a, c, r))
            for v in set(con):
                touching[v].append(con)
            if r != p and r != q:
                products.add((a, c, r))
    order = [v for v in variables if v not in products] + [v for v in variables if v in products]

    def image(assign, con):
        (a, b, _), (_, c, _), _ = con
        return y.comp(sm[a], sm[b], sm[c], assign[con[0]], assign[con[1]])

    def propagate(assign, used, v, value, trail):
        queue = [(v, value)]
        while queue:
            var, val = queue.pop()
            if var in assign:
                if assign[var] != val:
                    return False
                continue
            pair = (var[0], var[1])
            if bijective and val in used.setdefault(pair, set()):
                return False
            assign[var] = val
            used.setdefault(pair, set()).add(val)
            trail.append(var)
            for con in touching[var]:
                if con[0] in assign and con[1] in assign:
                    queue.append((con[2], image(assign, con)))
        return True

    def undo(assign, used, trail):
        for var in trail:
            used[(var[0], var[1])].discard(assign.pop(var))

    def search(i, assign, used):
        while i < len(order) and order[i] in assign:
            i += 1
        if i == len(order):
            yield dict(assign)
            return
        var = order[i]
        for val in domains[var]:
            trail: list = []
            if propagate(assign, used, var, val, trail):
                yield from search(i + 1, assign, used)
            undo(assign, used, trail)

    yield from search(0, {}, {})


def _check_size(x: Pi0Flow, y: Pi0Flow, max_states: int):
    if len(x.states) > max_states or len(y.states) > max_states:
        raise SizeLimitExceeded(
            f"morphism search limited to {max_states} states "
            f"(got {len(x.states)} and {len(y.states)})"
        )


def _to_morphism(x, y, sm, assign) -> FlowMorphism:
    cm: dict = {pair: {} for pair in x.hom}
    for (a, b, c), d in assign.items():
        cm[(a, b)][c] = d
    return FlowMorphism(x, y, dict(sm), cm)


def iso_pi0(x, y, max_states: int = DEFAULT_MAX_STATES) -> FlowMorphism | None:
    """An isomorphism of component flows, or None when there is none."""
    x, y = as_pi0(x), as_pi0(y)
    _check_size(x, y, max_states)
    if len(x.states) != len(y.states):
        return None
    if sorted(x.counts().values()) != sorted(y.counts().values()):
        return None
    table: dict = {}
    colours = (_class_colours(x, table), _class_colours(y, table))
    if sorted(colours[0].values()) != sorted(colours[1].values()):
        return None
    for sm in _state_maps(x, y, bijective=True):
        for assign in _class_maps(x, y, sm, bijective=True, colours=colours):
            return _to_morphism(x, y, sm, assign)
    return None


def hom_enumerate(
    x, y, max_states: int = DEFAULT_MAX_STATES, max_morphisms: int = DEFAULT_MAX_MORPHISMS
) -> list[FlowMorphism]:
    """Every morphism x -> y of component flows."""
    x, y = as_pi0(x), as_pi0(y)
    _check_size(x, y, max_states)
    out = []
    for sm in _state_maps(x, y, bijective=False):
        for assign in _class_maps(x, y, sm, bijective=False):
            out.append(_to_morphism(x, y, sm, assign))
            if len(out) > max_morphisms:
                raise SizeLimitExceeded(f"more than {max_morphisms} morphisms")
    return out


# -- serialization ----------------------------------------------------------------


def pi0_to_json(x: Pi0Flow) -> dict:
    hom = [
        {"src": a, "tgt": b, "classes": list(cl)}
        for (a, b), cl in sorted(x.hom.items(), key=lambda kv: sort_key(kv[0]))
    ]
    compose = []
    for (a, b, c), table in sorted(x.compose.items(), key=lambda kv: sort_key(kv[0])):
        for (p, q) in sorted(table, key=sort_key):
            compose.append([a, b, c, p, q, table[(p, q)]])
    return to_jsonable({"states": list(x.states), "hom": hom, "compose": compose})


def pi0_from_json(doc: Mapping) -> Pi0Flow:
    states = tuple(from_jsonable(s) for s in doc.get("states", []))
    hom = {}
    for h in doc.get("hom", []):
        classes = tuple(from_jsonable(c) for c in h["classes"])
        if classes:
            hom[(from_jsonable(h["src"]), from_jsonable(h["tgt"]))] = classes
    compose: dict = {}
    for row in doc.get("compose", []):
        a, b, c, p, q, r = (from_jsonable(v) for v in row)
        compose.setdefault((a, b, c), {})[(p, q)] = r
    return Pi0Flow(states, hom, compose)


def morphism_to_json(f: FlowMorphism) -> dict:
    return to_jsonable(
        {
            "states": [[s, f.state_map[s]] for s in sorted_ids(f.state_map)],
            "classes": [
                [a, b, c, f.class_maps[(a, b)][c]]
                for (a, b) in sorted_ids(f.class_maps)
                for c in sorted_ids(f.class_maps[(a, b)])
            ],
        }
    )


def morphism_from_json(doc: Mapping, source: Pi0Flow, target: Pi0Flow) -> FlowMorphism:
    sm = {from_jsonable(s): from_jsonable(t) for s, t in doc.get("states", [])}
    cm: dict = {pair: {} for pair in source.hom}
    for a, b, c, d in doc.get("classes", []):
        cm.setdefault((from_jsonable(a), from_jsonable(b)), {})[from_jsonable(c)] = from_jsonable(d)
    return FlowMorphism(source, target, sm, cm)


def all_states_pairs(x) -> Iterable[tuple]:
    return itertools.product(x.states, repeat=2)
