"""Colimits of component flows, the explicit globe-attachment pushout, and the
canonical diagram of points and globes.

Working with component flows loses nothing here. Taking path components is
left adjoint to the inclusion of discrete spaces, so it commutes with every
colimit, and it commutes with the finite products that appear when path
spaces of a colimit are assembled from concatenations. The path classes of a
colimit are therefore words in the classes of the pieces, modulo the
identifications imposed by the arrows and the composition tables, which is
exactly what :class:`~flowcat._congruence.Congruence` computes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import cellspace as cs
from ._congruence import Congruence
from ._util import UnionFind, from_jsonable, sort_key, sorted_ids, to_jsonable
from .cellspace import CellSpace
from .enumerated import (
    FlowMorphism,
    Pi0Flow,
    as_pi0,
    glob_pi0,
    morphism_from_json,
    morphism_to_json,
    pi0_from_json,
    pi0_to_json,
)
from .errors import CyclicFlow, FlowError, InvalidMorphism


@dataclass(frozen=True, eq=False)
class FlowDiagram:
    objects: Mapping  # id -> Pi0Flow
    arrows: Mapping = field(default_factory=dict)  # id -> (src id, tgt id, FlowMorphism)

    def problems(self) -> list[str]:
        out = []
        for name, (s, t, f) in self.arrows.items():
            if s not in self.objects or t not in self.objects:
                out.append(f"arrow {name!r} has an undeclared endpoint")
                continue
            if f.source is not self.objects[s] or f.target is not self.objects[t]:
                # allow structurally equal flows rebuilt from JSON
                if pi0_to_json(f.source) != pi0_to_json(self.objects[s]) or pi0_to_json(
                    f.target
                ) != pi0_to_json(self.objects[t]):
                    out.append(f"arrow {name!r} does not run between its declared objects")
                    continue
            out.extend(f"arrow {name!r}: {p}" for p in f.problems())
        return out

    def to_json(self) -> dict:
        return diagram_to_json(self)


def _glob_morphism(source: Pi0Flow, target: Pi0Flow, state_map, class_fn) -> FlowMorphism:
    cm = {pair: {c: class_fn(pair, c) for c in cl} for pair, cl in source.hom.items()}
    return FlowMorphism(source, target, dict(state_map), cm)


# -- generic colimit ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Colimit:
    flow: Pi0Flow
    cocone: Mapping  # object id -> FlowMorphism into flow


def colimit_with_cocone(d: FlowDiagram) -> Colimit:
    uf = UnionFind()
    for o, x in d.objects.items():
        for s in x.states:
            uf.add((o, s))
    for s_obj, t_obj, f in d.arrows.values():
        for s, t in f.state_map.items():
            uf.union((s_obj, s), (t_obj, t))
    groups = uf.groups()
    names = _state_names(groups)
    where = {m: names[frozenset(g)] for g in groups for m in g}

    letters = {}
    relations = []
    for o, x in d.objects.items():
        for (a, b), cl in x.hom.items():
            for c in cl:
                letters[(o, c)] = (where[(o, a)], where[(o, b)])
        for table in x.compose.values():
            for (p, q), r in table.items():
                relations.append((((o, p), (o, q)), ((o, r),)))
    for s_obj, t_obj, f in d.arrows.values():
        for m in f.class_maps.values():
            for c, c2 in m.items():
                relations.append((((s_obj, c),), ((t_obj, c2),)))
    states = sorted_ids(set(names.values()))
    cong = Congruence(states, letters, relations)
    hom, compose = cong.tables()
    flow = Pi0Flow(tuple(states), hom, compose)

    cocone = {}
    for o, x in d.objects.items():
        sm = {s: where[(o, s)] for s in x.states}
        cm = {pair: {c: cong.class_of(((o, c),)) for c in cl} for pair, cl in x.hom.items()}
        cocone[o] = FlowMorphism(x, flow, sm, cm)
    return Colimit(flow, cocone)


def _state_names(groups) -> dict:
    """Name each merged state by its shared underlying id when that is unambiguous."""
    groups = [frozenset(g) for g in groups]
    plain = {}
    for g in groups:
        values = {s for _, s in g}
        if len(values) != 1:
            break
        plain[g] = next(iter(values))
    else:
        if len(set(plain.values())) == len(groups):
            return plain
    return {g: min(g, key=sort_key) for g in groups}


def colimit(d: FlowDiagram) -> Pi0Flow:
    return colimit_with_cocone(d).flow


def coproduct(x: Pi0Flow, y: Pi0Flow) -> Pi0Flow:
    return colimit(FlowDiagram({0: as_pi0(x), 1: as_pi0(y)}))


# -- pushout along Glob(dZ) -> Glob(Z) ----------------------------------------


def _boundary_data(a: Pi0Flow, phi0, phi1, dz: CellSpace, z: CellSpace, boundary_classes):
    if not (dz.vertices <= z.vertices and dz.edges <= z.edges):
        raise FlowError("the boundary space must be a subgraph of the attached space")
    if phi0 == phi1 and z.vertices:
        raise CyclicFlow("attaching a globe at a single state creates a loop")
    allowed = set(a.classes(phi0, phi1))
    dz_rep = cs.component_map(dz)
    z_rep = cs.component_map(z)
    by_comp: dict = {}
    for v in dz.vertices:
        if v not in boundary_classes:
            raise InvalidMorphism(f"boundary vertex {v!r} has no class")
        c = boundary_classes[v]
        if c not in allowed:
            raise InvalidMorphism(f"boundary class {c!r} is not a class {phi0!r}->{phi1!r}")
        if by_comp.setdefault(dz_rep[v], c) != c:
            raise InvalidMorphism("boundary classes are not constant on components")
    return by_comp, dz_rep, z_rep


def pushout_diagram(a, phi0, phi1, dz: CellSpace, z: CellSpace, boundary_classes: Mapping) -> FlowDiagram:
    """The span A <- Glob(dZ) -> Glob(Z), read at component level."""
    a = as_pi0(a)
    by_comp, dz_rep, z_rep = _boundary_data(a, phi0, phi1, dz, z, boundary_classes)
    g_dz = glob_pi0(sorted_ids(set(dz_rep.values())))
    g_z = glob_pi0(sorted_ids(set(z_rep.values())))
    to_a = _glob_morphism(g_dz, a, {0: phi0, 1: phi1}, lambda pair, c: by_comp[c])
    to_z = _glob_morphism(g_dz, g_z, {0: 0, 1: 1}, lambda pair, c: z_rep[c])
    return FlowDiagram(
        {"A": a, "dZ": g_dz, "Z": g_z},
        {"f": ("dZ", "A", to_a), "i": ("dZ", "Z", to_z)},
    )


@dataclass(frozen=True, eq=False)
class ExplicitPushout:
    flow: Pi0Flow
    from_a: FlowMorphism


def pushout_glob_explicit_map(
    a, phi0, phi1, dz: CellSpace, z: CellSpace, boundary_classes: Mapping
) -> ExplicitPushout:
    """Pushout by the alternating-sequence formula, with the canonical map A -> result.

    A path of the result runs along a sequence of states whose consecutive
    pairs alternate between (phi0, phi1), carrying an element of T, and other
    pairs, carrying a class of A. T is the set pushout of the boundary
    components into the classes phi0 -> phi1 of A and into the components of
    Z. An element whose T-factor comes from a class of A is identified with
    the sequence obtained by composing that class with its neighbours in A.
    """
    a = as_pi0(a)
    by_comp, dz_rep, z_rep = _boundary_data(a, phi0, phi1, dz, z, boundary_classes)
    phi = (phi0, phi1)

    t_uf = UnionFind()
    for c in a.classes(phi0, phi1):
        t_uf.add(("a", c))
    for r in set(z_rep.values()):
        t_uf.add(("z", r))
    for comp, c in by_comp.items():
        t_uf.union(("a", c), ("z", z_rep[comp]))
    t_rep = {}
    for g in t_uf.groups():
        rep = min(g, key=sort_key)
        for m in g:
            t_rep[m] = rep
    t_elems = sorted_ids(set(t_rep.values()))

    if t_elems and a.classes(phi1, phi0):
        raise CyclicFlow(f"a path {phi1!r} -> {phi0!r} would close a loop through the new cell")
    a_preimages: dict = {}
    for c in a.classes(phi0, phi1):
        a_preimages.setdefault(t_rep[("a", c)], []).append(c)

    def factor(pair):
        return t_elems if pair == phi else a.classes(*pair)

    def sequences(alpha, beta):
        """Admissible state sequences alpha -> beta with nonempty factors."""
        out = []

        def walk(seq, last_phi):
            s = seq[-1]
            if s == beta and len(seq) > 1:
                out.append(tuple(seq))
            for t in a.states:
                pair = (s, t)
                is_phi = pair == phi
                if last_phi is False and not is_phi:
                    continue
                if not factor(pair):
                    continue
                walk(seq + [t], is_phi)

        walk([alpha], None)
        return out

    def elements(seq):
        pairs = list(zip(seq, seq[1:]))
        tuples = [()]
        for pair in pairs:
            tuples = [t + (c,) for t in tuples for c in factor(pair)]
        return [(seq, t) for t in tuples]

    def a_compose(run):
        """Compose a list of (pair, A-class) factors inside A."""
        (s, _), c = run[0]
        for (b, t), d in run[1:]:
            c = a.comp(s, b, t, c, d)
        return (s, run[-1][0][1]), c

    def place(seq, tup, k, c):
        """Put the A-class ``c`` at position k, coercing it into T on the (phi0, phi1) slot."""
        if (seq[k], seq[k + 1]) == phi:
            c = t_rep[("a", c)]
        return (tuple(seq), tup[:k] + (c,) + tup[k + 1:])

    def simplify(seq, tup, i, a_class):
        """Identify T-factor i, read as ``a_class``, with the composite of its A-run."""
        pairs = list(zip(seq, seq[1:]))
        lo = i - 1 if i > 0 else i
        hi = i + 1 if i + 1 < len(pairs) else i
        run = [(pairs[j], a_class if j == i else tup[j]) for j in range(lo, hi + 1)]
        _, c = a_compose(run)
        new_seq = seq[: lo + 1] + seq[hi + 1:]
        return place(new_seq, tup[:lo] + (None,) + tup[hi + 1:], lo, c)

    states = list(a.states)
    hom = {}
    class_of = {}
    for alpha in states:
        for beta in states:
            if alpha == beta:
                continue
            uf = UnionFind()
            for seq in sequences(alpha, beta):
                for el in elements(seq):
                    uf.add(el)
            if not uf.parent:
                continue
            for el in list(uf.parent):
                seq, tup = el
                for i, pair in enumerate(zip(seq, seq[1:])):
                    if pair != phi:
                        continue
                    for a_class in a_preimages.get(tup[i], ()):
                        other = simplify(seq, tup, i, a_class)
                        if other not in uf.parent:
                            raise FlowError(f"simplified element {other!r} is not admissible")
                        uf.union(el, other)
            reps = []
            for g in uf.groups():
                rep = min(g, key=sort_key)
                reps.append(rep)
                for m in g:
                    class_of[m] = rep
            hom[(alpha, beta)] = tuple(sorted(reps, key=sort_key))

    def join(e1, e2):
        (s1, t1), (s2, t2) = e1, e2
        last, first = (s1[-2], s1[-1]), (s2[0], s2[1])
        if last != phi and first != phi:
            _, c = a_compose([(last, t1[-1]), (first, t2[0])])
            return place(s1[:-1] + s2[1:], t1[:-1] + (None,) + t2[1:], len(t1) - 1, c)
        return (s1 + s2[1:], t1 + t2)

    compose = {}
    for (x, y), left in hom.items():
        for (y2, w), right in hom.items():
            if y2 != y:
                continue
            compose[(x, y, w)] = {(p, q): class_of[join(p, q)] for p in left for q in right}
    flow = Pi0Flow(tuple(states), hom, compose)

    cm = {}
    for pair, cl in a.hom.items():
        if pair == phi:
            cm[pair] = {c: class_of[(pair, (t_rep[("a", c)],))] for c in cl}
        else:
            cm[pair] = {c: class_of[(pair, (c,))] for c in cl}
    return ExplicitPushout(flow, FlowMorphism(a, flow, {s: s for s in states}, cm))


def pushout_glob_explicit(a, phi0, phi1, dz: CellSpace, z: CellSpace, boundary_classes: Mapping) -> Pi0Flow:
    return pushout_glob_explicit_map(a, phi0, phi1, dz, z, boundary_classes).flow


def pushout_glob_generic(a, phi0, phi1, dz, z, boundary_classes) -> Colimit:
    """The same pushout computed by the generic colimit engine."""
    return colimit_with_cocone(pushout_diagram(a, phi0, phi1, dz, z, boundary_classes))


# -- canonical diagram of points and globes ------------------------------------


def canonical_diagram(x) -> FlowDiagram:
    """Points, globes and two-step concatenations whose colimit rebuilds ``x``.

    Objects are ("pt", a), ("pair", a, b), ("tri", a, b, c, 0) for the globe on
    the product of two hom sets and ("tri", a, b, c, 1) for the concatenation
    of two globes. Arrows follow the classical recipe: i1, i2 into pairs; r
    (free concatenation) and p (composition of x) out of the product globes;
    j1, j3, k1, k2, k3 from points; h1, h3 from pairs into concatenations.
    """
    x = as_pi0(x)
    states = list(x.states)
    objects: dict = {}
    arrows: dict = {}

    for s in states:
        objects[("pt", s)] = Pi0Flow((0,), {}, {})
    for a in states:
        for b in states:
            objects[("pair", a, b)] = glob_pi0(x.classes(a, b))
    for a in states:
        for b in states:
            for c in states:
                prod = [(p, q) for p in x.classes(a, b) for q in x.classes(b, c)]
                objects[("tri", a, b, c, 0)] = glob_pi0(prod)
                objects[("tri", a, b, c, 1)] = _concat2(x.classes(a, b), x.classes(b, c))

    def point_into(s, obj, state, label):
        src = ("pt", s)
        f = FlowMorphism(objects[src], objects[obj], {0: state}, {})
        arrows[label] = (src, obj, f)

    for a in states:
        for b in states:
            pair = ("pair", a, b)
            point_into(a, pair, 0, ("i1", a, b))
            point_into(b, pair, 1, ("i2", a, b))
    for a in states:
        for b in states:
            for c in states:
                t0, t1 = ("tri", a, b, c, 0), ("tri", a, b, c, 1)
                g0, g1 = objects[t0], objects[t1]
                arrows[("r", a, b, c)] = (
                    t0, t1, _glob_morphism(g0, g1, {0: 0, 1: 2}, lambda pair, pq: pq)
                )
                arrows[("p", a, b, c)] = (
                    t0,
                    ("pair", a, c),
                    _glob_morphism(
                        g0, objects[("pair", a, c)], {0: 0, 1: 1},
                        lambda pair, pq, a=a, b=b, c=c: x.comp(a, b, c, pq[0], pq[1]),
                    ),
                )
                point_into(a, t0, 0, ("j1", a, b, c))
                point_into(c, t0, 1, ("j3", a, b, c))
                point_into(a, t1, 0, ("k1", a, b, c))
                point_into(b, t1, 1, ("k2", a, b, c))
                point_into(c, t1, 2, ("k3", a, b, c))
                pab, pbc = ("pair", a, b), ("pair", b, c)
                arrows[("h1", a, b, c)] = (
                    pab, t1, _glob_morphism(objects[pab], g1, {0: 0, 1: 1}, lambda pair, u: u)
                )
                arrows[("h3", a, b, c)] = (
                    pbc, t1, _glob_morphism(objects[pbc], g1, {0: 1, 1: 2}, lambda pair, v: v)
                )
    return FlowDiagram(objects, arrows)


def _concat2(left, right) -> Pi0Flow:
    """Glob(L) * Glob(R): states 0, 1, 2 with free composites 0 -> 2."""
    hom = {}
    if left:
        hom[(0, 1)] = tuple(left)
    if right:
        hom[(1, 2)] = tuple(right)
    compose = {}
    if left and right:
        hom[(0, 2)] = tuple((p, q) for p in left for q in right)
        compose[(0, 1, 2)] = {(p, q): (p, q) for p in left for q in right}
    return Pi0Flow((0, 1, 2), hom, compose)


def diagram_object_count(n_states: int) -> int:
    return n_states + n_states**2 + 2 * n_states**3


# -- serialization ------------------------------------------------------------------


def diagram_to_json(d: FlowDiagram) -> dict:
    objects = [
        {"id": to_jsonable(o), "flow": pi0_to_json(d.objects[o])} for o in sorted_ids(d.objects)
    ]
    arrows = []
    for name in sorted_ids(d.arrows):
        s, t, f = d.arrows[name]
        arrows.append(
            {
                "id": to_jsonable(name),
                "src": to_jsonable(s),
                "tgt": to_jsonable(t),
                "morphism": morphism_to_json(f),
            }
        )
    return {"objects": objects, "arrows": arrows}


def diagram_from_json(doc: Mapping) -> FlowDiagram:
    objects = {from_jsonable(o["id"]): pi0_from_json(o["flow"]) for o in doc.get("objects", [])}
    arrows = {}
    for a in doc.get("arrows", []):
        s, t = from_jsonable(a["src"]), from_jsonable(a["tgt"])
        f = morphism_from_json(a["morphism"], objects[s], objects[t])
        arrows[from_jsonable(a["id"])] = (s, t, f)
    return FlowDiagram(objects, arrows)
