"""Seeded random instances for the property and oracle suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import cellspace as cs
from ._util import sorted_ids
from .cellspace import CellSpace
from .enumerated import Pi0Flow, pi0_from_presentation
from .precubical import PrecubicalSet, grid_precubical
from .presentation import (
    FlowPresentation,
    GlobAttachment,
    all_words,
    extend,
    new_presentation,
)
from .pv import PvProgram


def random_presentation(
    rng: random.Random, max_states: int = 4, max_letters: int = 6, max_cells: int = 3
) -> FlowPresentation:
    """Acyclic presentation: letters only run from lower to higher states."""
    n = rng.randint(1, max_states)
    steps: list = [("state", s) for s in range(n)]
    letters = {}
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if pairs:
        for k in range(rng.randint(0, max_letters)):
            a, b = rng.choice(pairs)
            name = f"e{k}"
            letters[name] = (a, b)
            steps.append(("glob", GlobAttachment(cs.point(), {}, a, b, name)))
    for k in range(rng.randint(0, max_cells)):
        candidates = []
        for a, b in pairs:
            words = all_words(letters, a, b)
            if len(words) >= 2:
                candidates.append(words)
        if not candidates:
            break
        words = rng.choice(candidates)
        left, right = rng.sample(words, 2)
        a, b = letters[left[0]][0], letters[left[-1]][1]
        steps.append(
            ("glob", GlobAttachment(cs.sphere_disk(1, "disk"), {-1: left, 1: right}, a, b, f"h{k}"))
        )
    return extend(new_presentation(), steps)


def random_graph(rng: random.Random, max_vertices: int = 4, p_edge: float = 0.4) -> CellSpace:
    n = rng.randint(0, max_vertices)
    vs = list(range(n))
    edges = [(v, w) for v in vs for w in vs if v < w and rng.random() < p_edge]
    return CellSpace.from_lists(vs, edges)


@dataclass(frozen=True)
class PushoutInstance:
    a: Pi0Flow
    phi0: object
    phi1: object
    dz: CellSpace
    z: CellSpace
    boundary_classes: dict
    seed: int = 0

    def args(self):
        return (self.a, self.phi0, self.phi1, self.dz, self.z, self.boundary_classes)


def _phi_pair(rng: random.Random, a: Pi0Flow):
    states = sorted_ids(a.states)
    if len(states) < 2:
        return None
    i, j = sorted(rng.sample(range(len(states)), 2))
    return states[i], states[j]


def random_pushout_instance(seed: int) -> PushoutInstance:
    """A random acyclic A, a globe attachment point, and a boundary map dZ -> A."""
    rng = random.Random(seed)
    while True:
        p = random_presentation(rng, max_states=4, max_letters=5, max_cells=2)
        a = pi0_from_presentation(p)
        pair = _phi_pair(rng, a)
        if pair is not None:
            break
    phi0, phi1 = pair
    classes = a.classes(phi0, phi1)
    z = random_graph(rng, max_vertices=4)
    vs = z.sorted_vertices()
    if classes:
        bd = [v for v in vs if rng.random() < 0.5]
    else:
        bd = []
    bd_set = set(bd)
    bd_edges = [tuple(e) for e in z.edges if set(e) <= bd_set and rng.random() < 0.6]
    dz = CellSpace.from_lists(bd, bd_edges)
    comp = cs.component_map(dz)
    choice = {r: rng.choice(classes) for r in set(comp.values())}
    boundary = {v: choice[comp[v]] for v in bd}
    return PushoutInstance(a, phi0, phi1, dz, z, boundary, seed)


def random_forest_collapse(seed: int) -> PushoutInstance:
    """Z a forest, dZ one vertex per tree: the attachment changes no class set."""
    rng = random.Random(seed)
    while True:
        p = random_presentation(rng, max_states=4, max_letters=5, max_cells=2)
        a = pi0_from_presentation(p)
        pair = _phi_pair(rng, a)
        if pair is not None and a.classes(*pair):
            break
    phi0, phi1 = pair
    classes = a.classes(phi0, phi1)
    vertices, edges, roots = [], [], []
    nxt = 0
    for _ in range(rng.randint(1, 3)):
        size = rng.randint(1, 4)
        tree = list(range(nxt, nxt + size))
        nxt += size
        vertices += tree
        roots.append(tree[0])
        for k, v in enumerate(tree[1:], start=1):
            edges.append((v, tree[rng.randrange(k)]))
    z = CellSpace.from_lists(vertices, edges)
    dz = CellSpace.from_lists(roots)
    boundary = {r: rng.choice(classes) for r in roots}
    return PushoutInstance(a, phi0, phi1, dz, z, boundary, seed)


# -- precubical sets -------------------------------------------------------------------


def random_precubical(rng: random.Random) -> PrecubicalSet:
    """A grid (2 or 3 axes) with a random subset of its cubes removed."""
    dim = rng.choice((2, 2, 3))
    shape = tuple(rng.randint(1, 3) for _ in range(dim))
    drop_edge = rng.random() * 0.2
    drop_square = rng.random() * 0.5

    def keep(cell):
        n = len(cell[1])
        r = rng.random()
        return r >= (drop_edge if n == 1 else drop_square if n == 2 else 0.3)

    return grid_precubical(shape, max_dim=dim, keep=keep)


def constrained_slots(k: PrecubicalSet) -> list[tuple]:
    """Face entries (n, i, sign, cell) that some cubical identity reads."""
    slots = []
    for n in sorted(k.cells):
        if n >= 2:
            for x in sorted_ids(k.k(n)):
                for i in range(1, n + 1):
                    for s in ("-", "+"):
                        slots.append((n, i, s, x))
    # edges are only constrained through the squares they bound
    bounding: set = set()
    for i in (1, 2):
        for s in ("-", "+"):
            bounding.update(k.faces.get((2, i, s), {}).values())
    for x in sorted_ids(k.k(1)):
        if x in bounding:
            for s in ("-", "+"):
                slots.append((1, 1, s, x))
    return slots


def corrupt_face(rng: random.Random, k: PrecubicalSet):
    """Replace one constrained face entry by a different cell of the right dimension."""
    slots = [s for s in constrained_slots(k) if len(k.k(s[0] - 1)) >= 2]
    if not slots:
        return None
    n, i, sign, x = rng.choice(slots)
    old = k.face(n, i, sign, x)
    new = rng.choice([c for c in sorted_ids(k.k(n - 1)) if c != old])
    return k.with_face(n, i, sign, x, new), (n, i, sign, x, old, new)


# -- PV programs ---------------------------------------------------------------------------


def random_pv_program(rng: random.Random, n_procs: int = 2, sems: str = "ab", max_len: int = 3) -> PvProgram:
    """Each process takes a random prefix of locks and releases them in a random order."""
    semaphores = {s: rng.randint(1, 2) for s in sems}
    procs = []
    for i in range(n_procs):
        acts = []
        held: list = []
        for _ in range(rng.randint(1, max_len)):
            s = rng.choice(sems)
            acts.append(("P", s))
            held.append(s)
        rng.shuffle(held)
        acts += [("V", s) for s in held]
        procs.append((f"T{i + 1}", tuple(acts)))
    return PvProgram(semaphores, tuple(procs))
