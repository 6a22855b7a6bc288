"""Flows presented as finite cell complexes, and their path spaces as word graphs.

A presentation is an ordered log of three kinds of cell attachment:

* ``add_state``   -- pushout along C: empty -> {0}, adds an isolated state;
* ``merge_states`` -- pushout along R: {0,1} -> {0}, identifies two states;
* ``attach_glob`` -- pushout along Glob(dZ) -> Glob(Z).

For an attachment the vertices of ``Z`` outside the boundary map become fresh
letters ``src -> tgt``; every edge of ``Z`` becomes a rewrite rule between the
words of its endpoints. Path spaces are then: words = composable letter
sequences, edges = one rewrite step applied in any context.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping

from . import cellspace as cs
from ._congruence import Congruence, check_acyclic
from ._util import UnionFind, from_jsonable, id_key, sort_key, sorted_ids, to_jsonable
from .cellspace import CellSpace
from .errors import (
    BadBoundary,
    CyclicFlow,
    DuplicateState,
    EmptyList,
    FlowError,
    SizeLimitExceeded,
    UnknownState,
    UnknownWord,
)

State = Hashable
Letter = Hashable
Word = tuple

MAX_WORDS = int(os.environ.get("FLOWCAT_MAX_WORDS", "500000"))


@dataclass(frozen=True)
class GlobAttachment:
    shape: CellSpace
    boundary: Mapping[Any, Word]
    src: State
    tgt: State
    name: Any = None

    def __post_init__(self):
        object.__setattr__(
            self, "boundary", {v: tuple(w) for v, w in dict(self.boundary).items()}
        )

    def interior(self) -> list:
        return [v for v in self.shape.sorted_vertices() if v not in self.boundary]

    def letter_ids(self, default_name) -> dict:
        """Interior vertex -> letter id."""
        name = default_name if self.name is None else self.name
        inner = self.interior()
        if len(inner) == 1:
            return {inner[0]: name}
        return {v: (name, v) for v in inner}


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class FlowPresentation:
    """Immutable log of cell attachments. Build it with the module functions."""

    steps: tuple = ()

    # -- derived structure, computed by replaying the log -------------------

    @cached_property
    def _replay(self):
        state = _Replay()
        for step in self.steps:
            state.apply(step, strict=False)
        return state

    @property
    def states(self) -> list:
        return self._replay.live_states()

    @property
    def letters(self) -> dict:
        """Letter id -> (src, tgt), in live (post-merge) states."""
        r = self._replay
        return {e: (r.find(s), r.find(t)) for e, (s, t) in r.letters.items()}

    @property
    def rules(self) -> list:
        return list(self._replay.rules)

    @property
    def globs(self) -> list:
        return [s[1] for s in self.steps if s[0] == "glob"]

    def find(self, state):
        return self._replay.find(state)

    def to_json(self) -> dict:
        return presentation_to_json(self)


class _Replay:
    """Mutable builder used to interpret a step log (confined to one call)."""

    def __init__(self):
        self.declared: list = []
        self.uf = UnionFind()
        self.letters: dict = {}
        self.rules: list = []
        self.n_globs = 0
        self.violations: list[Violation] = []

    def find(self, s):
        if s not in self.uf.parent:
            return s
        return self.uf.find(s)

    def live_states(self):
        return sorted_ids({self.uf.find(s) for s in self.declared})

    def _fail(self, strict, exc_type, message):
        if strict:
            raise exc_type(message)
        self.violations.append(Violation(exc_type.__name__, message))

    def word_ends(self, word):
        for e in word:
            if e not in self.letters:
                raise UnknownWord(f"unknown letter {e!r} in word {word!r}")
        for x, y in zip(word, word[1:]):
            if self.find(self.letters[x][1]) != self.find(self.letters[y][0]):
                raise BadBoundary(f"word {word!r} is not composable at {x!r}.{y!r}")
        return self.find(self.letters[word[0]][0]), self.find(self.letters[word[-1]][1])

    def apply(self, step, strict):
        kind = step[0]
        if kind == "state":
            s = step[1]
            if s in self.uf.parent:
                return self._fail(strict, DuplicateState, f"state {s!r} already exists")
            self.declared.append(s)
            self.uf.add(s)
        elif kind == "merge":
            x, y = step[1], step[2]
            for s in (x, y):
                if s not in self.uf.parent:
                    return self._fail(strict, UnknownState, f"merge of unknown state {s!r}")
            # keep the least id as the representative of the merged class
            rx, ry = self.uf.find(x), self.uf.find(y)
            if rx != ry:
                keep, drop = sorted([rx, ry], key=sort_key)
                self.uf.parent[drop] = keep
        elif kind == "glob":
            self._attach(step[1], strict)
        else:
            raise FlowError(f"unknown step kind {kind!r}")

    def _attach(self, g: GlobAttachment, strict):
        index = self.n_globs
        self.n_globs += 1
        for s in (g.src, g.tgt):
            if s not in self.uf.parent:
                return self._fail(
                    strict, UnknownState, f"glob #{index} has dangling endpoint {s!r}"
                )
        src, tgt = self.find(g.src), self.find(g.tgt)
        words = {}
        for v, w in g.boundary.items():
            if v not in g.shape.vertices:
                return self._fail(strict, BadBoundary, f"glob #{index}: {v!r} is not a shape vertex")
            if not w:
                return self._fail(strict, BadBoundary, f"glob #{index}: empty boundary word at {v!r}")
            try:
                ends = self.word_ends(w)
            except (UnknownWord, BadBoundary) as exc:
                return self._fail(strict, type(exc), f"glob #{index}: {exc}")
            if ends != (src, tgt):
                return self._fail(
                    strict,
                    BadBoundary,
                    f"glob #{index}: boundary word {w!r} runs {ends[0]!r}->{ends[1]!r}, "
                    f"expected {src!r}->{tgt!r}",
                )
            words[v] = w
        fresh = g.letter_ids(f"g{index}")
        for v, e in fresh.items():
            if e in self.letters:
                return self._fail(strict, BadBoundary, f"glob #{index}: letter id {e!r} reused")
        for v, e in fresh.items():
            self.letters[e] = (g.src, g.tgt)
            words[v] = (e,)
        for edge in g.shape.sorted_edges():
            a, b = words[edge[0]], words[edge[1]]
            if a != b:
                self.rules.append((a, b))


def _extend(p: FlowPresentation, *steps) -> FlowPresentation:
    r = _Replay()
    for old in p.steps:
        r.apply(old, strict=False)
    for step in steps:
        r.apply(step, strict=True)
    return replace(p, steps=p.steps + tuple(steps))


def extend(p: FlowPresentation, steps: Iterable[tuple]) -> FlowPresentation:
    """Append raw steps ("state", s) / ("merge", x, y) / ("glob", g), checking each."""
    return _extend(p, *steps)


# -- construction -----------------------------------------------------------


def new_presentation() -> FlowPresentation:
    return FlowPresentation()


def add_state(p: FlowPresentation, state: State) -> FlowPresentation:
    return _extend(p, ("state", state))


def add_states(p: FlowPresentation, states: Iterable[State]) -> FlowPresentation:
    return _extend(p, *(("state", s) for s in states))


def merge_states(p: FlowPresentation, x: State, y: State) -> FlowPresentation:
    return _extend(p, ("merge", x, y))


def attach_glob(p: FlowPresentation, g: GlobAttachment) -> FlowPresentation:
    return _extend(p, ("glob", g))


def add_letter(p: FlowPresentation, src: State, tgt: State, name=None) -> FlowPresentation:
    """Attach Glob(D^0) along the empty boundary: one new letter src -> tgt."""
    return attach_glob(p, GlobAttachment(cs.point(), {}, src, tgt, name))


def add_homotopy(p: FlowPresentation, left: Word, right: Word, name=None) -> FlowPresentation:
    """Attach Glob(D^1) along S^0 with boundary -1 -> left, +1 -> right."""
    r = p._replay
    src, tgt = r.word_ends(tuple(left))
    return attach_glob(
        p, GlobAttachment(cs.sphere_disk(1, "disk"), {-1: tuple(left), 1: tuple(right)}, src, tgt, name)
    )


def glob(z: CellSpace, name="z") -> FlowPresentation:
    p = add_states(new_presentation(), [0, 1])
    return attach_glob(p, GlobAttachment(z, {}, 0, 1, name))


def directed_segment() -> FlowPresentation:
    return glob(cs.point(), name="u")


def concat_globs(zs: list) -> FlowPresentation:
    """Glob(Z1) * ... * Glob(Zp): states 0..p, the i-th globe runs i-1 -> i."""
    if not zs:
        raise EmptyList("concat_globs needs at least one space")
    p = add_states(new_presentation(), range(len(zs) + 1))
    for i, z in enumerate(zs, start=1):
        p = attach_glob(p, GlobAttachment(z, {}, i - 1, i, f"z{i}"))
    return p


def reverse_presentation(p: FlowPresentation) -> FlowPresentation:
    """Same cells with every letter and boundary word reversed."""
    steps = []
    for step in p.steps:
        if step[0] == "glob":
            g = step[1]
            boundary = {v: tuple(reversed(w)) for v, w in g.boundary.items()}
            steps.append(("glob", GlobAttachment(g.shape, boundary, g.tgt, g.src, g.name)))
        else:
            steps.append(step)
    return FlowPresentation(tuple(steps))


# -- path spaces ------------------------------------------------------------


@dataclass(frozen=True)
class PathSpace:
    pair: tuple
    words: tuple
    homotopies: frozenset = field(default_factory=frozenset)

    def as_cellspace(self) -> CellSpace:
        return CellSpace(frozenset(self.words), self.homotopies)

    def classes(self) -> tuple[frozenset, ...]:
        return cs.pi0(self.as_cellspace())

    def representatives(self) -> list:
        return sorted((min(c, key=sort_key) for c in self.classes()), key=sort_key)


def _live(p: FlowPresentation, s):
    r = p._replay
    if s not in r.uf.parent:
        raise UnknownState(f"unknown state {s!r}")
    return r.find(s)


def _rule_index(rules) -> dict:
    index: dict = {}
    for a, b in rules:
        index.setdefault(a[0], []).append((a, b))
        index.setdefault(b[0], []).append((b, a))
    return index


def rewrite_neighbours(word: Word, index: Mapping) -> set:
    """Every word reachable from ``word`` by one rule applied in some context."""
    out = set()
    n = len(word)
    for i, e in enumerate(word):
        for lhs, rhs in index.get(e, ()):
            k = len(lhs)
            if i + k <= n and word[i:i + k] == lhs:
                other = word[:i] + rhs + word[i + k:]
                if other != word:
                    out.add(other)
    return out


def all_words(letters: Mapping, alpha, beta, limit: int = MAX_WORDS) -> list:
    """All composable letter sequences alpha -> beta (letter graph must be acyclic)."""
    out_letters: dict = {}
    for e in sorted_ids(letters):
        out_letters.setdefault(letters[e][0], []).append(e)
    # states from which beta is reachable
    back: dict = {}
    for e, (s, t) in letters.items():
        back.setdefault(t, []).append(s)
    useful, todo = {beta}, [beta]
    while todo:
        for s in back.get(todo.pop(), ()):
            if s not in useful:
                useful.add(s)
                todo.append(s)
    words: list = []

    def walk(state, prefix):
        for e in out_letters.get(state, ()):
            t = letters[e][1]
            if t not in useful:
                continue
            w = prefix + (e,)
            if t == beta:
                words.append(w)
                if len(words) > limit:
                    raise SizeLimitExceeded(f"more than {limit} words {alpha!r}->{beta!r}")
            walk(t, w)

    if alpha in useful:
        walk(alpha, ())
    return sorted(words, key=sort_key)


def enumerate_path_space(p: FlowPresentation, alpha: State, beta: State) -> PathSpace:
    """Brute-force path space: every word and every one-step homotopy between them."""
    a, b = _live(p, alpha), _live(p, beta)
    letters = p.letters
    check_acyclic(p.states, letters)
    words = all_words(letters, a, b)
    index = _rule_index(p.rules)
    present = set(words)
    edges = set()
    for w in words:
        for other in rewrite_neighbours(w, index):
            if other in present:
                edges.add(frozenset((w, other)))
    return PathSpace((a, b), tuple(words), frozenset(edges))


def congruence(p: FlowPresentation) -> Congruence:
    return Congruence(p.states, p.letters, p.rules)


def schedule_classes(p: FlowPresentation, alpha: State, beta: State) -> list:
    """Least word of each path class alpha -> beta, without enumerating every word."""
    a, b = _live(p, alpha), _live(p, beta)
    return congruence(p).classes(a, b)


def word_count(p: FlowPresentation) -> int:
    """Total number of words over all state pairs."""
    letters = p.letters
    order = check_acyclic(p.states, letters)
    # number of words ending at each state, by dynamic programming
    ending = {s: 0 for s in order}
    for s in order:
        for e, (src, tgt) in letters.items():
            if src == s:
                ending[tgt] += ending[s] + 1
    return sum(ending.values())


def r_pushout_decomposition(p: FlowPresentation, x: State, y: State, level: str = "words") -> int:
    """Predicted size of the path space after merging x and y, from the unmerged one.

    The merged space splits as the old one plus alternating products of old path
    spaces glued at the merge point: (into x)(out of y), (into y)(out of x),
    (into x)(y -> x)(out of y) and so on. ``level`` is "words" or "classes".
    """
    a, b = _live(p, x), _live(p, y)
    states = p.states
    count: dict = {}
    for s in states:
        for t in states:
            if level == "words":
                n = len(all_words(p.letters, s, t)) if s != t else 0
            else:
                n = len(schedule_classes(p, s, t)) if s != t else 0
            count[(s, t)] = n
    total = sum(count.values())
    if a == b:
        return total
    if count[(a, b)] or count[(b, a)]:
        raise CyclicFlow("merging two states joined by a path creates a loop")
    into = {q: sum(count[(s, q)] for s in states) for q in (a, b)}
    out = {q: sum(count[(q, t)] for t in states) for q in (a, b)}
    # chains x1.x2...xk whose junctions alternate between a and b; with no path
    # between a and b only k <= 2 survives, the longer terms are products with 0
    total += into[a] * out[b] + into[b] * out[a]
    return total


# -- validation and serialization -------------------------------------------


def validate(p: FlowPresentation) -> list[Violation]:
    r = _Replay()
    for step in p.steps:
        r.apply(step, strict=False)
    out = list(r.violations)
    live = set(r.live_states())
    for e, (s, t) in r.letters.items():
        for end in (r.find(s), r.find(t)):
            if end not in live:
                out.append(Violation("DanglingLetter", f"letter {e!r} touches non-live state {end!r}"))
    for lhs, rhs in r.rules:
        try:
            if r.word_ends(lhs) != r.word_ends(rhs):
                out.append(Violation("BadBoundary", f"rule {lhs!r} ~ {rhs!r} has mismatched ends"))
        except FlowError as exc:
            out.append(Violation(type(exc).__name__, str(exc)))
    return out


def presentation_to_json(p: FlowPresentation) -> dict:
    states, globs, merges = [], [], []
    for step in p.steps:
        if step[0] == "state":
            states.append(to_jsonable(step[1]))
        elif step[0] == "merge":
            merges.append({"x": to_jsonable(step[1]), "y": to_jsonable(step[2]), "at": len(globs)})
        else:
            g = step[1]
            doc = {
                "shape": g.shape.to_json(),
                "boundary": {id_key(v): to_jsonable(list(w)) for v, w in g.boundary.items()},
                "src": to_jsonable(g.src),
                "tgt": to_jsonable(g.tgt),
            }
            if g.name is not None:
                doc["name"] = to_jsonable(g.name)
            globs.append(doc)
    doc = {"states": states, "globs": globs}
    if merges:
        doc["merges"] = merges
    return to_jsonable(doc)


def presentation_from_json(doc: Mapping) -> FlowPresentation:
    """Rebuild a presentation without checking it; run :func:`validate` afterwards."""
    steps: list = [("state", from_jsonable(s)) for s in doc.get("states", [])]
    merges = sorted(doc.get("merges", []), key=lambda m: m.get("at", 0))
    mi = 0
    for k, gdoc in enumerate(doc.get("globs", [])):
        while mi < len(merges) and merges[mi].get("at", 0) <= k:
            steps.append(("merge", from_jsonable(merges[mi]["x"]), from_jsonable(merges[mi]["y"])))
            mi += 1
        shape = CellSpace.from_json(gdoc.get("shape", {}))
        by_key = {id_key(v): v for v in shape.vertices}
        boundary = {}
        for key, word in gdoc.get("boundary", {}).items():
            vertex = by_key.get(key, key)
            boundary[vertex] = tuple(from_jsonable(e) for e in word)
        steps.append(
            (
                "glob",
                GlobAttachment(
                    shape,
                    boundary,
                    from_jsonable(gdoc["src"]),
                    from_jsonable(gdoc["tgt"]),
                    from_jsonable(gdoc.get("name")),
                ),
            )
        )
    for m in merges[mi:]:
        steps.append(("merge", from_jsonable(m["x"]), from_jsonable(m["y"])))
    return FlowPresentation(tuple(steps))
