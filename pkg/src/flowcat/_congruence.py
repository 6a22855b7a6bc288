"""Path classes of a finitely presented semicategory on an acyclic letter graph.

Given states, letters ``id -> (src, tgt)`` and relations between words, the
classes of words from a fixed source ``alpha`` are computed state by state in
topological order. A word ``w.e`` ending at ``v`` is represented by the pair
(class of ``w``, ``e``); two pairs are identified exactly when some relation
occurrence ends at the last letter. Occurrences strictly inside the prefix are
already absorbed by working with prefix classes, so the result is the full
congruence, not an approximation.
"""

from __future__ import annotations

from graphlib import CycleError, TopologicalSorter

from ._util import UnionFind, sort_key
from .errors import CyclicFlow, FlowError, SizeLimitExceeded

DEFAULT_MAX_CLASSES = 200_000


def check_acyclic(states, letters: dict) -> list:
    """Topological order of the states; raises CyclicFlow on a directed cycle."""
    ts = TopologicalSorter({s: set() for s in states})
    for src, tgt in letters.values():
        if src == tgt:
            raise CyclicFlow(f"loop letter at state {src!r}")
        ts.add(tgt, src)
    try:
        return list(ts.static_order())
    except CycleError as exc:
        raise CyclicFlow(f"directed cycle through {exc.args[1]!r}") from None


class Congruence:
    def __init__(self, states, letters: dict, relations, max_classes: int = DEFAULT_MAX_CLASSES):
        self.states = list(states)
        self.letters = dict(letters)
        self.max_classes = max_classes
        self.order = check_acyclic(self.states, self.letters)
        self.position = {s: i for i, s in enumerate(self.order)}
        self.incoming: dict = {s: [] for s in self.states}
        for e in sorted(self.letters, key=sort_key):
            self.incoming[self.letters[e][1]].append(e)
        self.relations_at: dict = {}
        for left, right in relations:
            left, right = tuple(left), tuple(right)
            if left == right:
                continue
            if not left or not right:
                raise FlowError("relation with an empty word")
            a, b = self.word_ends(left)
            if (a, b) != self.word_ends(right):
                raise FlowError(f"relation sides {left!r} / {right!r} have different endpoints")
            self.relations_at.setdefault(b, []).append((a, left, right))
        self._tables: dict = {}

    def word_ends(self, word):
        for x, y in zip(word, word[1:]):
            if self.letters[x][1] != self.letters[y][0]:
                raise FlowError(f"word {word!r} is not composable at {x!r}.{y!r}")
        return self.letters[word[0]][0], self.letters[word[-1]][1]

    def _solve(self, alpha):
        if alpha in self._tables:
            return self._tables[alpha]
        step: dict = {}  # (prefix class, letter) -> class at tgt(letter)
        classes: dict = {}  # state -> sorted class representatives
        budget = self.max_classes

        def prefix_classes(u):
            if u == alpha:
                return [()]
            return classes.get(u, [])

        def element(c0, word):
            c = c0
            for e in word[:-1]:
                c = step[(c, e)]
            return (c, word[-1])

        start = self.position[alpha]
        for v in self.order[start + 1:]:
            uf = UnionFind()
            for e in self.incoming[v]:
                for c in prefix_classes(self.letters[e][0]):
                    uf.add((c, e))
            if not uf.parent:
                continue
            for a, left, right in self.relations_at.get(v, ()):
                if a != alpha and a not in classes:
                    continue
                for c0 in prefix_classes(a):
                    uf.union(element(c0, left), element(c0, right))
            reps: dict = {}
            for el in uf.parent:
                root = uf.find(el)
                word = el[0] + (el[1],)
                if root not in reps or sort_key(word) < sort_key(reps[root]):
                    reps[root] = word
            for el in uf.parent:
                step[el] = reps[uf.find(el)]
            classes[v] = sorted(set(reps.values()), key=sort_key)
            budget -= len(classes[v])
            if budget < 0:
                raise SizeLimitExceeded(f"more than {self.max_classes} path classes from {alpha!r}")
        self._tables[alpha] = (step, classes)
        return step, classes

    def classes(self, alpha, beta) -> list:
        """Least word of each class of paths alpha -> beta, sorted."""
        return list(self._solve(alpha)[1].get(beta, []))

    def class_of(self, word) -> tuple:
        word = tuple(word)
        self.word_ends(word)
        step, _ = self._solve(self.letters[word[0]][0])
        c = ()
        for e in word:
            c = step[(c, e)]
        return c

    def tables(self):
        """(hom, compose) tables keyed by state pairs / triples, class ids = least words."""
        hom = {}
        for a in self.states:
            for b, cs in self._solve(a)[1].items():
                if cs:
                    hom[(a, b)] = tuple(cs)
        compose: dict = {}
        steps = {a: self._solve(a)[0] for a in self.states}
        for (a, b), left in hom.items():
            for (b2, c), right in hom.items():
                if b2 != b:
                    continue
                table = compose.setdefault((a, b, c), {})
                step = steps[a]
                for x in left:
                    for y in right:
                        cls = x
                        for e in y:
                            cls = step[(cls, e)]
                        table[(x, y)] = cls
        return hom, compose
