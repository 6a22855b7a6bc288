"""Independent reference computations used to pin expected values.

Nothing here imports the engine modules under test: grids, paths and
homotopies are rebuilt from first principles with plain Python and networkx.
"""

from __future__ import annotations

import itertools

import networkx as nx


# -- the two-lock example, written out literally --------------------------------

SWISS_REMOVED_EDGES = {((2, 2), (2, 3)), ((2, 2), (3, 2)), ((2, 3), (3, 3)), ((3, 2), (3, 3))}
SWISS_EXCLUDED_SQUARES = {(2, 1), (1, 2), (2, 2), (3, 2), (2, 3)}


def swiss_vertices():
    return {(i, j) for i in range(6) for j in range(6)}


def swiss_edges():
    horizontal = {((i, j), (i + 1, j)) for i in range(5) for j in range(6)}
    vertical = {((i, j), (i, j + 1)) for i in range(6) for j in range(5)}
    return (horizontal | vertical) - SWISS_REMOVED_EDGES


def swiss_squares():
    return {(i, j) for i in range(5) for j in range(5)} - SWISS_EXCLUDED_SQUARES


# -- reachability --------------------------------------------------------------------


def reach(edges, start, reverse=False):
    g = nx.DiGraph()
    g.add_edges_from((t, s) if reverse else (s, t) for s, t in edges)
    g.add_node(start)
    return nx.descendants(g, start) | {start}


def diagnostics(vertices, edges, initial, final):
    out_deg = {v: 0 for v in vertices}
    for s, _ in edges:
        out_deg[s] += 1
    fwd = reach(edges, initial)
    back = reach(edges, final, reverse=True)
    return {
        "deadlocks": {v for v in vertices if v != final and out_deg[v] == 0},
        "unreachable": set(vertices) - fwd,
        "unsafe": {v for v in fwd if v not in back},
    }


# -- execution paths and their homotopy classes on a 2d grid -------------------------


def monotone_paths(edges, start, end):
    succ: dict = {}
    for s, t in edges:
        succ.setdefault(s, []).append(t)
    out = []

    def walk(path):
        if path[-1] == end:
            out.append(tuple(path))
            return
        for t in succ.get(path[-1], ()):
            walk(path + [t])

    walk([start])
    return out


def grid_path_classes(edges, squares, start, end):
    """Paths as vertex lists; two paths are adjacent when they go round one filled square."""
    paths = monotone_paths(edges, start, end)
    index = {p: k for k, p in enumerate(paths)}
    g = nx.Graph()
    g.add_nodes_from(range(len(paths)))
    for p in paths:
        for k in range(1, len(p) - 1):
            a, m, b = p[k - 1], p[k], p[k + 1]
            if b[0] - a[0] == 1 and b[1] - a[1] == 1 and a in squares:
                other = (a[0] + 1, a[1]) if m == (a[0], a[1] + 1) else (a[0], a[1] + 1)
                q = p[:k] + (other,) + p[k + 1:]
                if q in index:
                    g.add_edge(index[p], index[q])
    return paths, nx.number_connected_components(g)


# -- semaphore grids computed directly -------------------------------------------------


def held(actions, t):
    """Units of each semaphore held at local time t: P strictly before t, V not after t."""
    count: dict = {}
    for pos, (op, s) in enumerate(actions, start=1):
        if op == "P" and pos < t:
            count[s] = count.get(s, 0) + 1
        if op == "V" and pos <= t:
            count[s] = count.get(s, 0) - 1
    return count


def allowed(procs, arity, point):
    total: dict = {}
    for acts, t in zip(procs, point):
        for s, n in held(acts, t).items():
            total[s] = total.get(s, 0) + n
    return all(n <= arity[s] for s, n in total.items())


def semaphore_grid(procs, arity):
    """Vertices and kept edges of the progress graph, by evaluating edge midpoints."""
    sizes = [len(a) + 1 for a in procs]
    vertices = set(itertools.product(*(range(n + 1) for n in sizes)))
    edges = set()
    for v in vertices:
        for axis in range(len(v)):
            if v[axis] < sizes[axis]:
                w = tuple(c + (k == axis) for k, c in enumerate(v))
                mid = tuple(c + 0.5 * (k == axis) for k, c in enumerate(v))
                if allowed(procs, arity, mid):
                    edges.add((v, w))
    return vertices, edges


def semaphore_squares(procs, arity):
    sizes = [len(a) + 1 for a in procs]
    out = set()
    for a, b in itertools.combinations(range(len(sizes)), 2):
        ranges = [range(n) if k in (a, b) else range(n + 1) for k, n in enumerate(sizes)]
        for v in itertools.product(*ranges):
            mid = tuple(c + 0.5 * (k in (a, b)) for k, c in enumerate(v))
            if allowed(procs, arity, mid):
                out.add((v, (a, b)))
    return out


# -- words and homotopies of a raw letter/rule presentation -------------------------------


def words_between(letters, a, b):
    out = []

    def walk(state, word):
        if state == b and word:
            out.append(tuple(word))
        for e, (s, t) in sorted(letters.items()):
            if s == state:
                walk(t, word + [e])

    walk(a, [])
    return out


def word_classes(letters, rules, a, b):
    """Components of the rewrite graph on words a -> b, by networkx."""
    words = words_between(letters, a, b)
    g = nx.Graph()
    g.add_nodes_from(words)
    present = set(words)
    for w in words:
        for lhs, rhs in rules:
            for x, y in ((lhs, rhs), (rhs, lhs)):
                k = len(x)
                for i in range(len(w) - k + 1):
                    if w[i:i + k] == x:
                        v = w[:i] + y + w[i + k:]
                        if v in present:
                            g.add_edge(w, v)
    return [set(c) for c in nx.connected_components(g)]
