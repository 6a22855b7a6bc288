"""PV semaphore programs: parsing, progress graphs, and concurrency diagnostics.

Grammar::

    program  := (semdecl | procdecl)*
    semdecl  := "sem" NAME ARITY ";"
    procdecl := "proc" NAME "=" action ("."? action)* ";"
    action   := "P" NAME | "V" NAME            (written as one word, e.g. Pa)

``#`` starts a comment running to the end of the line.

Process i with k actions gets local coordinates 0..k+1, action j sitting at
coordinate j. Process i holds semaphore s at local time t when t lies strictly
between one of its P s actions and the matching V s. A cube of the product
grid survives when, at its barycenter, no semaphore is held more times than its
arity allows. Vertices are always kept, so deadlock states stay visible.
"""

from __future__ import annotations

import itertools
import os
import re
from collections import deque
from dataclasses import dataclass, field

from ._util import sort_key, sorted_ids, to_jsonable
from .errors import PvSyntaxError, TooManyProcesses, UndeclaredSemaphore, UnmatchedV
from .precubical import PrecubicalSet, cube_barycenter, grid_precubical, realize_flow, to_dot
from .presentation import schedule_classes

DEFAULT_MAX_PROCESSES = 3

SWISS_SOURCE = """\
# Two threads taking locks a and b in opposite orders
sem a 1;
sem b 1;
proc T1 = Pa.Pb.Vb.Va;
proc T2 = Pb.Pa.Va.Vb;
"""


def max_processes() -> int:
    return int(os.environ.get("FLOWCAT_MAX_PROCESSES", DEFAULT_MAX_PROCESSES))


@dataclass(frozen=True)
class PvProgram:
    semaphores: dict  # name -> arity
    processes: tuple  # of (name, ((op, sem), ...))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.processes]

    def actions(self, i: int) -> tuple:
        return self.processes[i][1]

    def grid_shape(self) -> tuple:
        """Number of unit intervals along each axis."""
        return tuple(len(acts) + 1 for _, acts in self.processes)

    def hold_intervals(self, i: int) -> list[tuple[str, int, int | None]]:
        """(semaphore, P index, V index or None) for process i, matching P/V per semaphore FIFO."""
        open_p: dict = {}
        out = []
        for j, (op, s) in enumerate(self.actions(i), start=1):
            if op == "P":
                open_p.setdefault(s, deque()).append(j)
            else:
                out.append((s, open_p[s].popleft(), j))
        for s, queue in open_p.items():
            out.extend((s, j, None) for j in queue)
        return sorted(out, key=lambda h: (h[1], h[0]))

    def holds(self, i: int, t: float) -> dict:
        """Semaphore -> number of units process i holds at local time t."""
        count: dict = {}
        for s, p, v in self.hold_intervals(i):
            if p < t and (v is None or t < v):
                count[s] = count.get(s, 0) + 1
        return count

    def permuted(self, order) -> "PvProgram":
        return PvProgram(dict(self.semaphores), tuple(self.processes[i] for i in order))

    def with_arity(self, sem: str, arity: int) -> "PvProgram":
        sems = dict(self.semaphores)
        sems[sem] = arity
        return PvProgram(sems, self.processes)

    def to_source(self) -> str:
        lines = [f"sem {s} {a};" for s, a in sorted(self.semaphores.items())]
        for name, acts in self.processes:
            lines.append(f"proc {name} = " + " ".join(op + s for op, s in acts) + ";")
        return "\n".join(lines) + "\n"


# -- parsing -------------------------------------------------------------------------

_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<word>[A-Za-z_]\w*)"
                    r"|(?P<num>\d+)|(?P<sym>[=;.])|(?P<bad>.)")
_ACTION = re.compile(r"([PV])([A-Za-z_]\w*)\Z")


def _tokens(source: str):
    line, col_start = 1, 0
    for m in _TOKEN.finditer(source):
        kind = m.lastgroup
        col = m.start() - col_start + 1
        if kind == "nl":
            line, col_start = line + 1, m.end()
        elif kind in ("ws", "comment"):
            continue
        elif kind == "bad":
            raise PvSyntaxError(f"unexpected character {m.group()!r}", line, col)
        else:
            yield kind, m.group(), line, col
    yield "eof", "", line, len(source) - col_start + 1


def parse_pv(source: str) -> PvProgram:
    toks = list(_tokens(source))
    pos = 0

    def peek():
        return toks[pos]

    def take(kind=None, value=None, what=None):
        nonlocal pos
        tok = toks[pos]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            found = tok[1] or "end of input"
            raise PvSyntaxError(f"expected {what or value or kind}, found {found!r}", tok[2], tok[3])
        pos += 1
        return tok

    semaphores: dict = {}
    sem_at: dict = {}
    processes: list = []
    uses: list = []  # (process index, sem, line, col)
    while peek()[0] != "eof":
        kw = take("word", what="'sem' or 'proc'")
        if kw[1] == "sem":
            name = take("word", what="semaphore name")
            arity = take("num", what="arity")
            if int(arity[1]) < 1:
                raise PvSyntaxError("arity must be a positive integer", arity[2], arity[3])
            if name[1] in semaphores:
                raise PvSyntaxError(f"semaphore {name[1]!r} declared twice", name[2], name[3])
            semaphores[name[1]] = int(arity[1])
            sem_at[name[1]] = name[2:]
            take("sym", ";")
        elif kw[1] == "proc":
            name = take("word", what="process name")
            if name[1] in [n for n, _ in processes]:
                raise PvSyntaxError(f"process {name[1]!r} declared twice", name[2], name[3])
            take("sym", "=")
            acts = []
            while True:
                tok = take("word", what="an action such as Pa or Va")
                m = _ACTION.match(tok[1])
                if not m:
                    raise PvSyntaxError(f"{tok[1]!r} is not a P or V action", tok[2], tok[3])
                acts.append((m.group(1), m.group(2)))
                uses.append((len(processes), m.group(2), tok[2], tok[3]))
                if peek()[:2] == ("sym", "."):
                    take()
                    continue
                if peek()[:2] == ("sym", ";"):
                    take()
                    break
            processes.append((name[1], tuple(acts)))
        else:
            raise PvSyntaxError(f"expected 'sem' or 'proc', found {kw[1]!r}", kw[2], kw[3])

    for pname, acts in processes:
        held: dict = {}
        for op, s in acts:
            if op == "P":
                held[s] = held.get(s, 0) + 1
            elif held.get(s, 0) == 0:
                raise UnmatchedV(f"process {pname}: V{s} without a matching P{s}")
            else:
                held[s] -= 1
    for _, s, line, col in uses:
        if s not in semaphores:
            raise UndeclaredSemaphore(f"semaphore {s!r} used at line {line}, column {col} is not declared")
    return PvProgram(semaphores, tuple(processes))


def swiss_flag() -> PvProgram:
    return parse_pv(SWISS_SOURCE)


def dining_philosophers(n: int = 3) -> PvProgram:
    sems = "".join(f"sem f{i} 1;\n" for i in range(n))
    procs = "".join(
        f"proc Phil{i} = Pf{i} Pf{(i + 1) % n} Vf{(i + 1) % n} Vf{i};\n" for i in range(n)
    )
    return parse_pv(sems + procs)


# -- progress graph ---------------------------------------------------------------------


def cube_allowed(p: PvProgram, cell) -> bool:
    """Midpoint rule: hold counts at the barycenter stay within every arity."""
    bary = cube_barycenter(cell)
    total: dict = {}
    for i, t in enumerate(bary):
        for s, n in p.holds(i, t).items():
            total[s] = total.get(s, 0) + n
    return all(n <= p.semaphores[s] for s, n in total.items())


def to_precubical(p: PvProgram, max_dim: int | None = None, max_procs: int | None = None) -> PrecubicalSet:
    limit = max_procs if max_procs is not None else max_processes()
    n = len(p.processes)
    if n > limit:
        raise TooManyProcesses(f"{n} processes exceed the limit of {limit}")
    dim = n if max_dim is None else min(max_dim, n)
    return grid_precubical(p.grid_shape(), max_dim=dim, keep=lambda cell: cube_allowed(p, cell))


def _all_cubes(shape, n):
    vertices = list(itertools.product(*(range(s + 1) for s in shape)))
    for dirs in itertools.combinations(range(len(shape)), n):
        for base in vertices:
            if all(base[a] < shape[a] for a in dirs):
                yield (base, dirs)


@dataclass(frozen=True)
class AnalysisReport:
    grid_shape: tuple
    forbidden_squares: frozenset  # of (base, dirs)
    removed_edges: frozenset  # of (src vertex, tgt vertex)
    deadlocks: frozenset
    unreachable: frozenset
    unsafe: frozenset
    schedule_count: int
    initial: tuple = ()
    final: tuple = ()
    process_names: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "grid_shape": list(self.grid_shape),
            "initial": to_jsonable(self.initial),
            "final": to_jsonable(self.final),
            "processes": list(self.process_names),
            "forbidden_squares": [
                {"base": list(b), "dirs": list(d)} for b, d in sorted(self.forbidden_squares, key=sort_key)
            ],
            "removed_edges": [[list(s), list(t)] for s, t in sorted(self.removed_edges, key=sort_key)],
            "deadlocks": [list(v) for v in sorted_ids(self.deadlocks)],
            "unreachable": [list(v) for v in sorted_ids(self.unreachable)],
            "unsafe": [list(v) for v in sorted_ids(self.unsafe)],
            "schedule_count": self.schedule_count,
        }

    def to_text(self) -> str:
        def fmt(vs):
            return ", ".join("(" + ",".join(map(str, v)) + ")" for v in sorted_ids(vs)) or "none"

        squares = sorted(self.forbidden_squares, key=sort_key)
        lines = [
            f"processes:         {', '.join(self.process_names)}",
            f"grid:              {' x '.join(map(str, self.grid_shape))} cells",
            f"forbidden squares: {fmt(b for b, _ in squares) if squares else 'none'}",
            f"removed edges:     {len(self.removed_edges)}",
            f"deadlocks:         {fmt(self.deadlocks)}",
            f"unreachable:       {fmt(self.unreachable)}",
            f"unsafe:            {fmt(self.unsafe)}",
            f"schedules:         {self.schedule_count}",
        ]
        return "\n".join(lines) + "\n"


def progress_edges(k: PrecubicalSet) -> list[tuple]:
    return sorted(((k.source(e), k.target(e)) for e in k.k(1)), key=sort_key)


def _reach(adj: dict, start) -> set:
    seen, todo = {start}, [start]
    while todo:
        for w in adj.get(todo.pop(), ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def analyze(p: PvProgram, max_procs: int | None = None) -> AnalysisReport:
    k = to_precubical(p, max_dim=2, max_procs=max_procs)
    shape = p.grid_shape()
    initial = tuple(0 for _ in shape)
    final = tuple(shape)
    vertices = k.k(0)
    edges = progress_edges(k)
    fwd: dict = {v: [] for v in vertices}
    back: dict = {v: [] for v in vertices}
    for s, t in edges:
        fwd[s].append(t)
        back[t].append(s)
    reachable = _reach(fwd, initial)
    coreachable = _reach(back, final)
    deadlocks = frozenset(v for v in vertices if v != final and not fwd[v])
    unreachable = frozenset(vertices - reachable)
    unsafe = frozenset(v for v in reachable if v not in coreachable)

    all_edges = {(c[0], tuple(c[0][a] + (a == c[1][0]) for a in range(len(shape)))) for c in _all_cubes(shape, 1)}
    removed = frozenset(all_edges - set(edges))
    forbidden = frozenset(set(_all_cubes(shape, 2)) - set(k.k(2)))

    flow = realize_flow(k)
    count = len(schedule_classes(flow, initial, final)) if final in reachable else 0
    return AnalysisReport(
        grid_shape=shape,
        forbidden_squares=forbidden,
        removed_edges=removed,
        deadlocks=deadlocks,
        unreachable=unreachable,
        unsafe=unsafe,
        schedule_count=count,
        initial=initial,
        final=final,
        process_names=tuple(p.names),
    )


def report_to_dot(p: PvProgram, report: AnalysisReport | None = None, max_procs: int | None = None) -> str:
    """Progress graph with removed edges dashed, deadlocks red, unreachable grey, unsafe orange."""
    report = report or analyze(p, max_procs=max_procs)
    k = to_precubical(p, max_dim=1, max_procs=max_procs)
    colors = {}
    for v in report.unsafe:
        colors[v] = "orange"
    for v in report.unreachable:
        colors[v] = "lightgrey"
    for v in report.deadlocks:
        colors[v] = "red"
    return to_dot(k, removed_edges=report.removed_edges, vertex_colors=colors)
