import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from flowcat.errors import PvSyntaxError, TooManyProcesses, UndeclaredSemaphore, UnmatchedV
from flowcat.generators import random_pv_program
from flowcat.precubical import validate_cubical
from flowcat.pv import (
    PvProgram,
    SWISS_SOURCE,
    analyze,
    dining_philosophers,
    parse_pv,
    progress_edges,
    report_to_dot,
    swiss_flag,
    to_precubical,
)

seeds = st.integers(0, 100_000)


def proc_actions(p: PvProgram):
    return [acts for _, acts in p.processes]


def kept_squares(k):
    return {(b, d) for b, d in k.k(2)}


# -- parsing ----------------------------------------------------------------------


def test_parse_swiss():
    p = parse_pv("sem a 1; sem b 1; proc T1 = Pa Pb Vb Va; proc T2 = Pb Pa Va Vb;")
    assert p.semaphores == {"a": 1, "b": 1}
    assert p.processes == (
        ("T1", (("P", "a"), ("P", "b"), ("V", "b"), ("V", "a"))),
        ("T2", (("P", "b"), ("P", "a"), ("V", "a"), ("V", "b"))),
    )
    assert parse_pv(SWISS_SOURCE) == p == swiss_flag()


def test_parse_counting_semaphore():
    p = parse_pv("sem a 2; proc X = Pa Va; proc Y = Pa Va; proc Z = Pa Va;")
    assert p.names == ["X", "Y", "Z"] and p.semaphores["a"] == 2


def test_unmatched_v():
    with pytest.raises(UnmatchedV):
        parse_pv("proc T = Va;")
    with pytest.raises(UnmatchedV):
        parse_pv("sem a 1; proc T = Pa Va Va;")


def test_undeclared_semaphore():
    with pytest.raises(UndeclaredSemaphore, match="line 1, column 13"):
        parse_pv("proc T = Pa Pb Vb Va; sem a 1;")


@pytest.mark.parametrize(
    "source,line,col",
    [
        ("sem a 1\nproc T = Pa Va;", 2, 1),
        ("sem a 1;\nproc T = Pa Qa;", 2, 13),
        ("sem a 1;\nproc T Pa Va;", 2, 8),
        ("sem a 0;", 1, 7),
        ("sem a 1; sem a 2;", 1, 14),
        ("sem a 1; proc T = Pa Va; proc T = Pa Va;", 1, 31),
        ("sem a 1;\n  proc T = Pa $ Va;", 2, 15),
        ("sem a 1; proc T = Pa Va", 1, 24),
    ],
)
def test_syntax_errors_carry_location(source, line, col):
    with pytest.raises(PvSyntaxError) as info:
        parse_pv(source)
    assert (info.value.line, info.value.column) == (line, col)


def test_comments_and_dots():
    p = parse_pv("# header\nsem a 1; # trailing\nproc T = Pa.Va; # done\n")
    assert p.processes == (("T", (("P", "a"), ("V", "a"))),)


@given(seeds)
def test_source_round_trip(seed):
    p = random_pv_program(random.Random(seed), n_procs=3)
    assert parse_pv(p.to_source()) == p


# -- the two-lock example ------------------------------------------------------------


def test_swiss_progress_graph():
    k = to_precubical(swiss_flag())
    assert k.k(0) == oracles.swiss_vertices()
    assert set(progress_edges(k)) == oracles.swiss_edges()
    assert len(progress_edges(k)) == 56
    assert {b for b, _ in kept_squares(k)} == oracles.swiss_squares()
    assert len(k.k(2)) == 20
    assert validate_cubical(k) == []
    assert swiss_flag().grid_shape() == (5, 5)


def test_swiss_report():
    r = analyze(swiss_flag())
    expected = oracles.diagnostics(
        oracles.swiss_vertices(), oracles.swiss_edges(), (0, 0), (5, 5)
    )
    assert r.deadlocks == expected["deadlocks"] == {(2, 2)}
    assert r.unreachable == expected["unreachable"] == {(3, 3)}
    assert r.unsafe == expected["unsafe"] == {(2, 2)}
    assert {b for b, _ in r.forbidden_squares} == oracles.SWISS_EXCLUDED_SQUARES
    assert r.removed_edges == oracles.SWISS_REMOVED_EDGES
    paths, classes = oracles.grid_path_classes(
        oracles.swiss_edges(), oracles.swiss_squares(), (0, 0), (5, 5)
    )
    assert len(paths) == 84
    assert r.schedule_count == classes == 2


def test_single_process():
    r = analyze(parse_pv("sem a 1; proc T = Pa Va;"))
    assert r.grid_shape == (3,)
    assert not r.deadlocks and not r.unreachable and not r.unsafe
    assert r.schedule_count == 1


def test_dining_philosophers():
    p = dining_philosophers(3)
    r = analyze(p)
    vertices, edges = oracles.semaphore_grid(proc_actions(p), p.semaphores)
    final = tuple(p.grid_shape())
    expected = oracles.diagnostics(vertices, edges, (0, 0, 0), final)
    assert r.deadlocks == expected["deadlocks"] == {(2, 2, 2)}
    assert r.unsafe == expected["unsafe"]
    assert r.unreachable == expected["unreachable"]
    assert len(r.unreachable) == 1


def test_process_limit(monkeypatch):
    four = dining_philosophers(4)
    with pytest.raises(TooManyProcesses):
        analyze(four)
    monkeypatch.setenv("FLOWCAT_MAX_PROCESSES", "4")
    k = to_precubical(four, max_dim=1)
    assert len(k.k(0)) == 6**4


# -- properties against the direct semaphore oracle --------------------------------------


@settings(max_examples=80)
@given(seeds, st.integers(1, 3))
def test_grid_matches_oracle(seed, n):
    p = random_pv_program(random.Random(seed), n_procs=n, sems="abc")
    procs = proc_actions(p)
    k = to_precubical(p, max_dim=2)
    vertices, edges = oracles.semaphore_grid(procs, p.semaphores)
    assert k.k(0) == vertices
    assert set(progress_edges(k)) == edges
    assert kept_squares(k) == oracles.semaphore_squares(procs, p.semaphores)
    assert validate_cubical(k) == []


@settings(max_examples=80)
@given(seeds)
def test_report_matches_oracle(seed):
    p = random_pv_program(random.Random(seed), n_procs=2, sems="abc")
    r = analyze(p)
    vertices, edges = oracles.semaphore_grid(proc_actions(p), p.semaphores)
    final = tuple(p.grid_shape())
    expected = oracles.diagnostics(vertices, edges, (0, 0), final)
    assert r.deadlocks == expected["deadlocks"]
    assert r.unreachable == expected["unreachable"]
    assert r.unsafe == expected["unsafe"]
    squares = {b for b, _ in oracles.semaphore_squares(proc_actions(p), p.semaphores)}
    _, classes = oracles.grid_path_classes(edges, squares, (0, 0), final)
    assert r.schedule_count == classes


@given(seeds)
def test_diagnostic_invariants(seed):
    p = random_pv_program(random.Random(seed), n_procs=2, sems="abc", max_len=4)
    r = analyze(p)
    assert r.final not in r.deadlocks
    assert r.initial not in r.unreachable
    assert not r.unsafe & r.unreachable
    # a deadlock that can actually be reached is unsafe; unreachable ones are not
    assert r.deadlocks - r.unreachable <= r.unsafe


def _one_lock_each(rng, n_procs, sems="abc"):
    procs = []
    for i in range(n_procs):
        chosen = rng.sample(sems, rng.randint(1, len(sems)))
        released = chosen[:]
        rng.shuffle(released)
        acts = tuple(("P", s) for s in chosen) + tuple(("V", s) for s in released)
        procs.append((f"T{i + 1}", acts))
    return PvProgram({s: rng.randint(1, 2) for s in sems}, tuple(procs))


@given(seeds, st.sampled_from("abc"))
def test_raising_arity_only_adds_cubes(seed, sem):
    rng = random.Random(seed)
    p = _one_lock_each(rng, rng.randint(2, 3))
    before = to_precubical(p)
    after = to_precubical(p.with_arity(sem, p.semaphores[sem] + 1))
    for n in before.cells:
        assert before.k(n) <= after.k(n)


@given(seeds)
def test_enough_capacity_keeps_everything(seed):
    rng = random.Random(seed)
    p = _one_lock_each(rng, 2)
    for s in p.semaphores:
        p = p.with_arity(s, 2)
    r = analyze(p)
    assert not r.forbidden_squares and not r.removed_edges
    assert r.schedule_count == 1


@given(seeds)
def test_permuting_processes(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    p = random_pv_program(rng, n_procs=n, sems="ab")
    order = list(range(n))
    rng.shuffle(order)
    q = p.permuted(order)

    def move(v):
        return tuple(v[i] for i in order)

    rp, rq = analyze(p), analyze(q)
    for field in ("deadlocks", "unreachable", "unsafe"):
        assert {move(v) for v in getattr(rp, field)} == getattr(rq, field)
    assert {(move(s), move(t)) for s, t in rp.removed_edges} == rq.removed_edges
    assert rp.schedule_count == rq.schedule_count


def test_report_json_and_dot():
    r = analyze(swiss_flag())
    doc = json.loads(json.dumps(r.to_json()))
    assert doc["schedule_count"] == 2
    assert doc["deadlocks"] == [[2, 2]]
    assert doc["unreachable"] == [[3, 3]]
    assert doc["grid_shape"] == [5, 5]
    assert len(doc["removed_edges"]) == 4 and len(doc["forbidden_squares"]) == 5
    assert set(doc) >= {"forbidden_squares", "removed_edges", "deadlocks", "unreachable", "unsafe"}
    text = r.to_text()
    assert "deadlocks:         (2,2)" in text
    dot = report_to_dot(swiss_flag(), r)
    assert dot.count("dashed") == 4
    assert '"red"' in dot and '"lightgrey"' in dot
