import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcat import cellspace as cs
from flowcat.enumerated import (
    FlowMorphism,
    Pi0Flow,
    associativity_failures,
    branching_space,
    compose_morphisms,
    descent_failures,
    edge_failures,
    from_presentation,
    hom_enumerate,
    identity_morphism,
    induced_morphism,
    iso_pi0,
    merging_space,
    opposite,
    pi0_flow,
    pi0_from_json,
    pi0_from_presentation,
    pi0_to_json,
    product,
    product_pi0,
    terminal_flow,
)
from flowcat.errors import CyclicFlow, SizeLimitExceeded
from flowcat.generators import random_presentation
from flowcat.precubical import grid_precubical, realize_flow
from flowcat.presentation import (
    add_homotopy,
    add_letter,
    add_states,
    concat_globs,
    directed_segment,
    glob,
    merge_states,
    new_presentation,
    reverse_presentation,
)

seeds = st.integers(0, 10_000)


def relabel(x: Pi0Flow, f) -> Pi0Flow:
    def g(c):
        return ("c", c)

    hom = {(f(a), f(b)): tuple(g(c) for c in cl) for (a, b), cl in x.hom.items()}
    compose = {
        (f(a), f(b), f(c)): {(g(p), g(q)): g(r) for (p, q), r in t.items()}
        for (a, b, c), t in x.compose.items()
    }
    return Pi0Flow(tuple(f(s) for s in x.states), hom, compose)


def small(seed, **kw):
    return random_presentation(random.Random(seed), **kw)


def grid_flow(a, b, filled=True):
    return realize_flow(grid_precubical((a, b), max_dim=2 if filled else 1))


def test_glob_s0_hom_spaces():
    x = from_presentation(glob(cs.sphere_disk(0, "sphere")))
    assert len(x.space(0, 1).vertices) == 2
    assert len(x.space(0, 0).vertices) == 0


def test_directed_segment_has_one_path():
    assert from_presentation(directed_segment()).path_count() == 1


def test_cyclic_presentation_rejected():
    p = add_states(new_presentation(), "ab")
    p = merge_states(add_letter(p, "a", "b"), "a", "b")
    with pytest.raises(CyclicFlow):
        from_presentation(p)


def test_swiss_is_associative(swiss_presentation):
    x = from_presentation(swiss_presentation)
    assert associativity_failures(x) == []
    assert edge_failures(x) == []
    assert descent_failures(x) == []


def test_terminal_flow():
    one = terminal_flow()
    assert len(one.space(0, 0).vertices) == 1
    assert one.compose[(0, 0, 0)] == {("u", "u"): "u"}
    assert iso_pi0(product(one, one), one) is not None


@given(seeds)
def test_unique_morphism_to_terminal(seed):
    x = pi0_from_presentation(small(seed))
    assert len(hom_enumerate(x, terminal_flow())) == 1


def test_product_of_segments():
    seg = from_presentation(directed_segment())
    sq = product(seg, seg)
    assert len(sq.states) == 4
    assert len(sq.space((0, 0), (1, 1)).vertices) == 1


@given(seeds)
def test_product_with_terminal_is_identity(seed):
    x = from_presentation(small(seed))
    assert iso_pi0(pi0_flow(product(x, terminal_flow())), pi0_flow(x)) is not None


@settings(max_examples=30)
@given(seeds, seeds)
def test_product_commutes_with_pi0(s1, s2):
    x = from_presentation(small(s1, max_states=3))
    y = from_presentation(small(s2, max_states=3))
    px, py = pi0_flow(x), pi0_flow(y)
    prod = pi0_flow(product(x, y))
    for (a, b), cl in prod.hom.items():
        assert len(cl) == len(px.classes(a[0], b[0])) * len(py.classes(a[1], b[1]))
    assert iso_pi0(prod, product_pi0(px, py)) is not None
    assert associativity_failures(product(x, y)) == []


def test_pi0_examples(swiss_presentation):
    sw = pi0_flow(from_presentation(swiss_presentation))
    assert len(sw.classes((0, 0), (5, 5))) == 2
    assert len(pi0_flow(from_presentation(glob(cs.sphere_disk(1, "disk")))).classes(0, 1)) == 1
    g = pi0_flow(from_presentation(grid_flow(2, 2)))
    assert associativity_failures(g) == []


@given(seeds)
def test_pi0_from_presentation_matches_enumeration(seed):
    p = small(seed)
    direct = pi0_from_presentation(p)
    via = pi0_flow(from_presentation(p))
    assert direct.counts() == via.counts()
    assert iso_pi0(direct, via) is not None


@given(seeds)
def test_constructors_are_associative(seed):
    x = from_presentation(small(seed))
    assert associativity_failures(x) == []
    assert edge_failures(x) == []
    assert descent_failures(x) == []
    assert associativity_failures(pi0_flow(x)) == []


@given(seeds)
def test_iso_finds_relabeling(seed):
    x = pi0_from_presentation(small(seed))
    y = relabel(x, lambda s: ("s", 10 - s))
    f = iso_pi0(x, y)
    assert f is not None and f.problems() == []


def test_iso_rejects_different_class_counts():
    s0 = glob(cs.sphere_disk(0, "sphere"))
    d1 = glob(cs.sphere_disk(1, "disk"))
    assert iso_pi0(from_presentation(s0), from_presentation(d1)) is None


def _two_step(collapse: bool):
    # x1, x2: a -> b and y: b -> c; either x1.y ~ x2.y plus a spare letter a -> c,
    # or no relation at all. Both have hom counts 2, 1, 2.
    p = add_states(new_presentation(), "abc")
    for name, (s, t) in {"x1": "ab", "x2": "ab", "y": "bc"}.items():
        p = add_letter(p, s, t, name)
    if collapse:
        p = add_letter(add_homotopy(p, ("x1", "y"), ("x2", "y")), "a", "c", "z")
    return pi0_from_presentation(p)


def test_iso_distinguishes_composition():
    free, collapsed = _two_step(False), _two_step(True)
    assert free.counts() == collapsed.counts()
    assert iso_pi0(free, collapsed) is None
    assert iso_pi0(collapsed, _two_step(True)) is not None


def test_iso_size_limit():
    big = pi0_from_presentation(grid_flow(4, 4))
    with pytest.raises(SizeLimitExceeded):
        iso_pi0(big, big)
    assert iso_pi0(big, big, max_states=25) is not None


@given(seeds)
def test_hom_from_segment_counts_classes(seed):
    x = pi0_from_presentation(small(seed))
    seg = pi0_from_presentation(directed_segment())
    assert len(hom_enumerate(seg, x)) == x.class_count()


def test_hom_from_point_counts_states(swiss_corner):
    x = pi0_from_presentation(swiss_corner)
    pt = Pi0Flow((0,), {}, {})
    assert len(hom_enumerate(pt, x)) == len(x.states)


def test_hom_from_segment_swiss(swiss_presentation):
    x = pi0_from_presentation(swiss_presentation)
    seg = pi0_from_presentation(directed_segment())
    assert len(hom_enumerate(seg, x, max_states=36)) == x.class_count()


@given(seeds)
def test_enumerated_morphisms_are_valid(seed):
    x = pi0_from_presentation(small(seed, max_states=3))
    y = pi0_from_presentation(small(seed + 1, max_states=3))
    keys = set()
    for f in hom_enumerate(x, y):
        assert f.problems() == []
        keys.add(f.key())
    assert len(keys) == len(hom_enumerate(x, y))


def test_morphism_composition_and_identity():
    x = pi0_from_presentation(grid_flow(1, 1))
    idx = identity_morphism(x)
    for f in hom_enumerate(x, x):
        assert compose_morphisms(idx, f).key() == f.key()
        assert compose_morphisms(f, idx).key() == f.key()


def test_induced_morphism_fills_square():
    unfilled = from_presentation(grid_flow(1, 1, filled=False))
    filled = from_presentation(grid_flow(1, 1))
    f = induced_morphism(unfilled, filled)
    assert f.problems() == []
    image = set(f.class_maps[((0, 0), (1, 1))].values())
    assert len(image) == 1


def test_branching_examples():
    pt = cs.point()
    chain = from_presentation(concat_globs([pt, pt]))
    b = branching_space(chain)
    assert len(b) == 2
    assert {(0, 1, ("z1",)), (0, 2, ("z1", "z2"))} in b
    m = merging_space(chain)
    assert {(1, 2, ("z2",)), (0, 2, ("z1", "z2"))} in m and len(m) == 2
    assert len(branching_space(from_presentation(glob(cs.sphere_disk(0, "sphere"))))) == 2
    assert len(merging_space(from_presentation(glob(cs.sphere_disk(1, "disk"))))) == 1


def test_branching_swiss_at_origin(swiss_presentation):
    x = from_presentation(swiss_presentation)
    at_origin = [c for c in branching_space(x) if next(iter(c))[0] == (0, 0)]
    # the filled square at the origin makes right.up ~ up.right, so both
    # first moves fall into one class
    assert len(at_origin) == 1


def test_branching_counts_unfilled_choice():
    x = from_presentation(grid_flow(1, 1, filled=False))
    at_origin = [c for c in branching_space(x) if next(iter(c))[0] == (0, 0)]
    assert len(at_origin) == 2


def _as_partition(classes, key):
    return {frozenset(key(v) for v in c) for c in classes}


@given(seeds)
def test_merging_is_reversed_branching(seed):
    p = small(seed)
    x = from_presentation(p)
    merged = _as_partition(merging_space(x), lambda v: v)
    via_op = _as_partition(branching_space(opposite(x)), lambda v: (v[1], v[0], v[2]))
    assert merged == via_op
    rev = from_presentation(reverse_presentation(p))
    via_rev = _as_partition(
        branching_space(rev), lambda v: (v[1], v[0], tuple(reversed(v[2])))
    )
    assert merged == via_rev


def test_pi0_json_roundtrip(swiss_corner):
    x = pi0_from_presentation(swiss_corner)
    y = pi0_from_json(pi0_to_json(x))
    assert pi0_to_json(y) == pi0_to_json(x)
    assert iso_pi0(x, y) is not None


def test_invalid_morphism_detected():
    x = pi0_from_presentation(grid_flow(1, 1, filled=False))
    assert identity_morphism(x).problems() == []
    # send both corner routes to the same class: the codomain is the filled square
    y = pi0_from_presentation(grid_flow(1, 1))
    collapse = FlowMorphism(
        x, y, {s: s for s in x.states}, {pair: {c: y.classes(*pair)[0] for c in cl} for pair, cl in x.hom.items()}
    )
    assert collapse.problems() == []
    wrong = FlowMorphism(x, x, {s: (0, 0) for s in x.states}, {})
    assert wrong.problems()
    swapped = FlowMorphism(
        x, x, {s: s for s in x.states}, {pair: {c: cl[-1] for c in cl} for pair, cl in x.hom.items()}
    )
    assert swapped.problems()
