import itertools

import pytest
from hypothesis import given, settings

from decbisim.automaton import (
    Automaton,
    AutomatonError,
    accepts,
    active_events,
    determinize,
    observer,
    product,
    project,
    reachable,
    sound_bound,
    subset_construction,
    walk,
)
from decbisim.equivalence import bisimilar
from decbisim.fixtures import fix_b
from decbisim.oracle import enumerate_language

from conftest import automata


def strings(alphabet, k):
    for n in range(k + 1):
        yield from itertools.product(alphabet, repeat=n)


def test_construction_validates():
    with pytest.raises(AutomatonError):
        Automaton(("x",), ("a",), (("x", "a", "y"),), "x", set())
    with pytest.raises(AutomatonError):
        Automaton(("x",), ("a",), (("x", "b", "x"),), "x", set())
    with pytest.raises(AutomatonError):
        Automaton(("x",), ("a",), (), "z", set())
    with pytest.raises(AutomatonError):
        Automaton(("x",), ("a",), (), "x", {"q"})


def test_accepts_fix_b():
    g = fix_b()
    assert accepts(g, ()) == "in-language"
    assert accepts(g, ("a", "b")) == "marked"
    assert accepts(g, ("a", "c")) == "in-language"
    assert accepts(g, ("b",)) == "neither"
    with pytest.raises(AutomatonError):
        accepts(g, ("z",))


def test_active_events_fix_b():
    g = fix_b()
    assert active_events(g, "0") == {"a"}
    assert active_events(g, "3") == frozenset()


def test_determinize_fix_b():
    d = determinize(fix_b())
    assert len(d) == 4
    assert d.automaton.is_deterministic
    assert sorted(map(sorted, d.members.values())) == [["0"], ["1", "2"], ["3"], ["4"]]


def test_determinize_merges_equivalent_states():
    # two marked sinks reached on different events collapse into one state
    a = Automaton(("0", "1", "2"), ("a", "b"), (("0", "a", "1"), ("0", "b", "2")), "0", {"1", "2"})
    assert len(determinize(a)) == 2


def test_product_single_state_identity():
    g = fix_b()
    top = Automaton(("u",), g.alphabet, tuple(("u", e, "u") for e in g.alphabet), "u", {"u"})
    assert bisimilar(product(g, top), g).verdict


def test_product_requires_same_alphabet():
    g = fix_b()
    other = Automaton(("u",), ("a",), (), "u", set())
    with pytest.raises(AutomatonError):
        product(g, other)


def test_project():
    assert project(("a", "b", "c", "b"), {"b"}) == ("b", "b")
    assert project((), {"a"}) == ()


def test_observer_fix_b():
    d = determinize(fix_b()).automaton
    obs = observer(d, {"b", "c"})
    # a is unobservable: the initial estimate already covers {1,2}
    assert len(obs.members[obs.initial]) == 2


def test_walk_and_reachable():
    a = Automaton(("0", "1", "2"), ("a",), (("0", "a", "1"),), "0", set())
    assert reachable(a).states == ("0", "1")
    d = determinize(fix_b()).automaton
    assert walk(d, ("a", "b")) in d.marked
    assert walk(d, ("b",)) is None


def test_sound_bound():
    g = fix_b()
    assert sound_bound(g, g) == 17


@settings(max_examples=60, deadline=None)
@given(automata(), automata())
def test_product_is_intersection(a, b):
    p = product(a, b)
    for s in strings(a.alphabet, 4):
        ra, rb, rp = accepts(a, s), accepts(b, s), accepts(p, s)
        assert (rp != "neither") == (ra != "neither" and rb != "neither")
        assert (rp == "marked") == (ra == "marked" and rb == "marked")


@settings(max_examples=60, deadline=None)
@given(automata())
def test_determinize_preserves_languages(a):
    d = determinize(a).automaton
    assert d.is_deterministic
    assert enumerate_language(a, 5) == enumerate_language(d, 5)


@settings(max_examples=60, deadline=None)
@given(automata())
def test_determinize_is_minimal(a):
    d = determinize(a).automaton
    # no two distinct states of the minimal DFA are bisimilar
    for p, q in itertools.combinations(d.states, 2):
        left = Automaton(d.states, d.alphabet, d.transitions, p, d.marked)
        right = Automaton(d.states, d.alphabet, d.transitions, q, d.marked)
        assert not bisimilar(left, right).verdict
    # and the subset automaton is never smaller
    assert len(subset_construction(a)) >= len(d.states)


@settings(max_examples=60, deadline=None)
@given(automata())
def test_project_idempotent(a):
    obs = {"a", "c"}
    for s in strings(a.alphabet, 3):
        assert project(project(s, obs), obs) == project(s, obs)


def _estimate(d, target, obs):
    """States of ``d`` reached by some string whose projection is ``target``."""
    seen = {(d.initial, 0)}
    stack = [(d.initial, 0)]
    while stack:
        x, j = stack.pop()
        for ev, y in d.moves(x):
            if ev in obs:
                if j == len(target) or target[j] != ev:
                    continue
                key = (y, j + 1)
            else:
                key = (y, j)
            if key not in seen:
                seen.add(key)
                stack.append(key)
    return {x for x, j in seen if j == len(target)}


@settings(max_examples=60, deadline=None)
@given(automata())
def test_observer_matches_brute_force(a):
    obs = {"a", "b"}
    d = determinize(a).automaton
    o = observer(d, obs)
    for s in strings(a.alphabet, 4):
        if walk(d, s) is None:
            continue
        got = walk(o.automaton, project(s, obs))
        assert set(o.members[got]) == _estimate(d, project(s, obs), obs)
