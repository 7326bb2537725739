import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from decbisim import fixtures as F
from decbisim.automaton import Automaton
from decbisim.equivalence import bisimilar
from decbisim.oracle import Limits, language_difference, naive_bisim, random_problem
from decbisim.synthesis import (
    CompatibilityError,
    FusionRule,
    build_closed_loop,
    compatibility_violations,
    fuse,
    local_supervisor,
    synth_supervisor_automaton,
    synthesize,
)


@pytest.mark.parametrize("make, arch", [
    (F.example1, "conjunctive"),
    (F.example1, "disjunctive"),
    (F.example2, "disjunctive"),
    (F.example3, "conjunctive"),
    (F.example4, "general"),
])
def test_examples_synthesize(make, arch):
    p = make(arch)
    res = synthesize(p)
    assert res.ok
    assert len(res.supervisors) == len(p.agents)
    for sup in res.supervisors:
        assert compatibility_violations(sup, p) == []
    loop = res.closed_loop.automaton
    assert bisimilar(loop, p.spec).verdict
    assert naive_bisim(loop, p.spec)
    assert language_difference(loop, p.spec) is None


@pytest.mark.parametrize("make, arch", [
    (F.example2, "conjunctive"),
    (F.example3, "disjunctive"),
    (F.example4, "conjunctive"),
    (F.example4, "disjunctive"),
])
def test_refusals_carry_verdict(make, arch):
    res = synthesize(make(arch))
    assert not res.ok
    assert not res.verdict.overall
    assert res.closed_loop is None


def test_supervisor_states_are_estimates():
    p = F.example3()
    sup = synth_supervisor_automaton(p, 1)
    assert not sup.paired
    assert sup.automaton.is_deterministic
    # agent 1 sees only a and c; before a it cannot tell g-branches apart
    init = sup.estimates[sup.automaton.initial]
    assert len(init) > 1


def test_dump_state_only_when_needed():
    p = F.example4()
    names = [synth_supervisor_automaton(p, ag.index).dump for ag in p.agents]
    assert names[0] == "zd1"
    for ag in p.agents:
        sup = synth_supervisor_automaton(p, ag.index)
        if sup.dump is None:
            assert not any(s.startswith("zd") for s in sup.automaton.states)


def test_fuse_rules():
    uc = frozenset({"u"})
    d1, d2 = frozenset({"a", "b"}), frozenset({"b", "c"})
    assert fuse(FusionRule("conjunctive", uc), [d1, d2]) == {"b", "u"}
    assert fuse(FusionRule("disjunctive", uc), [d1, d2]) == {"a", "b", "c", "u"}
    gen = FusionRule("general", uc, frozenset({"a", "b"}), frozenset({"c"}))
    assert fuse(gen, [d1, d2]) == {"b", "c", "u"}
    with pytest.raises(ValueError):
        fuse(gen, [d1], arity=2)
    with pytest.raises(ValueError):
        fuse(FusionRule("bogus", uc), [d1])


def test_closed_loop_detects_incompatible_supervisor():
    p = F.example3()
    sup = local_supervisor(p, 1)
    a = sup.automaton
    # drop the self-loop on an unobservable event
    ev = sorted(sup.agent.unobservable(p.alphabet))[0]
    broken = Automaton(a.states, a.alphabet,
                       tuple(t for t in a.transitions if not (t[0] == a.initial and t[1] == ev)),
                       a.initial, a.marked)
    bad = dataclasses.replace(sup, automaton=broken)
    assert compatibility_violations(bad, p)
    with pytest.raises(CompatibilityError):
        build_closed_loop(p, [bad, local_supervisor(p, 2)], FusionRule.for_problem(p))


def test_closed_loop_marking_from_plant():
    p = F.example1()
    loop = synthesize(p).closed_loop
    for name, (x, _) in loop.provenance.items():
        assert (name in loop.automaton.marked) == (x in p.plant.marked)


problems = st.integers(0, 10_000).map(lambda seed: random_problem(seed, Limits(observe=0.4)))


@settings(max_examples=150, deadline=None)
@given(problems)
def test_random_synthesis_is_sound(p):
    res = synthesize(p)  # raises SynthesisDefect if the loop is not bisimilar to R
    if res.ok:
        assert naive_bisim(res.closed_loop.automaton, p.spec)
