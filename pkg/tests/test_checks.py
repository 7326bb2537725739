import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from decbisim import fixtures as F
from decbisim.automaton import Automaton
from decbisim.checks import (
    BISIM,
    CONTROLLABLE,
    COOBSERVABLE,
    MARKED_CLOSED,
    check_cp_coobservable,
    check_da_coobservable,
    check_gen_coobservable,
    check_lang_controllable,
    check_marked_closed,
    check_plant_detspec_bisim,
    decide_existence,
)
from decbisim.oracle import Limits, random_problem
from decbisim.problem import AgentProfile, ControlProblem, InclusionError, ProblemError


def confusions(entry):
    return {c.agent: c.confusing for c in entry.witness.per_agent}


def test_example1_all_conditions_hold():
    p = F.example1()
    assert p.uncontrollable == {"a", "c"}
    v = decide_existence(p)
    assert [e.condition for e in v.entries] == [BISIM, CONTROLLABLE, COOBSERVABLE, MARKED_CLOSED]
    assert v.overall


def test_example2_cp_fails_at_g():
    p = F.example2()
    cp = check_cp_coobservable(p)
    assert not cp.holds
    assert cp.witness.s == () and cp.witness.sigma == "g"
    # agent 1 cannot tell g from b.g, agent 2 cannot tell it from a.g
    assert confusions(cp) == {1: ("b",), 2: ("a",)}
    assert check_da_coobservable(p).holds
    assert decide_existence(p).overall


def test_example3_da_fails_at_g():
    p = F.example3()
    da = check_da_coobservable(p)
    assert not da.holds
    assert da.witness.s == () and da.witness.sigma == "g"
    assert confusions(da) == {1: ("b",), 2: ("a",)}
    assert check_cp_coobservable(p).holds
    assert decide_existence(p).overall
    assert not decide_existence(p.with_architecture("disjunctive")).overall


def test_example4_needs_general():
    p = F.example4()
    cp, da = check_cp_coobservable(p), check_da_coobservable(p)
    assert not cp.holds and not da.holds
    assert (cp.witness.s, cp.witness.sigma) == ((), "a")
    assert (da.witness.s, da.witness.sigma) == ((), "f")
    gen = check_gen_coobservable(p)
    assert gen.holds and gen.variant == "general"
    assert [e.variant for e in gen.sub] == ["cp", "da"]
    assert decide_existence(p).overall


def test_example4_other_split_fails():
    p = F.example4(enable_default=("a",), disable_default=("e", "f"))
    assert not check_gen_coobservable(p).holds


def test_controllability_witness():
    # spec forbids uncontrollable b after a
    g = Automaton(("0", "1", "2"), ("a", "b"), (("0", "a", "1"), ("1", "b", "2")), "0", {"2"})
    r = Automaton(("0", "1"), ("a", "b"), (("0", "a", "1"),), "0", {"1"})
    p = ControlProblem(g, r, (AgentProfile(1, {"a"}, {"a", "b"}),))
    e = check_lang_controllable(p)
    assert not e.holds and e.witness.s == ("a",) and e.witness.sigma == "b"
    assert check_marked_closed(p).holds
    p2 = ControlProblem(g, r, (AgentProfile(1, {"a", "b"}, {"a", "b"}),))
    assert check_lang_controllable(p2).holds


def test_marked_closure_witness():
    g = Automaton(("0", "1"), ("a",), (("0", "a", "1"),), "0", {"1"})
    r = Automaton(("0", "1"), ("a",), (("0", "a", "1"),), "0", set())
    e = check_marked_closed(ControlProblem(g, r, (AgentProfile(1, {"a"}, {"a"}),)))
    assert not e.holds and e.witness.s == ("a",)


def test_bisim_condition_fails_on_pruned_branch():
    # the spec keeps only one of two nondeterministic a-branches
    g = Automaton(("0", "1", "2", "3"), ("a", "b"),
                  (("0", "a", "1"), ("0", "a", "2"), ("1", "b", "3")), "0", {"3"})
    r = Automaton(("0", "1", "3"), ("a", "b"), (("0", "a", "1"), ("1", "b", "3")), "0", {"3"})
    e = check_plant_detspec_bisim(ControlProblem(g, r, (AgentProfile(1, {"a", "b"}, {"a", "b"}),)))
    assert not e.holds
    assert e.witness.counterexample is not None


def test_deterministic_problem_satisfies_bisim_condition():
    p = F.example1()
    assert p.plant.is_deterministic and p.spec.is_deterministic
    assert check_plant_detspec_bisim(p).holds


def test_problem_validation():
    g, r = F.example2().plant, F.example2().spec
    with pytest.raises(ProblemError):
        ControlProblem(g, r, ())
    with pytest.raises(ProblemError):
        ControlProblem(g, r, (AgentProfile(1, {"z"}, set()),))
    with pytest.raises(ProblemError):
        ControlProblem(g, r, (AgentProfile(1, {"a"}, set()),), "general", {"a"}, {"a"})
    with pytest.raises(InclusionError):
        ControlProblem(r, g, (AgentProfile(1, {"a"}, set()),))


def test_verdict_json():
    doc = decide_existence(F.example2("conjunctive")).to_json()
    assert doc["schema"] == 1 and doc["overall"] is False
    co = [c for c in doc["conditions"] if c["condition"] == COOBSERVABLE][0]
    assert co["variant"] == "cp"
    assert co["witness"] == {"s": [], "sigma": "g",
                             "per_agent": [{"i": 1, "confusing": ["b"]}, {"i": 2, "confusing": ["a"]}]}


problems = st.integers(0, 10_000).map(lambda seed: random_problem(seed, Limits(observe=0.4)))


@settings(max_examples=150, deadline=None)
@given(problems)
def test_general_reduces_to_cp_and_da(p):
    ctrl = p.controllable
    as_cp = p.with_architecture("general", ctrl, frozenset())
    as_da = p.with_architecture("general", frozenset(), ctrl)
    assert check_gen_coobservable(as_cp).holds == check_cp_coobservable(p).holds
    assert check_gen_coobservable(as_da).holds == check_da_coobservable(p).holds


def _see_more(p, k):
    ag = p.agents[k]
    agents = list(p.agents)
    agents[k] = AgentProfile(ag.index, ag.controllable, frozenset(p.alphabet))
    return dataclasses.replace(p, agents=tuple(agents))


@settings(max_examples=150, deadline=None)
@given(problems, st.integers(0, 2))
def test_coobservability_monotone_in_observation(p, k):
    k %= len(p.agents)
    q = _see_more(p, k)
    if check_cp_coobservable(p).holds:
        assert check_cp_coobservable(q).holds
    if check_da_coobservable(p).holds:
        assert check_da_coobservable(q).holds


@settings(max_examples=150, deadline=None)
@given(problems, st.integers(0, 4))
def test_controllability_monotone_in_control(p, n):
    ev = p.alphabet[n % len(p.alphabet)] if p.alphabet else None
    first = p.agents[0]
    agents = (AgentProfile(first.index, first.controllable | {ev} - {None}, first.observable),) + p.agents[1:]
    q = ControlProblem(p.plant, p.spec, agents)
    if check_lang_controllable(p).holds:
        assert check_lang_controllable(q).holds
    full = tuple(AgentProfile(a.index, frozenset(p.alphabet), a.observable) for a in p.agents)
    assert check_lang_controllable(ControlProblem(p.plant, p.spec, full)).holds


@settings(max_examples=100, deadline=None)
@given(problems)
def test_witness_strings_are_in_spec(p):
    from decbisim.automaton import in_language

    for e in decide_existence(p).entries:
        if e.holds or e.witness is None or e.condition == BISIM:
            continue
        assert in_language(p.spec, e.witness.s)
        for c in e.witness.per_agent:
            ag = p.agent(c.agent)
            assert in_language(p.spec, c.confusing)
            assert [x for x in c.confusing if x in ag.observable] == [x for x in e.witness.s if x in ag.observable]
