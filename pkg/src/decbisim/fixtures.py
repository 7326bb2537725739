"""Canonical problem instances.

``example1`` is built from its textual languages: the plant and spec are
prefix closures of a Kleene star over explicit cycle words, with the home
location (the start of every cycle) as the only marked state.

``example2`` to ``example4`` are small automata built around one decision
point each: for example 2, ``g`` is illegal at the start while ``a g`` and
``b g`` are legal; for example 3, ``g`` is legal while ``a g`` and ``b g``
are not; for example 4, ``a`` is illegal while ``c a`` and ``b a`` are
legal, and ``f`` is legal while ``c f`` and ``b f`` are not.  Each carries
one nondeterministic branch that the spec mirrors, so the bisimulation
condition is exercised rather than implied by determinism.

``fix_b`` is the five-state branching automaton used across the tests:
``0 -a-> 1``, ``0 -a-> 2``, ``1 -b-> 3``, ``2 -c-> 4`` with ``3`` marked.
"""

from decbisim.automaton import Automaton, determinize
from decbisim.problem import AgentProfile, ControlProblem, CONJUNCTIVE, DISJUNCTIVE, GENERAL


def fix_b() -> Automaton:
    return Automaton(
        ("0", "1", "2", "3", "4"),
        ("a", "b", "c"),
        (("0", "a", "1"), ("0", "a", "2"), ("1", "b", "3"), ("2", "c", "4")),
        "0",
        {"3"},
    )


def cycle_automaton(words, alphabet, home="h") -> Automaton:
    """Prefix closure of ``(w1 + w2 + ...)*`` with only ``home`` marked.

    Built as a nondeterministic star of chains and then determinized.
    """
    states = [home]
    trans = []
    for k, word in enumerate(words):
        prev = home
        for j, ev in enumerate(word):
            nxt = home if j == len(word) - 1 else f"w{k}_{j}"
            if nxt != home:
                states.append(nxt)
            trans.append((prev, ev, nxt))
            prev = nxt
    nfa = Automaton(states, alphabet, trans, home, {home})
    return determinize(nfa).automaton


EX1_ALPHABET = ("a", "b1", "b2", "b3", "c", "d1", "d2", "d3")


def _ex1_word(i, j):
    return ("a", f"b{i}", "c", "a", f"d{j}", "a")


EX1_PLANT_PAIRS = [(i, j) for i in (1, 2, 3) for j in (1, 2, 3)]
EX1_SPEC_PAIRS = [(1, 1), (1, 3), (2, 2), (3, 1), (3, 3)]


def example1_plant() -> Automaton:
    return cycle_automaton([_ex1_word(i, j) for i, j in EX1_PLANT_PAIRS], EX1_ALPHABET)


def example1_spec() -> Automaton:
    return cycle_automaton([_ex1_word(i, j) for i, j in EX1_SPEC_PAIRS], EX1_ALPHABET)


def example1(architecture=CONJUNCTIVE) -> ControlProblem:
    agents = (
        AgentProfile(1, {"b1", "b2", "d1", "d2", "d3"}, {"a", "c", "b1", "b2", "d1", "d2"}),
        AgentProfile(2, {"b3", "d3"}, {"a", "c", "b3", "d3"}),
    )
    return ControlProblem(example1_plant(), example1_spec(), agents, architecture)


def _aut(states, alphabet, trans, marked):
    return Automaton(tuple(states), tuple(alphabet), tuple(trans), states[0], frozenset(marked))


EX2_ALPHABET = ("a", "b", "c", "d", "e", "f", "g")


def example2(architecture=DISJUNCTIVE) -> ControlProblem:
    plant = _aut(
        ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"], EX2_ALPHABET,
        [("x0", "a", "x1"), ("x0", "b", "x2"), ("x0", "g", "x3"),
         ("x1", "g", "x4"), ("x1", "g", "x6"), ("x6", "e", "x7"),
         ("x2", "g", "x5")],
        ["x4", "x5", "x7"],
    )
    spec = _aut(
        ["q0", "q1", "q2", "q3", "q4", "q5", "q6"], EX2_ALPHABET,
        [("q0", "a", "q1"), ("q0", "b", "q2"),
         ("q1", "g", "q3"), ("q1", "g", "q5"), ("q5", "e", "q6"),
         ("q2", "g", "q4")],
        ["q3", "q4", "q6"],
    )
    agents = (
        AgentProfile(1, {"c", "e", "f", "g"}, {"a", "c", "d", "e", "f"}),
        AgentProfile(2, {"d", "e", "f", "g"}, {"b", "c", "d", "e", "f"}),
    )
    return ControlProblem(plant, spec, agents, architecture)


EX3_ALPHABET = ("a", "b", "c", "d", "e", "g")


def example3(architecture=CONJUNCTIVE) -> ControlProblem:
    plant = _aut(
        ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"], EX3_ALPHABET,
        [("x0", "g", "x1"), ("x0", "g", "x6"), ("x6", "e", "x7"),
         ("x0", "a", "x2"), ("x0", "b", "x3"),
         ("x2", "g", "x4"), ("x3", "g", "x5")],
        ["x1", "x2", "x3", "x7"],
    )
    spec = _aut(
        ["q0", "q1", "q2", "q3", "q4", "q5"], EX3_ALPHABET,
        [("q0", "g", "q1"), ("q0", "g", "q4"), ("q4", "e", "q5"),
         ("q0", "a", "q2"), ("q0", "b", "q3")],
        ["q1", "q2", "q3", "q5"],
    )
    agents = (
        AgentProfile(1, {"g", "e"}, {"a", "c"}),
        AgentProfile(2, {"g", "c", "d"}, {"b", "d"}),
    )
    return ControlProblem(plant, spec, agents, architecture)


EX4_ALPHABET = ("a", "b", "c", "d", "e", "f")


def example4(architecture=GENERAL, enable_default=("f", "e"), disable_default=("a",)) -> ControlProblem:
    plant = _aut(
        ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10"], EX4_ALPHABET,
        [("x0", "a", "x3"), ("x0", "f", "x4"), ("x0", "f", "x9"), ("x9", "e", "x10"),
         ("x0", "c", "x1"), ("x0", "b", "x2"),
         ("x1", "a", "x5"), ("x1", "f", "x6"),
         ("x2", "a", "x7"), ("x2", "f", "x8")],
        ["x4", "x5", "x7", "x10"],
    )
    spec = _aut(
        ["q0", "q1", "q2", "q3", "q4", "q5", "q6", "q7"], EX4_ALPHABET,
        [("q0", "f", "q3"), ("q0", "f", "q6"), ("q6", "e", "q7"),
         ("q0", "c", "q1"), ("q0", "b", "q2"),
         ("q1", "a", "q4"), ("q2", "a", "q5")],
        ["q3", "q4", "q5", "q7"],
    )
    agents = (
        AgentProfile(1, {"a", "f", "e"}, {"b", "e"}),
        AgentProfile(2, {"a", "f"}, {"c", "d"}),
    )
    if architecture != GENERAL:
        return ControlProblem(plant, spec, agents, architecture)
    return ControlProblem(plant, spec, agents, GENERAL, frozenset(enable_default), frozenset(disable_default))
