"""Strong bisimulation and simulation with marking, plus witnesses.

Bisimilarity is decided by partition refinement over the disjoint union of
both state spaces.  When the answer is negative, the round history of the
refinement is unwound into a finite move tree: the attacker picks a move on
one side, and every possible reply on the other side leads to a pair that
was separated in an earlier round (or has no reply at all).
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from decbisim.automaton import Automaton, AutomatonError
from decbisim.partition import refine, signature, split_level

A, B = "a", "b"


@dataclass(frozen=True)
class BisimWitness:
    """Result of a (bi)simulation query.

    ``relation`` holds ``(state_of_a, state_of_b)`` pairs when the verdict is
    true; ``counterexample`` holds a move tree when it is false.
    """

    verdict: bool
    relation: FrozenSet[Tuple[str, str]] = frozenset()
    counterexample: Optional[dict] = None
    full_relation: Optional[FrozenSet[Tuple[Tuple[str, str], Tuple[str, str]]]] = field(
        default=None, compare=False
    )

    def __bool__(self):
        return self.verdict

    def symmetric(self) -> FrozenSet[Tuple[Tuple[str, str], Tuple[str, str]]]:
        """The relation over tagged states, closed under inverse."""
        tagged = {((A, p), (B, q)) for p, q in self.relation}
        return frozenset(tagged | {(y, x) for x, y in tagged})

    def to_lines(self) -> List[str]:
        return [f"pair {p} {q}" for p, q in sorted(self.relation)]

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.verdict:
            out["relation"] = [list(p) for p in sorted(self.relation)]
        else:
            out["counterexample"] = self.counterexample
        return out


def _check_alphabets(a: Automaton, b: Automaton) -> None:
    if set(a.alphabet) != set(b.alphabet):
        raise AutomatonError("automata must share one alphabet")


def _union(a: Automaton, b: Automaton):
    states = [(A, s) for s in a.states] + [(B, s) for s in b.states]
    moves = {}
    for tag, aut in ((A, a), (B, b)):
        for s in aut.states:
            moves[(tag, s)] = tuple((e, (tag, t)) for e, t in aut.moves(s))
    marked = {(A, s): s in a.marked for s in a.states}
    marked.update({(B, s): s in b.marked for s in b.states})
    return states, moves, marked


def bisimilar(a: Automaton, b: Automaton, full: bool = False) -> BisimWitness:
    """Decide ``a`` bisimilar to ``b`` with marking respected in both directions."""
    _check_alphabets(a, b)
    states, moves, marked = _union(a, b)
    history = refine(states, moves, marked)
    block = history[-1]
    x0, y0 = (A, a.initial), (B, b.initial)
    if block[x0] == block[y0]:
        relation = frozenset(
            (p, q) for p in a.states for q in b.states if block[(A, p)] == block[(B, q)]
        )
        full_rel = None
        if full:
            full_rel = frozenset(
                (s, t) for s in states for t in states if block[s] == block[t]
            )
        return BisimWitness(True, relation, None, full_rel)
    tree = _distinguish(x0, y0, history, moves, marked)
    return BisimWitness(False, frozenset(), tree)


def _distinguish(p, q, history, moves, marked):
    level = split_level(history, p, q)
    if level == 0:
        return {"marking": {p[0]: p[1], q[0]: q[1]}}
    prev = history[level - 1]
    sig_p = signature(p, moves, prev)
    sig_q = signature(q, moves, prev)
    for attacker, defender, sig_d in ((p, q, sig_q), (q, p, sig_p)):
        for ev, target in moves[attacker]:
            if (ev, prev[target]) in sig_d:
                continue
            replies = []
            for ev2, reply in moves[defender]:
                if ev2 != ev:
                    continue
                replies.append(
                    {"state": reply[1], "then": _distinguish(target, reply, history, moves, marked)}
                )
            return {
                "side": attacker[0],
                "from": {attacker[0]: attacker[1], defender[0]: defender[1]},
                "event": ev,
                "state": target[1],
                "replies": replies,
            }
    raise AssertionError("split without a distinguishing move")  # pragma: no cover


def replay_counterexample(a: Automaton, b: Automaton, tree: dict, simulation: bool = False) -> bool:
    """Check that a move tree really refutes the pair at its root.

    With ``simulation=True`` only attacks from ``a`` are allowed and marking
    mismatches must have ``a`` marked and ``b`` unmarked.
    """
    auts = {A: a, B: b}

    def check(node, pa, pb):
        if "marking" in node:
            ma, mb = pa in a.marked, pb in b.marked
            if node["marking"] != {A: pa, B: pb}:
                return False
            return (ma and not mb) if simulation else ma != mb
        side = node["side"]
        if simulation and side != A:
            return False
        other = B if side == A else A
        here = pa if side == A else pb
        there = pb if side == A else pa
        if node["from"] != {side: here, other: there}:
            return False
        ev, target = node["event"], node["state"]
        if target not in auts[side].successors(here, ev):
            return False
        answers = set(auts[other].successors(there, ev))
        if {r["state"] for r in node["replies"]} != answers:
            return False
        for r in node["replies"]:
            na, nb = (target, r["state"]) if side == A else (r["state"], target)
            if not check(r["then"], na, nb):
                return False
        return True

    return check(tree, a.initial, b.initial)


def simulates(a: Automaton, b: Automaton) -> BisimWitness:
    """Decide whether ``a`` is simulated by ``b`` (every move of ``a`` is
    matched by ``b``; marked states of ``a`` map to marked states of ``b``).

    The relation is the greatest simulation, found by deleting pairs until
    nothing changes; the round in which a pair died drives the counterexample.
    """
    _check_alphabets(a, b)
    alive = {
        (p, q) for p in a.states for q in b.states
        if not (p in a.marked and q not in b.marked)
    }
    died: Dict[Tuple[str, str], int] = {
        (p, q): 0 for p in a.states for q in b.states if (p, q) not in alive
    }
    round_no = 0
    while True:
        round_no += 1
        dead = set()
        for p, q in alive:
            for ev, p2 in a.moves(p):
                if not any((p2, q2) in alive for q2 in b.successors(q, ev)):
                    dead.add((p, q))
                    break
        if not dead:
            break
        alive -= dead
        for pair in dead:
            died[pair] = round_no
    start = (a.initial, b.initial)
    if start in alive:
        return BisimWitness(True, frozenset(alive))
    return BisimWitness(False, frozenset(), _sim_tree(a, b, start, died))


def _sim_tree(a, b, pair, died):
    p, q = pair
    when = died[pair]
    if when == 0:
        return {"marking": {A: p, B: q}}
    for ev, p2 in a.moves(p):
        replies = b.successors(q, ev)
        if all(died.get((p2, q2), when) < when for q2 in replies):
            return {
                "side": A,
                "from": {A: p, B: q},
                "event": ev,
                "state": p2,
                "replies": [
                    {"state": q2, "then": _sim_tree(a, b, (p2, q2), died)} for q2 in replies
                ],
            }
    raise AssertionError("pair removed without a witness move")  # pragma: no cover
