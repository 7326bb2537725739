"""Existence conditions for decentralized bisimilarity supervisors.

Every check walks a deterministic structure breadth-first in canonical event
order, so the first violation found is reached by the shortest (then
lexicographically least) string, and that string is reported as the witness.

Co-observability uses the pair automaton ``H = det(G) || det(R)`` (whose
language is ``L(R)``) and, per agent, the observer of ``H`` under that
agent's observable events.  The observer state reached along ``s`` is the
finite form of ``P_i^{-1} P_i(s) ∩ L(R)``: it lists the ``(plant, spec)``
state pairs of every spec string the agent cannot tell apart from ``s``.

C&P semantics note: an illegal continuation ``s sigma`` is handled when
some agent controlling ``sigma`` has ``P_i^{-1}P_i(s) sigma ∩ L(R)`` empty,
i.e. it can disable ``sigma`` without ever blocking a legal string.  This is
the classical definition, and the one under which the supervisors built in
``synthesis`` are guaranteed to work.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from decbisim.automaton import observer, product
from decbisim.equivalence import BisimWitness, bisimilar
from decbisim.problem import CONJUNCTIVE, DISJUNCTIVE, GENERAL, ControlProblem

BISIM = "bisim-plant-detspec"
CONTROLLABLE = "lang-controllable"
COOBSERVABLE = "coobservability"
MARKED_CLOSED = "marked-lang-closed"

CP, DA = "cp", "da"


@dataclass(frozen=True)
class Confusion:
    agent: int
    confusing: Tuple[str, ...]


@dataclass(frozen=True)
class Witness:
    s: Tuple[str, ...]
    sigma: Optional[str] = None
    per_agent: Tuple[Confusion, ...] = ()
    counterexample: Optional[dict] = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {
            "s": list(self.s),
            "sigma": self.sigma,
            "per_agent": [{"i": c.agent, "confusing": list(c.confusing)} for c in self.per_agent],
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass(frozen=True)
class Entry:
    condition: str
    holds: bool
    witness: Optional[Witness] = None
    variant: Optional[str] = None
    sub: Tuple["Entry", ...] = ()
    bisim: Optional[BisimWitness] = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {
            "condition": self.condition,
            "holds": self.holds,
            "witness": self.witness.to_json() if self.witness else None,
        }
        if self.variant:
            out["variant"] = self.variant
        if self.sub:
            out["sub"] = [e.to_json() for e in self.sub]
        return out


@dataclass(frozen=True)
class Verdict:
    architecture: str
    entries: Tuple[Entry, ...]

    @property
    def overall(self) -> bool:
        return all(e.holds for e in self.entries)

    def __bool__(self):
        return self.overall

    def entry(self, condition: str) -> Entry:
        for e in self.entries:
            if e.condition == condition:
                return e
        raise KeyError(condition)

    def failing(self) -> List[Entry]:
        return [e for e in self.entries if not e.holds]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "architecture": self.architecture,
            "overall": self.overall,
            "conditions": [e.to_json() for e in self.entries],
        }


def _bfs(aut, alphabet):
    """States of a deterministic automaton in BFS order with access strings."""
    out = [(aut.initial, ())]
    seen = {aut.initial}
    i = 0
    while i < len(out):
        state, s = out[i]
        i += 1
        for ev in alphabet:
            nxt = aut.step(state, ev)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                out.append((nxt, s + (ev,)))
    return out


def check_lang_controllable(p: ControlProblem) -> Entry:
    """``L(R) Sigma_uc ∩ L(G) ⊆ L(R)``."""
    dg, dr = p.det_plant.automaton, p.det_spec.automaton
    h, pairs = p.pair_automaton
    unctrl = p.ordered(p.uncontrollable)
    for state, s in _bfs(h, p.alphabet):
        g, r = pairs[state]
        for ev in unctrl:
            if dg.step(g, ev) is not None and dr.step(r, ev) is None:
                return Entry(CONTROLLABLE, False, Witness(s, ev))
    return Entry(CONTROLLABLE, True)


def check_marked_closed(p: ControlProblem) -> Entry:
    """Every spec string marked by the plant is marked by the spec."""
    dg, dr = p.det_plant.automaton, p.det_spec.automaton
    h, pairs = p.pair_automaton
    for state, s in _bfs(h, p.alphabet):
        g, r = pairs[state]
        if g in dg.marked and r not in dr.marked:
            return Entry(MARKED_CLOSED, False, Witness(s))
    return Entry(MARKED_CLOSED, True)


def check_plant_detspec_bisim(p: ControlProblem) -> Entry:
    """``G || det(R)`` bisimilar to ``R``."""
    result = bisimilar(product(p.plant, p.det_spec.automaton), p.spec)
    if result.verdict:
        return Entry(BISIM, True, bisim=result)
    return Entry(BISIM, False, Witness((), None, (), result.counterexample), bisim=result)


def _default_sets(p: ControlProblem, which: str) -> Dict[int, FrozenSet[str]]:
    if which == "ce":
        return {ag.index: p.enable_default_of(ag) for ag in p.agents}
    if which == "cd":
        return {ag.index: p.disable_default_of(ag) for ag in p.agents}
    return {ag.index: ag.controllable for ag in p.agents}


def _problem_view(p: ControlProblem, mode: str):
    """Closures answering, for an ``H`` state and an event, whether the state
    triggers the condition (true string) or confuses an agent (estimate)."""
    dg, dr = p.det_plant.automaton, p.det_spec.automaton
    _, pairs = p.pair_automaton

    def illegal(state, ev):
        g, r = pairs[state]
        return dg.step(g, ev) is not None and dr.step(r, ev) is None

    def legal(state, ev):
        return dr.step(pairs[state][1], ev) is not None

    if mode == CP:
        return illegal, legal
    return legal, illegal


def _coobservable(p: ControlProblem, sets: Dict[int, FrozenSet[str]], mode: str) -> Entry:
    h, _ = p.pair_automaton
    trigger, confused_by = _problem_view(p, mode)
    agents = p.agents
    observers = [observer(h, ag.observable) for ag in agents]
    relevant = p.ordered(frozenset().union(*sets.values()))
    start = (h.initial, tuple(o.initial for o in observers))
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (state, ests), s = queue.popleft()
        for ev in relevant:
            if not trigger(state, ev):
                continue
            deciders = [k for k, ag in enumerate(agents) if ev in sets[ag.index]]
            if all(
                any(confused_by(x, ev) for x in observers[k].members[ests[k]])
                for k in deciders
            ):
                per_agent = tuple(
                    Confusion(agents[k].index, _confusing_string(p, agents[k], s, ev, confused_by))
                    for k in deciders
                )
                return Entry(COOBSERVABLE, False, Witness(s, ev, per_agent), variant=mode)
        for ev in p.alphabet:
            nxt = h.step(state, ev)
            if nxt is None:
                continue
            nests = tuple(
                observers[k].step(ests[k], ev) if ev in ag.observable else ests[k]
                for k, ag in enumerate(agents)
            )
            key = (nxt, nests)
            if key not in seen:
                seen.add(key)
                queue.append((key, s + (ev,)))
    return Entry(COOBSERVABLE, True, variant=mode)


def _confusing_string(p, agent, s, ev, confused_by) -> Tuple[str, ...]:
    """Shortest spec string the agent cannot tell from ``s`` that confuses it on ``ev``."""
    h, _ = p.pair_automaton
    target = tuple(e for e in s if e in agent.observable)
    start = (h.initial, 0)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (state, j), t = queue.popleft()
        if j == len(target) and confused_by(state, ev):
            return t
        for e in p.alphabet:
            nxt = h.step(state, e)
            if nxt is None:
                continue
            if e in agent.observable:
                if j == len(target) or target[j] != e:
                    continue
                key = (nxt, j + 1)
            else:
                key = (nxt, j)
            if key not in seen:
                seen.add(key)
                queue.append((key, t + (e,)))
    raise AssertionError("observer reported a confusion that has no witness")  # pragma: no cover


def check_cp_coobservable(p: ControlProblem, controllable: Optional[Dict[int, FrozenSet[str]]] = None) -> Entry:
    """C&P co-observability w.r.t. per-agent controllable sets (default ``Sigma_ci``)."""
    return _coobservable(p, controllable if controllable is not None else _default_sets(p, "c"), CP)


def check_da_coobservable(p: ControlProblem, controllable: Optional[Dict[int, FrozenSet[str]]] = None) -> Entry:
    """D&A co-observability w.r.t. per-agent controllable sets (default ``Sigma_ci``)."""
    return _coobservable(p, controllable if controllable is not None else _default_sets(p, "c"), DA)


def check_gen_coobservable(p: ControlProblem) -> Entry:
    if p.enable_default is None or p.disable_default is None:
        raise ValueError("general co-observability needs the enable/disable-default split")
    cp = check_cp_coobservable(p, _default_sets(p, "ce"))
    da = check_da_coobservable(p, _default_sets(p, "cd"))
    holds = cp.holds and da.holds
    witness = None if holds else (cp.witness if not cp.holds else da.witness)
    return Entry(COOBSERVABLE, holds, witness, variant=GENERAL, sub=(cp, da))


def check_coobservability(p: ControlProblem) -> Entry:
    if p.architecture == CONJUNCTIVE:
        return check_cp_coobservable(p)
    if p.architecture == DISJUNCTIVE:
        return check_da_coobservable(p)
    return check_gen_coobservable(p)


def decide_existence(p: ControlProblem) -> Verdict:
    """All four conditions for the problem's architecture."""
    entries = (
        check_plant_detspec_bisim(p),
        check_lang_controllable(p),
        check_coobservability(p),
        check_marked_closed(p),
    )
    return Verdict(p.architecture, entries)
