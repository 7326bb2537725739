"""Brute-force reference implementations and random problem generation.

Nothing here uses determinization, minimization, observers or partition
refinement from the rest of the package.  The property oracle enumerates
concrete strings breadth-first over the raw (nondeterministic) plant and
spec, tracking plain state subsets, and evaluates each definition's
quantifiers literally at every string.  Strings whose full tracking
signature was already produced by a shorter string are not expanded again;
that keeps enumeration finite without changing any verdict.
"""

import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

from decbisim.automaton import Automaton, AutomatonError
from decbisim.problem import AgentProfile, ControlProblem, CONJUNCTIVE, DISJUNCTIVE, GENERAL

PROPERTIES = (
    "lang-controllable",
    "cp-coobservable",
    "da-coobservable",
    "gen-coobservable",
    "marked-lang-closed",
    "bisim-plant-detspec",
)


@dataclass(frozen=True)
class BoundedLanguage:
    depth: int
    strings: Dict[Tuple[str, ...], bool]

    @property
    def language(self) -> FrozenSet[Tuple[str, ...]]:
        return frozenset(self.strings)

    @property
    def marked(self) -> FrozenSet[Tuple[str, ...]]:
        return frozenset(s for s, m in self.strings.items() if m)


def enumerate_language(a: Automaton, k: int) -> BoundedLanguage:
    """Every string of length at most ``k`` generated by ``a``, tagged with marking."""
    if k < 0:
        raise ValueError("depth must be non-negative")
    strings = {}
    frontier = [((), frozenset([a.initial]))]
    for depth in range(k + 1):
        nxt = []
        for s, states in frontier:
            strings[s] = bool(states & a.marked)
            if depth == k:
                continue
            for ev in a.alphabet:
                img = frozenset(t for x in states for t in a.successors(x, ev))
                if img:
                    nxt.append((s + (ev,), img))
        frontier = nxt
    return BoundedLanguage(k, strings)


def language_difference(a: Automaton, b: Automaton, k: Optional[int] = None):
    """Shortest string on which ``a`` and ``b`` disagree (generation or marking).

    Returns ``None`` when none exists within depth ``k`` (``None`` = unbounded).
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AutomatonError("automata must share one alphabet")
    start = (frozenset([a.initial]), frozenset([b.initial]))
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (sa, sb), s = queue.popleft()
        if bool(sa) != bool(sb) or bool(sa & a.marked) != bool(sb & b.marked):
            return s
        if not sa or (k is not None and len(s) >= k):
            continue
        for ev in a.alphabet:
            nxt = (
                frozenset(t for x in sa for t in a.successors(x, ev)),
                frozenset(t for x in sb for t in b.successors(x, ev)),
            )
            if not nxt[0] and not nxt[1]:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, s + (ev,)))
    return None


def naive_bisim(a: Automaton, b: Automaton) -> bool:
    """Greatest bisimulation by repeated elimination from the full pair table."""
    if set(a.alphabet) != set(b.alphabet):
        raise AutomatonError("automata must share one alphabet")
    rel = {
        (p, q) for p in a.states for q in b.states
        if (p in a.marked) == (q in b.marked)
    }
    changed = True
    while changed:
        changed = False
        for p, q in list(rel):
            ok = True
            for ev in a.alphabet:
                sp, sq = a.successors(p, ev), b.successors(q, ev)
                if any(not any((p2, q2) in rel for q2 in sq) for p2 in sp):
                    ok = False
                elif any(not any((p2, q2) in rel for p2 in sp) for q2 in sq):
                    ok = False
                if not ok:
                    break
            if not ok:
                rel.discard((p, q))
                changed = True
    return (a.initial, b.initial) in rel


@dataclass(frozen=True)
class OracleResult:
    prop: str
    holds: bool
    witness: Optional[Tuple[Tuple[str, ...], Optional[str]]]
    depth: Optional[int]
    exhaustive: bool

    @property
    def label(self) -> str:
        return "exact" if self.exhaustive else "bounded only"


def _img(aut, states, ev):
    return frozenset(t for x in states for t in aut.successors(x, ev))


def _estimates(p: ControlProblem, ag: AgentProfile, seeds):
    """Close a set of (plant subset, spec subset) pairs under the agent's
    unobservable events, staying inside ``L(R)``."""
    out = set(seeds)
    stack = list(seeds)
    hidden = [e for e in p.alphabet if e not in ag.observable]
    while stack:
        ga, rb = stack.pop()
        for ev in hidden:
            r2 = _img(p.spec, rb, ev)
            if r2:
                nxt = (_img(p.plant, ga, ev), r2)
                if nxt not in out:
                    out.add(nxt)
                    stack.append(nxt)
    return frozenset(out)


def _illegal(p, ga, rb, ev):
    return bool(_img(p.plant, ga, ev)) and not _img(p.spec, rb, ev)


def _legal(p, ga, rb, ev):
    return bool(_img(p.spec, rb, ev))


def _cp_ok(p, ga, rb, ev, ests, sets):
    """C&P at one string/event: illegal continuations need an agent that is never confused."""
    if ev not in frozenset().union(*sets.values()) or not _illegal(p, ga, rb, ev):
        return True
    for ag, est in zip(p.agents, ests):
        if ev in sets[ag.index] and not any(_legal(p, g2, r2, ev) for g2, r2 in est):
            return True
    return False


def _da_ok(p, ga, rb, ev, ests, sets):
    """D&A at one string/event: legal continuations need an agent for whom enabling is safe."""
    if ev not in frozenset().union(*sets.values()) or not _legal(p, ga, rb, ev):
        return True
    for ag, est in zip(p.agents, ests):
        if ev in sets[ag.index] and not any(_illegal(p, g2, r2, ev) for g2, r2 in est):
            return True
    return False


def _sets(p, kind):
    if kind == "ce":
        return {ag.index: ag.controllable & (p.enable_default or frozenset()) for ag in p.agents}
    if kind == "cd":
        return {ag.index: ag.controllable & (p.disable_default or frozenset()) for ag in p.agents}
    return {ag.index: ag.controllable for ag in p.agents}


def _naive_det(a: Automaton) -> Automaton:
    start = frozenset([a.initial])
    order, seen, trans = [start], {start}, []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for ev in a.alphabet:
            nxt = _img(a, cur, ev)
            if nxt:
                trans.append((cur, ev, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
    name = {m: "s%d" % i for i, m in enumerate(order)}
    return Automaton(
        [name[m] for m in order], a.alphabet,
        [(name[x], e, name[y]) for x, e, y in trans], name[start],
        {name[m] for m in order if m & a.marked},
    )


def _naive_product(a: Automaton, b: Automaton) -> Automaton:
    start = (a.initial, b.initial)
    order, seen, trans = [start], {start}, []
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for ev in a.alphabet:
            for p2 in a.successors(p, ev):
                for q2 in b.successors(q, ev):
                    trans.append(((p, q), ev, (p2, q2)))
                    if (p2, q2) not in seen:
                        seen.add((p2, q2))
                        order.append((p2, q2))
                        queue.append((p2, q2))
    name = {pq: "p%d" % i for i, pq in enumerate(order)}
    return Automaton(
        [name[x] for x in order], a.alphabet,
        [(name[x], e, name[y]) for x, e, y in trans], name[start],
        {name[x] for x in order if x[0] in a.marked and x[1] in b.marked},
    )


def oracle_check(prop: str, p: ControlProblem, k: Optional[int] = None) -> OracleResult:
    """Evaluate one existence condition by string enumeration up to depth ``k``.

    ``k=None`` runs until no new tracking signature appears, which is exact.
    """
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}")
    if prop == "bisim-plant-detspec":
        holds = naive_bisim(_naive_product(p.plant, _naive_det(p.spec)), p.spec)
        return OracleResult(prop, holds, None, None, True)

    tests = []
    needs_estimates = prop.endswith("coobservable")
    if prop == "lang-controllable":
        unctrl = [e for e in p.alphabet if e in p.uncontrollable]
        tests.append(lambda ga, rb, ests: next(
            (e for e in unctrl if _img(p.plant, ga, e) and not _img(p.spec, rb, e)), None))
    elif prop == "marked-lang-closed":
        tests.append(lambda ga, rb, ests: "" if (ga & p.plant.marked and not rb & p.spec.marked) else None)
    else:
        clauses = {
            "cp-coobservable": [(_cp_ok, _sets(p, "c"))],
            "da-coobservable": [(_da_ok, _sets(p, "c"))],
            "gen-coobservable": [(_cp_ok, _sets(p, "ce")), (_da_ok, _sets(p, "cd"))],
        }[prop]
        for ok, sets in clauses:
            tests.append(lambda ga, rb, ests, ok=ok, sets=sets: next(
                (e for e in p.alphabet if not ok(p, ga, rb, e, ests, sets)), None))

    g0, r0 = frozenset([p.plant.initial]), frozenset([p.spec.initial])
    ests0 = tuple(_estimates(p, ag, [(g0, r0)]) for ag in p.agents) if needs_estimates else ()
    start = (g0, r0, ests0)
    seen = {start}
    frontier = [((), start)]
    depth = 0
    while frontier:
        for s, (ga, rb, ests) in frontier:
            for test in tests:
                ev = test(ga, rb, ests)
                if ev is not None:
                    return OracleResult(prop, False, (s, ev or None), k, True)
        nxt = []
        for s, (ga, rb, ests) in frontier:
            for ev in p.alphabet:
                r2 = _img(p.spec, rb, ev)
                if not r2:
                    continue
                g2 = _img(p.plant, ga, ev)
                n_ests = ()
                if needs_estimates:
                    n_ests = tuple(
                        _observe(p, ag, est, ev) if ev in ag.observable else est
                        for ag, est in zip(p.agents, ests)
                    )
                key = (g2, r2, n_ests)
                if key not in seen:
                    seen.add(key)
                    nxt.append((s + (ev,), key))
        if nxt and k is not None and depth >= k:
            return OracleResult(prop, True, None, k, False)
        frontier = nxt
        depth += 1
    return OracleResult(prop, True, None, k, True)


def _observe(p, ag, est, ev):
    moved = [(_img(p.plant, g, ev), _img(p.spec, r, ev)) for g, r in est]
    return _estimates(p, ag, [m for m in moved if m[1]])


# -- random instances -------------------------------------------------------


@dataclass(frozen=True)
class Limits:
    plant_states: int = 6
    spec_states: int = 5
    agents: int = 3
    events: int = 5
    nondeterminism: float = 0.3
    density: float = 0.35
    control: float = 0.45
    observe: float = 0.6


def random_automaton(rng: random.Random, n_states: int, alphabet, density=0.35, nondeterminism=0.3) -> Automaton:
    states = [f"x{i}" for i in range(max(1, n_states))]
    trans = []
    for s in states:
        for ev in alphabet:
            if rng.random() < density:
                trans.append((s, ev, rng.choice(states)))
                if rng.random() < nondeterminism:
                    trans.append((s, ev, rng.choice(states)))
    marked = {s for s in states if rng.random() < 0.5}
    return Automaton(states, alphabet, sorted(set(trans)), states[0], marked)


def random_problem(seed, limits: Limits = Limits()) -> ControlProblem:
    """Reproducible random problem; the spec is a pruned copy of the plant,
    so its language is contained in the plant's by construction."""
    if min(limits.plant_states, limits.spec_states, limits.agents) < 1 or limits.events < 0:
        raise ValueError("limits must be positive")
    rng = random.Random(seed)
    alphabet = [chr(ord("a") + i) for i in range(rng.randint(min(1, limits.events), limits.events))]
    if not alphabet:
        alphabet = []
    n_plant = rng.randint(1, limits.plant_states)
    nondet = limits.nondeterminism if rng.random() < 0.5 else 0.0
    plant = random_automaton(rng, n_plant, alphabet, limits.density, nondet)

    keep_n = rng.randint(1, min(n_plant, limits.spec_states))
    keep = {plant.initial} | set(rng.sample(plant.states[1:], keep_n - 1))
    kept_trans = [t for t in plant.transitions if t[0] in keep and t[2] in keep and rng.random() < 0.8]
    marked = {s for s in plant.order_states(plant.marked) if s in keep and rng.random() < 0.85}
    spec_states = [s for s in plant.states if s in keep]
    spec = Automaton(spec_states, alphabet, kept_trans, plant.initial, marked)

    n_agents = rng.randint(1, limits.agents)
    agents = []
    for i in range(1, n_agents + 1):
        ctrl = {e for e in alphabet if rng.random() < limits.control}
        obs = {e for e in alphabet if rng.random() < limits.observe}
        agents.append(AgentProfile(i, ctrl, obs))
    arch = rng.choice([CONJUNCTIVE, DISJUNCTIVE, GENERAL])
    ce = cd = None
    if arch == GENERAL:
        ctrl_all = sorted(set().union(*(a.controllable for a in agents)))
        ce = {e for e in ctrl_all if rng.random() < 0.5}
        cd = set(ctrl_all) - ce
    return ControlProblem(plant, spec, tuple(agents), arch, ce, cd)
