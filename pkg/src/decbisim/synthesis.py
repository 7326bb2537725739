"""Local supervisors, decision fusion and the supervised closed loop."""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from decbisim.automaton import Automaton, observer
from decbisim.checks import Verdict, decide_existence
from decbisim.equivalence import BisimWitness, bisimilar
from decbisim.problem import CONJUNCTIVE, DISJUNCTIVE, GENERAL, AgentProfile, ControlProblem


class CompatibilityError(RuntimeError):
    """A supervisor lacks a self-loop or an uncontrollable transition it must have."""


class SynthesisDefect(RuntimeError):
    """The synthesized closed loop failed its own bisimulation check."""


@dataclass(frozen=True)
class SupervisorAutomaton:
    """``S_i`` together with the estimate each non-dump state stands for."""

    automaton: Automaton
    agent: AgentProfile
    estimates: Dict[str, FrozenSet[str]]
    dump: Optional[str]
    paired: bool


@dataclass(frozen=True)
class LocalSupervisor:
    automaton: Automaton
    decisions: Dict[str, FrozenSet[str]]
    agent: AgentProfile
    dump: Optional[str] = None

    def decision(self, state: str) -> FrozenSet[str]:
        return self.decisions[state]


@dataclass(frozen=True)
class FusionRule:
    tag: str
    uncontrollable: FrozenSet[str]
    enable_default: FrozenSet[str] = frozenset()
    disable_default: FrozenSet[str] = frozenset()

    @classmethod
    def for_problem(cls, p: ControlProblem, tag: Optional[str] = None) -> "FusionRule":
        return cls(
            tag or p.architecture,
            p.uncontrollable,
            p.enable_default or frozenset(),
            p.disable_default or frozenset(),
        )


@dataclass(frozen=True)
class ClosedLoop:
    automaton: Automaton
    provenance: Dict[str, Tuple[str, Tuple[str, ...]]]


@dataclass(frozen=True)
class SynthesisResult:
    verdict: Verdict
    supervisors: Optional[Tuple[LocalSupervisor, ...]] = None
    rule: Optional[FusionRule] = None
    closed_loop: Optional[ClosedLoop] = None
    relation: Optional[BisimWitness] = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.supervisors is not None


def dump_name(i: int) -> str:
    return f"zd{i}"


def synth_supervisor_automaton(p: ControlProblem, i: int, paired: Optional[bool] = None) -> SupervisorAutomaton:
    """Observer-based ``S_i``.

    Estimates are subsets of ``det(R)`` states, or of ``det(G) || det(R)``
    pairs when ``paired`` (needed by the disjunctive and general decisions).
    The dump state is added only if some uncontrollable observable event
    can leave the current estimate.
    """
    if paired is None:
        paired = p.architecture != CONJUNCTIVE
    ag = p.agent(i)
    base = p.pair_automaton[0] if paired else p.det_spec.automaton
    obs = observer(base, ag.observable)
    o = obs.automaton
    sigma = p.alphabet
    unobs = ag.unobservable(sigma)
    unctrl = ag.uncontrollable(sigma)
    dump = dump_name(i)
    trans = []
    uses_dump = False
    for y in o.states:
        for ev in sigma:
            nxt = o.step(y, ev)
            if ev in ag.observable and nxt is not None:
                trans.append((y, ev, nxt))
            elif ev in unobs:
                trans.append((y, ev, y))
            elif ev in unctrl:
                trans.append((y, ev, dump))
                uses_dump = True
    states = o.states
    if uses_dump:
        states = states + (dump,)
        trans.extend((dump, ev, dump) for ev in sigma if ev in unobs or ev in unctrl)
    aut = Automaton(states, sigma, trans, o.initial, frozenset(states))
    return SupervisorAutomaton(aut, ag, dict(obs.members), dump if uses_dump else None, paired)


def _estimate_tests(p: ControlProblem, sup: SupervisorAutomaton):
    """``may(y, ev)``: some estimated spec string continues with ``ev``.
    ``safe(y, ev)``: no estimated spec string continues with ``ev`` outside the spec."""
    dg, dr = p.det_plant.automaton, p.det_spec.automaton
    pairs = p.pair_automaton[1]

    def spec_state(x):
        return pairs[x][1] if sup.paired else x

    def may(y, ev):
        return any(dr.step(spec_state(x), ev) is not None for x in sup.estimates[y])

    def safe(y, ev):
        if not sup.paired:
            raise ValueError("disjunctive and general decisions need a paired observer")
        for x in sup.estimates[y]:
            g, r = pairs[x]
            if dg.step(g, ev) is not None and dr.step(r, ev) is None:
                return False
        return True

    return may, safe


def synth_decisions(p: ControlProblem, sup: SupervisorAutomaton, arch: Optional[str] = None) -> Dict[str, FrozenSet[str]]:
    """Decision map ``psi_i`` for one supervisor automaton."""
    arch = arch or p.architecture
    if arch != CONJUNCTIVE and not sup.paired:
        raise ValueError(f"{arch} decisions need a supervisor built on the paired observer")
    ag = sup.agent
    uc = p.uncontrollable
    may, safe = _estimate_tests(p, sup)
    if arch == CONJUNCTIVE:
        default = (p.controllable - ag.controllable) | uc
        pick = lambda y: {ev for ev in ag.controllable if may(y, ev)}
    elif arch == DISJUNCTIVE:
        default = uc
        pick = lambda y: {ev for ev in ag.controllable if safe(y, ev)}
    elif arch == GENERAL:
        cei, cdi = p.enable_default_of(ag), p.disable_default_of(ag)
        default = uc | (p.enable_default - cei)
        pick = lambda y: {ev for ev in cei if may(y, ev)} | {ev for ev in cdi if safe(y, ev)}
    else:
        raise ValueError(f"unknown architecture {arch!r}")
    out = {}
    for y in sup.automaton.states:
        out[y] = frozenset(default) if y == sup.dump else frozenset(default | pick(y))
    return out


def local_supervisor(p: ControlProblem, i: int, arch: Optional[str] = None) -> LocalSupervisor:
    arch = arch or p.architecture
    sup = synth_supervisor_automaton(p, i, paired=arch != CONJUNCTIVE)
    return LocalSupervisor(sup.automaton, synth_decisions(p, sup, arch), sup.agent, sup.dump)


def fuse(rule: FusionRule, decisions: Sequence[FrozenSet[str]], arity: Optional[int] = None) -> FrozenSet[str]:
    """Global enabled-event set from one local decision per agent."""
    if arity is not None and len(decisions) != arity:
        raise ValueError(f"expected {arity} decisions, got {len(decisions)}")
    if not decisions:
        raise ValueError("fusion needs at least one decision")
    both = frozenset.intersection(*map(frozenset, decisions))
    either = frozenset.union(*map(frozenset, decisions))
    if rule.tag == CONJUNCTIVE:
        return both | rule.uncontrollable
    if rule.tag == DISJUNCTIVE:
        return either | rule.uncontrollable
    if rule.tag == GENERAL:
        return (both & rule.enable_default) | (either & rule.disable_default) | rule.uncontrollable
    raise ValueError(f"unknown fusion rule {rule.tag!r}")


def compatibility_violations(sup: LocalSupervisor, p: ControlProblem, arch: Optional[str] = None) -> List[str]:
    """Structural scan of the three supervisor invariants; empty when compatible."""
    arch = arch or p.architecture
    a, ag = sup.automaton, sup.agent
    sigma = p.alphabet
    problems = []
    for y in a.states:
        for ev in ag.unobservable(sigma):
            if a.successors(y, ev) != (y,):
                problems.append(f"state {y}: no self-loop on unobservable {ev}")
        for ev in ag.uncontrollable(sigma):
            if not a.successors(y, ev):
                problems.append(f"state {y}: uncontrollable {ev} undefined")
        d = sup.decisions[y]
        others = p.controllable - ag.controllable
        if arch == CONJUNCTIVE and not others <= d:
            problems.append(f"state {y}: conjunctive default not enabled")
        if arch == DISJUNCTIVE and d & others:
            problems.append(f"state {y}: disjunctive default not disabled")
        if arch == GENERAL:
            if not (p.enable_default - ag.controllable) <= d or d & (p.disable_default - ag.controllable):
                problems.append(f"state {y}: general defaults violated")
    return problems


def _loop_name(x: str, ys: Sequence[str]) -> str:
    return "/".join((x,) + tuple(ys))


def build_closed_loop(p: ControlProblem, supervisors: Sequence[LocalSupervisor], rule: FusionRule) -> ClosedLoop:
    """Supervised system: plant moves, every supervisor moves, event enabled by fusion."""
    g = p.plant
    sups = list(supervisors)
    for sup in sups:
        if set(sup.automaton.alphabet) != set(g.alphabet):
            raise ValueError("supervisor alphabet differs from the plant's")
    checked = [set() for _ in sups]

    def verify(k, y):
        if y in checked[k]:
            return
        sup, ag = sups[k], sups[k].agent
        for ev in ag.unobservable(g.alphabet):
            if sup.automaton.successors(y, ev) != (y,):
                raise CompatibilityError(f"agent {ag.index}, state {y}: {ev} is not a self-loop")
        for ev in ag.uncontrollable(g.alphabet):
            if not sup.automaton.successors(y, ev):
                raise CompatibilityError(f"agent {ag.index}, state {y}: {ev} is undefined")
        checked[k].add(y)

    start = (g.initial, tuple(s.automaton.initial for s in sups))
    order = [start]
    seen = {start}
    trans = []
    queue = deque([start])
    while queue:
        x, ys = queue.popleft()
        for k, y in enumerate(ys):
            verify(k, y)
        enabled = fuse(rule, [s.decision(y) for s, y in zip(sups, ys)], len(sups))
        for ev in g.alphabet:
            if ev not in enabled:
                continue
            nys = tuple(s.automaton.step(y, ev) for s, y in zip(sups, ys))
            if any(y is None for y in nys):
                continue
            for x2 in g.successors(x, ev):
                nxt = (x2, nys)
                trans.append(((x, ys), ev, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
    names = {c: _loop_name(*c) for c in order}
    aut = Automaton(
        states=tuple(names[c] for c in order),
        alphabet=g.alphabet,
        transitions=tuple((names[s], e, names[t]) for s, e, t in trans),
        initial=names[start],
        marked=frozenset(names[c] for c in order if c[0] in g.marked),
    )
    return ClosedLoop(aut, {names[c]: c for c in order})


def synthesize(p: ControlProblem) -> SynthesisResult:
    """Decide existence; on success build, fuse, close the loop and verify it."""
    verdict = decide_existence(p)
    if not verdict.overall:
        return SynthesisResult(verdict)
    sups = tuple(local_supervisor(p, ag.index) for ag in p.agents)
    for sup in sups:
        bad = compatibility_violations(sup, p)
        if bad:
            raise SynthesisDefect(f"agent {sup.agent.index} incompatible: {bad[0]}")
    rule = FusionRule.for_problem(p)
    loop = build_closed_loop(p, sups, rule)
    relation = bisimilar(loop.automaton, p.spec)
    if not relation.verdict:
        raise SynthesisDefect("closed loop is not bisimilar to the specification")
    return SynthesisResult(verdict, sups, rule, loop, relation)
