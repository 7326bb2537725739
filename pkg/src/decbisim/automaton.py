"""Finite nondeterministic automata with marking, and the language-level
constructions built on them (product, determinization, observers)."""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from decbisim.partition import refine

Transition = Tuple[str, str, str]
EventString = Tuple[str, ...]

IN_LANGUAGE = "in-language"
MARKED = "marked"
NEITHER = "neither"


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Automaton:
    """``G = (X, Sigma, alpha, x0, X_m)`` with a partial, possibly
    nondeterministic transition relation.

    States and events are strings; their declaration order is the canonical
    order used everywhere output must be reproducible.
    """

    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Tuple[Transition, ...]
    initial: str
    marked: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        object.__setattr__(self, "marked", frozenset(self.marked))
        if len(set(self.states)) != len(self.states):
            raise AutomatonError("duplicate state ids")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AutomatonError("duplicate event ids")
        states = set(self.states)
        if self.initial not in states:
            raise AutomatonError(f"initial state {self.initial!r} is not declared")
        if not self.marked <= states:
            extra = sorted(self.marked - states)
            raise AutomatonError(f"marked states not declared: {extra}")
        events = set(self.alphabet)
        for src, ev, dst in self.transitions:
            if src not in states or dst not in states:
                raise AutomatonError(f"transition ({src} {ev} {dst}) uses an undeclared state")
            if ev not in events:
                raise AutomatonError(f"transition ({src} {ev} {dst}) uses undeclared event {ev!r}")

    # -- indexes -----------------------------------------------------------

    @cached_property
    def _state_pos(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def _event_pos(self) -> Dict[str, int]:
        return {e: i for i, e in enumerate(self.alphabet)}

    @cached_property
    def _succ(self) -> Dict[Tuple[str, str], Tuple[str, ...]]:
        out: Dict[Tuple[str, str], list] = {}
        for src, ev, dst in self.transitions:
            bucket = out.setdefault((src, ev), [])
            if dst not in bucket:
                bucket.append(dst)
        pos = self._state_pos
        return {k: tuple(sorted(v, key=pos.__getitem__)) for k, v in out.items()}

    @cached_property
    def _active(self) -> Dict[str, FrozenSet[str]]:
        out: Dict[str, set] = {s: set() for s in self.states}
        for src, ev, _ in self.transitions:
            out[src].add(ev)
        return {s: frozenset(v) for s, v in out.items()}

    @cached_property
    def _moves(self) -> Dict[str, Tuple[Tuple[str, str], ...]]:
        """Outgoing (event, target) pairs per state in canonical order."""
        out = {}
        for s in self.states:
            out[s] = tuple(
                (e, t) for e in self.alphabet for t in self._succ.get((s, e), ())
            )
        return out

    def successors(self, state: str, event: str) -> Tuple[str, ...]:
        return self._succ.get((state, event), ())

    def moves(self, state: str) -> Tuple[Tuple[str, str], ...]:
        return self._moves[state]

    def step(self, state: str, event: str) -> Optional[str]:
        """Unique successor for deterministic automata (``None`` if undefined)."""
        succ = self._succ.get((state, event), ())
        if len(succ) > 1:
            raise AutomatonError(f"state {state!r} is nondeterministic on {event!r}")
        return succ[0] if succ else None

    def order_states(self, states: Iterable[str]) -> Tuple[str, ...]:
        return tuple(sorted(states, key=self._state_pos.__getitem__))

    def order_events(self, events: Iterable[str]) -> Tuple[str, ...]:
        return tuple(sorted(events, key=self._event_pos.__getitem__))

    @cached_property
    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self._succ.values())

    def is_marked(self, state: str) -> bool:
        return state in self.marked

    def image(self, states: Iterable[str], event: str) -> FrozenSet[str]:
        return frozenset(t for s in states for t in self._succ.get((s, event), ()))

    def run(self, s: Sequence[str]) -> FrozenSet[str]:
        """``alpha(x0, s)`` as a set (empty when ``s`` is not generated)."""
        current = frozenset([self.initial])
        for ev in s:
            current = self.image(current, ev)
            if not current:
                break
        return current

    def __str__(self):
        return (
            f"Automaton({len(self.states)} states, {len(self.alphabet)} events, "
            f"{len(self.transitions)} transitions)"
        )


@dataclass(frozen=True)
class DeterministicView:
    """A deterministic automaton plus, for each of its states, the set of
    source states that state stands for."""

    automaton: Automaton
    members: Dict[str, FrozenSet[str]]

    def __post_init__(self):
        if not self.automaton.is_deterministic:
            raise AutomatonError("DeterministicView wraps a nondeterministic automaton")

    @property
    def states(self):
        return self.automaton.states

    @property
    def initial(self):
        return self.automaton.initial

    def step(self, state, event):
        return self.automaton.step(state, event)

    def __len__(self):
        return len(self.automaton.states)


def subset_name(members: Iterable[str]) -> str:
    return "{" + ",".join(members) + "}"


def pair_name(p: str, q: str) -> str:
    return f"({p},{q})"


def active_events(a: Automaton, x: str) -> FrozenSet[str]:
    """``E_G(x)``: events with at least one transition out of ``x``."""
    if x not in a._active:
        raise AutomatonError(f"unknown state {x!r}")
    return a._active[x]


def _check_events(a: Automaton, s: Sequence[str]) -> None:
    for ev in s:
        if ev not in a._event_pos:
            raise AutomatonError(f"event {ev!r} is not in the alphabet")


def accepts(a: Automaton, s: Sequence[str]) -> str:
    """Classify ``s`` as ``"marked"``, ``"in-language"`` or ``"neither"``."""
    _check_events(a, s)
    reached = a.run(s)
    if not reached:
        return NEITHER
    if reached & a.marked:
        return MARKED
    return IN_LANGUAGE


def in_language(a: Automaton, s: Sequence[str]) -> bool:
    return accepts(a, s) != NEITHER


def project(s: Sequence[str], observable: Iterable[str]) -> EventString:
    """Natural projection: drop every event outside ``observable``."""
    keep = set(observable)
    return tuple(ev for ev in s if ev in keep)


def reachable(a: Automaton) -> Automaton:
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        for _, t in a.moves(s):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    if len(seen) == len(a.states):
        return a
    return Automaton(
        states=tuple(s for s in a.states if s in seen),
        alphabet=a.alphabet,
        transitions=tuple(t for t in a.transitions if t[0] in seen),
        initial=a.initial,
        marked=a.marked & seen,
    )


def product_pairs(a: Automaton, b: Automaton) -> Tuple[Automaton, Dict[str, Tuple[str, str]]]:
    """Synchronous product restricted to reachable pairs, with the pair map."""
    if set(a.alphabet) != set(b.alphabet):
        raise AutomatonError("product requires identical alphabets")
    start = (a.initial, b.initial)
    order = [start]
    seen = {start}
    trans = []
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for ev in a.alphabet:
            for p2 in a.successors(p, ev):
                for q2 in b.successors(q, ev):
                    nxt = (p2, q2)
                    trans.append(((p, q), ev, nxt))
                    if nxt not in seen:
                        seen.add(nxt)
                        order.append(nxt)
                        queue.append(nxt)
    names = {pq: pair_name(*pq) for pq in order}
    aut = Automaton(
        states=tuple(names[pq] for pq in order),
        alphabet=a.alphabet,
        transitions=tuple((names[s], e, names[t]) for s, e, t in trans),
        initial=names[start],
        marked=frozenset(
            names[pq] for pq in order if pq[0] in a.marked and pq[1] in b.marked
        ),
    )
    return aut, {names[pq]: pq for pq in order}


def product(a: Automaton, b: Automaton) -> Automaton:
    """``a || b``: both components move on every event."""
    return product_pairs(a, b)[0]


def subset_construction(a: Automaton) -> DeterministicView:
    """Reachable subset construction without minimization."""
    start = frozenset([a.initial])
    order = [start]
    seen = {start}
    trans = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for ev in a.alphabet:
            nxt = a.image(cur, ev)
            if not nxt:
                continue
            trans.append((cur, ev, nxt))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    names = {m: subset_name(a.order_states(m)) for m in order}
    aut = Automaton(
        states=tuple(names[m] for m in order),
        alphabet=a.alphabet,
        transitions=tuple((names[s], e, names[t]) for s, e, t in trans),
        initial=names[start],
        marked=frozenset(names[m] for m in order if m & a.marked),
    )
    return DeterministicView(aut, {names[m]: m for m in order})


def minimize(view: DeterministicView, source: Automaton) -> DeterministicView:
    """Merge states of a deterministic view that generate and mark the same
    future languages.  Merged states are named after the union of what they
    denote, which is unique per block."""
    d = view.automaton
    history = refine(d.states, d._moves, {s: s in d.marked for s in d.states})
    block = history[-1]
    if len(set(block.values())) == len(d.states):
        return view
    union: Dict[int, set] = {}
    for s in d.states:
        union.setdefault(block[s], set()).update(view.members[s])
    names = {b: subset_name(source.order_states(m)) for b, m in union.items()}
    start = block[d.initial]
    order = [start]
    seen = {start}
    trans = []
    queue = deque([d.initial])
    rep = {start: d.initial}
    while queue:
        s = queue.popleft()
        for ev, t in d.moves(s):
            bt = block[t]
            trans.append((names[block[s]], ev, names[bt]))
            if bt not in seen:
                seen.add(bt)
                order.append(bt)
                rep[bt] = t
                queue.append(t)
    aut = Automaton(
        states=tuple(names[b] for b in order),
        alphabet=d.alphabet,
        transitions=tuple(trans),
        initial=names[start],
        marked=frozenset(names[b] for b in order if rep[b] in d.marked),
    )
    return DeterministicView(aut, {names[b]: frozenset(union[b]) for b in order})


def determinize(a: Automaton) -> DeterministicView:
    """``det(G)``: the minimal deterministic automaton with the same
    generated and marked languages.

    Minimality is with respect to the pair (L, L_m): marked and unmarked
    subsets start in different blocks.
    """
    return minimize(subset_construction(a), a)


def observer(d, observable: Iterable[str]) -> DeterministicView:
    """Observer of a deterministic automaton under partial observation.

    Each observer state is the set of ``d``-states consistent with one
    observation, closed under unobservable moves.  Transitions exist only
    on observable events.
    """
    if isinstance(d, DeterministicView):
        d = d.automaton
    obs = set(observable)
    if not obs <= set(d.alphabet):
        raise AutomatonError("observable events must belong to the alphabet")
    hidden = [e for e in d.alphabet if e not in obs]
    seen_events = [e for e in d.alphabet if e in obs]

    def closure(states):
        out = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for ev in hidden:
                t = d.step(s, ev)
                if t is not None and t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)

    start = closure([d.initial])
    order = [start]
    seen = {start}
    trans = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for ev in seen_events:
            img = d.image(cur, ev)
            if not img:
                continue
            nxt = closure(img)
            trans.append((cur, ev, nxt))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    names = {m: subset_name(d.order_states(m)) for m in order}
    aut = Automaton(
        states=tuple(names[m] for m in order),
        alphabet=d.alphabet,
        transitions=tuple((names[s], e, names[t]) for s, e, t in trans),
        initial=names[start],
        marked=frozenset(names[m] for m in order if m & d.marked),
    )
    return DeterministicView(aut, {names[m]: m for m in order})


def walk(d: Automaton, s: Sequence[str]) -> Optional[str]:
    """State a deterministic automaton reaches on ``s`` (``None`` if blocked)."""
    state = d.initial
    for ev in s:
        state = d.step(state, ev)
        if state is None:
            return None
    return state


def sound_bound(a: Automaton, b: Automaton) -> int:
    """Depth up to which bounded enumeration decides language questions
    between ``a`` and ``b``: product of determinized sizes plus one."""
    return len(determinize(a)) * len(determinize(b)) + 1
