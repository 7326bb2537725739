"""Control problems: plant, specification, agents and architecture."""

from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import FrozenSet, Optional, Sequence, Tuple

from decbisim.automaton import Automaton, DeterministicView, determinize, product_pairs

CONJUNCTIVE = "conjunctive"
DISJUNCTIVE = "disjunctive"
GENERAL = "general"
ARCHITECTURES = (CONJUNCTIVE, DISJUNCTIVE, GENERAL)


class ProblemError(ValueError):
    """An ill-formed control problem."""


class InclusionError(ProblemError):
    """The specification generates a string the plant cannot."""

    def __init__(self, string, event):
        self.string = tuple(string)
        self.event = event
        shown = " ".join(self.string + (event,))
        super().__init__(f"L(R) is not contained in L(G): plant cannot generate '{shown}'")


@dataclass(frozen=True)
class AgentProfile:
    index: int
    controllable: FrozenSet[str]
    observable: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "controllable", frozenset(self.controllable))
        object.__setattr__(self, "observable", frozenset(self.observable))

    def uncontrollable(self, alphabet) -> FrozenSet[str]:
        return frozenset(alphabet) - self.controllable

    def unobservable(self, alphabet) -> FrozenSet[str]:
        return frozenset(alphabet) - self.observable


@dataclass(frozen=True)
class ControlProblem:
    plant: Automaton
    spec: Automaton
    agents: Tuple[AgentProfile, ...]
    architecture: str = CONJUNCTIVE
    enable_default: Optional[FrozenSet[str]] = None
    disable_default: Optional[FrozenSet[str]] = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        for name in ("enable_default", "disable_default"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, frozenset(value))
        self._validate()

    def _validate(self):
        if set(self.plant.alphabet) != set(self.spec.alphabet):
            raise ProblemError("plant and specification must share one alphabet")
        if not self.agents:
            raise ProblemError("at least one agent is required")
        if self.architecture not in ARCHITECTURES:
            raise ProblemError(f"unknown architecture {self.architecture!r}")
        sigma = set(self.alphabet)
        seen = set()
        for ag in self.agents:
            if ag.index in seen:
                raise ProblemError(f"duplicate agent index {ag.index}")
            seen.add(ag.index)
            for kind, events in (("controllable", ag.controllable), ("observable", ag.observable)):
                extra = events - sigma
                if extra:
                    raise ProblemError(
                        f"agent {ag.index}: {kind} events not in alphabet: {sorted(extra)}"
                    )
        if self.architecture == GENERAL:
            ce, cd = self.enable_default, self.disable_default
            if ce is None or cd is None:
                raise ProblemError("general architecture needs enable-default and disable-default sets")
            if ce & cd:
                raise ProblemError(f"enable-default and disable-default overlap: {sorted(ce & cd)}")
            if ce | cd != self.controllable:
                raise ProblemError("enable-default and disable-default must partition the controllable events")
        witness = inclusion_violation(self.plant, self.spec, self.alphabet)
        if witness is not None:
            raise InclusionError(*witness)

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.plant.alphabet

    @cached_property
    def controllable(self) -> FrozenSet[str]:
        return frozenset().union(*(ag.controllable for ag in self.agents))

    @cached_property
    def uncontrollable(self) -> FrozenSet[str]:
        return frozenset(self.alphabet) - self.controllable

    @cached_property
    def observable(self) -> FrozenSet[str]:
        return frozenset().union(*(ag.observable for ag in self.agents))

    @cached_property
    def unobservable(self) -> FrozenSet[str]:
        return frozenset(self.alphabet) - self.observable

    def agent(self, index: int) -> AgentProfile:
        for ag in self.agents:
            if ag.index == index:
                return ag
        raise KeyError(index)

    def enable_default_of(self, ag: AgentProfile) -> FrozenSet[str]:
        return ag.controllable & (self.enable_default or frozenset())

    def disable_default_of(self, ag: AgentProfile) -> FrozenSet[str]:
        return ag.controllable & (self.disable_default or frozenset())

    def ordered(self, events) -> Tuple[str, ...]:
        return self.plant.order_events(events)

    def with_architecture(self, architecture: str, enable_default=None, disable_default=None):
        return replace(
            self,
            architecture=architecture,
            enable_default=enable_default if enable_default is not None else self.enable_default,
            disable_default=disable_default if disable_default is not None else self.disable_default,
        )

    # -- cached deterministic views ---------------------------------------

    @cached_property
    def det_plant(self) -> DeterministicView:
        return determinize(self.plant)

    @cached_property
    def det_spec(self) -> DeterministicView:
        return determinize(self.spec)

    @cached_property
    def pair_automaton(self):
        """``det(G) || det(R)`` with the map back to (plant, spec) state pairs.

        Its language is ``L(R)`` because ``L(R)`` is contained in ``L(G)``.
        """
        return product_pairs(self.det_plant.automaton, self.det_spec.automaton)


def inclusion_violation(plant: Automaton, spec: Automaton, alphabet: Sequence[str]):
    """Shortest ``(s, sigma)`` with ``s sigma`` in ``L(R)`` but not ``L(G)``, or ``None``."""
    start = (frozenset([plant.initial]), frozenset([spec.initial]))
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (gs, rs), s = queue.popleft()
        for ev in alphabet:
            r2 = spec.image(rs, ev)
            if not r2:
                continue
            g2 = plant.image(gs, ev)
            if not g2:
                return s, ev
            nxt = (g2, r2)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, s + (ev,)))
    return None
