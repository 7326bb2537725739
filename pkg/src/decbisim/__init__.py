"""Decentralized bisimilarity supervisory control for nondeterministic
discrete event systems."""

from decbisim.automaton import (
    Automaton,
    AutomatonError,
    DeterministicView,
    accepts,
    active_events,
    determinize,
    observer,
    product,
    project,
    reachable,
)
from decbisim.checks import Verdict, decide_existence
from decbisim.equivalence import BisimWitness, bisimilar, simulates
from decbisim.problem import AgentProfile, ControlProblem, InclusionError, ProblemError
from decbisim.synthesis import FusionRule, build_closed_loop, fuse, synthesize

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "AutomatonError",
    "DeterministicView",
    "accepts",
    "active_events",
    "determinize",
    "observer",
    "product",
    "project",
    "reachable",
    "Verdict",
    "decide_existence",
    "BisimWitness",
    "bisimilar",
    "simulates",
    "AgentProfile",
    "ControlProblem",
    "InclusionError",
    "ProblemError",
    "FusionRule",
    "build_closed_loop",
    "fuse",
    "synthesize",
]
