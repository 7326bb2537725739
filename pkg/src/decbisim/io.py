"""Text formats, JSON bundles and DOT export.

Automaton files hold one declaration per line::

    alphabet a b c
    states x0 x1
    initial x0
    marked x0
    trans x0 a x1

Supervisor files append ``decision <state>: <events>`` lines.  Problem files
reference two automaton files and declare agents::

    plant plant.aut
    spec spec.aut
    architecture general
    agent 1 { controllable: a f e; observable: b e }
    enable-default: f e
    disable-default: a
"""

import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from decbisim.automaton import Automaton, AutomatonError
from decbisim.problem import ARCHITECTURES, GENERAL, AgentProfile, ControlProblem, ProblemError


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    category: str
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.category}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics, source=None):
        self.diagnostics = list(diagnostics)
        self.source = source
        prefix = f"{source}:" if source else ""
        super().__init__("\n".join(prefix + str(d) for d in self.diagnostics))


def _strip(line: str) -> str:
    return line.split("#", 1)[0]


def _col(raw: str, token: str) -> int:
    return raw.find(token) + 1


# -- automata ---------------------------------------------------------------


def parse_automaton(text: str, source: Optional[str] = None, with_decisions: bool = False):
    """Parse the automaton text format.

    With ``with_decisions`` the result is ``(automaton, decisions)``.
    """
    alphabet: List[str] = []
    states: List[str] = []
    initial = None
    marked: List[Tuple[str, int, int]] = []
    trans: List[Tuple[str, str, str, int, str]] = []
    decisions: List[Tuple[str, List[str], int, str]] = []
    diags: List[Diagnostic] = []
    for n, raw in enumerate(text.splitlines(), 1):
        words = _strip(raw).split()
        if not words:
            continue
        key, args = words[0], words[1:]
        if key == "alphabet":
            alphabet.extend(args)
        elif key == "states":
            states.extend(args)
        elif key == "initial":
            if len(args) != 1 or initial is not None:
                diags.append(Diagnostic(n, 1, "syntax", "exactly one initial state is required"))
            else:
                initial = (args[0], n, _col(raw, args[0]))
        elif key == "marked":
            marked.extend((s, n, _col(raw, s)) for s in args)
        elif key == "trans":
            if len(args) != 3:
                diags.append(Diagnostic(n, 1, "syntax", "trans needs: <from> <event> <to>"))
            else:
                trans.append((args[0], args[1], args[2], n, raw))
        elif key == "decision" and with_decisions:
            body = _strip(raw).split(None, 1)[1] if len(words) > 1 else ""
            state, _, rest = body.partition(":")
            decisions.append((state.strip(), rest.split(), n, raw))
        else:
            diags.append(Diagnostic(n, 1, "syntax", f"unknown declaration {key!r}"))
    known_states, known_events = set(states), set(alphabet)
    for dup in sorted({s for s in states if states.count(s) > 1}):
        diags.append(Diagnostic(0, 0, "duplicate", f"state {dup!r} declared twice"))
    if initial is None:
        diags.append(Diagnostic(0, 0, "missing-field", "no initial state"))
    elif initial[0] not in known_states:
        diags.append(Diagnostic(initial[1], initial[2], "undeclared-state", f"initial state {initial[0]!r}"))
    for s, n, c in marked:
        if s not in known_states:
            diags.append(Diagnostic(n, c, "undeclared-state", f"marked state {s!r}"))
    for src, ev, dst, n, raw in trans:
        for s in (src, dst):
            if s not in known_states:
                diags.append(Diagnostic(n, _col(raw, s), "undeclared-state", f"state {s!r}"))
        if ev not in known_events:
            diags.append(Diagnostic(n, _col(raw, " " + ev + " ") + 1, "unknown-event", f"event {ev!r}"))
    for state, evs, n, raw in decisions:
        if state not in known_states:
            diags.append(Diagnostic(n, _col(raw, state), "undeclared-state", f"decision state {state!r}"))
        for ev in evs:
            if ev not in known_events:
                diags.append(Diagnostic(n, _col(raw, ev), "unknown-event", f"event {ev!r}"))
    if diags:
        raise ParseError(diags, source)
    try:
        aut = Automaton(
            tuple(states), tuple(alphabet),
            tuple((s, e, t) for s, e, t, _, _ in trans),
            initial[0], frozenset(s for s, _, _ in marked),
        )
    except AutomatonError as exc:
        raise ParseError([Diagnostic(0, 0, "invalid", str(exc))], source) from exc
    if with_decisions:
        return aut, {s: frozenset(evs) for s, evs, _, _ in decisions}
    return aut


def format_automaton(a: Automaton, decisions: Optional[Dict[str, frozenset]] = None) -> str:
    lines = [
        "alphabet " + " ".join(a.alphabet),
        "states " + " ".join(a.states),
        "initial " + a.initial,
    ]
    if a.marked:
        lines.append("marked " + " ".join(a.order_states(a.marked)))
    lines.extend(f"trans {s} {e} {t}" for s, e, t in a.transitions)
    if decisions is not None:
        for s in a.states:
            lines.append(f"decision {s}: " + " ".join(a.order_events(decisions[s])))
    return "\n".join(lines) + "\n"


def load_automaton(path: str, with_decisions: bool = False):
    with open(path) as fh:
        return parse_automaton(fh.read(), source=path, with_decisions=with_decisions)


# -- problems ---------------------------------------------------------------


@dataclass
class ProblemFile:
    plant: str
    spec: str
    agents: List[AgentProfile]
    architecture: str = "conjunctive"
    enable_default: Optional[List[str]] = None
    disable_default: Optional[List[str]] = None
    lines: Dict[str, int] = field(default_factory=dict, compare=False)

    def to_text(self) -> str:
        out = [f"plant {self.plant}", f"spec {self.spec}", f"architecture {self.architecture}"]
        for ag in self.agents:
            ctrl = " ".join(sorted(ag.controllable))
            obs = " ".join(sorted(ag.observable))
            out.append(f"agent {ag.index} {{ controllable: {ctrl}; observable: {obs} }}")
        if self.enable_default is not None:
            out.append("enable-default: " + " ".join(self.enable_default))
        if self.disable_default is not None:
            out.append("disable-default: " + " ".join(self.disable_default))
        return "\n".join(out) + "\n"


def parse_problem_file(text: str, source: Optional[str] = None) -> ProblemFile:
    """Syntax-level parse of a problem file (no automata loaded)."""
    diags: List[Diagnostic] = []
    fields: Dict[str, Tuple[str, int]] = {}
    agents: List[AgentProfile] = []
    lines_of: Dict[str, int] = {}
    enable = disable = None
    raw_lines = text.splitlines()
    n = 0
    while n < len(raw_lines):
        raw = raw_lines[n]
        n += 1
        line = _strip(raw).strip()
        if not line:
            continue
        if line.startswith("agent"):
            start = n
            block = line
            while "}" not in block and n < len(raw_lines):
                block += "; " + _strip(raw_lines[n]).strip()
                n += 1
            parsed = _parse_agent(block, start, raw, diags)
            if parsed is not None:
                if any(a.index == parsed.index for a in agents):
                    diags.append(Diagnostic(start, 1, "duplicate", f"agent {parsed.index} declared twice"))
                agents.append(parsed)
                lines_of[f"agent {parsed.index}"] = start
            continue
        if line.startswith("enable-default:") or line.startswith("disable-default:"):
            key, _, rest = line.partition(":")
            lines_of[key] = n
            if key == "enable-default":
                enable = rest.split()
            else:
                disable = rest.split()
            continue
        words = line.split()
        if words[0] in ("plant", "spec", "architecture") and len(words) == 2:
            fields[words[0]] = (words[1], n)
            lines_of[words[0]] = n
        else:
            diags.append(Diagnostic(n, 1, "syntax", f"cannot parse {line!r}"))
    for key in ("plant", "spec"):
        if key not in fields:
            diags.append(Diagnostic(0, 0, "missing-field", f"no {key} file given"))
    arch = fields.get("architecture", ("conjunctive", 0))
    if arch[0] not in ARCHITECTURES:
        diags.append(Diagnostic(arch[1], 14, "syntax", f"unknown architecture {arch[0]!r}"))
    if not agents:
        diags.append(Diagnostic(0, 0, "missing-agent", "at least one agent block is required"))
    if enable is not None and disable is not None:
        overlap = sorted(set(enable) & set(disable))
        if overlap:
            diags.append(Diagnostic(lines_of["disable-default"], 1, "overlap",
                                    f"events both enable- and disable-default: {overlap}"))
    if diags:
        raise ParseError(diags, source)
    return ProblemFile(fields["plant"][0], fields["spec"][0], agents, arch[0], enable, disable, lines_of)


def _parse_agent(block, line_no, raw, diags):
    head, brace, rest = block.partition("{")
    words = head.split()
    if len(words) != 2 or not brace or "}" not in rest:
        diags.append(Diagnostic(line_no, 1, "syntax", "agent block: agent <n> { controllable: ...; observable: ... }"))
        return None
    try:
        index = int(words[1])
    except ValueError:
        diags.append(Diagnostic(line_no, _col(raw, words[1]), "syntax", f"agent index {words[1]!r} is not an integer"))
        return None
    body = rest.split("}", 1)[0]
    sets = {}
    for part in body.replace("\n", ";").split(";"):
        if not part.strip():
            continue
        key, colon, evs = part.partition(":")
        key = key.strip()
        if not colon or key not in ("controllable", "observable"):
            diags.append(Diagnostic(line_no, 1, "syntax", f"agent {index}: unexpected entry {part.strip()!r}"))
            continue
        sets[key] = evs.split()
    for key in ("controllable", "observable"):
        if key not in sets:
            diags.append(Diagnostic(line_no, 1, "missing-field", f"agent {index}: no {key} list"))
    if "controllable" not in sets or "observable" not in sets:
        return None
    return AgentProfile(index, frozenset(sets["controllable"]), frozenset(sets["observable"]))


def build_problem(pf: ProblemFile, plant: Automaton, spec: Automaton, source=None) -> ControlProblem:
    """Turn a syntax-level problem into a validated ``ControlProblem``."""
    sigma = set(plant.alphabet)
    diags = []
    for ag in pf.agents:
        line = pf.lines.get(f"agent {ag.index}", 0)
        for ev in sorted((ag.controllable | ag.observable) - sigma):
            diags.append(Diagnostic(line, 1, "unknown-event", f"agent {ag.index}: event {ev!r}"))
    for key, evs in (("enable-default", pf.enable_default), ("disable-default", pf.disable_default)):
        for ev in sorted(set(evs or ()) - sigma):
            diags.append(Diagnostic(pf.lines.get(key, 0), 1, "unknown-event", f"{key}: event {ev!r}"))
    if pf.architecture == GENERAL and (pf.enable_default is None or pf.disable_default is None):
        diags.append(Diagnostic(pf.lines.get("architecture", 0), 1, "missing-field",
                                "general architecture needs enable-default and disable-default"))
    if diags:
        raise ParseError(diags, source)
    try:
        return ControlProblem(
            plant, spec, tuple(pf.agents), pf.architecture,
            None if pf.enable_default is None else frozenset(pf.enable_default),
            None if pf.disable_default is None else frozenset(pf.disable_default),
        )
    except ProblemError as exc:
        raise ParseError([Diagnostic(0, 0, "invalid-problem", str(exc))], source) from exc


def parse_problem(text: str, base_dir: str = ".", source: Optional[str] = None) -> ControlProblem:
    pf = parse_problem_file(text, source)
    plant = load_automaton(os.path.join(base_dir, pf.plant))
    spec = load_automaton(os.path.join(base_dir, pf.spec))
    return build_problem(pf, plant, spec, source)


def load_problem(path: str) -> ControlProblem:
    with open(path) as fh:
        text = fh.read()
    return parse_problem(text, os.path.dirname(os.path.abspath(path)), source=path)


def write_problem(p: ControlProblem, directory: str, stem: str) -> str:
    """Write ``<stem>.prob`` plus its two automaton files; return the problem path."""
    os.makedirs(directory, exist_ok=True)
    names = {"plant": f"{stem}.plant.aut", "spec": f"{stem}.spec.aut"}
    for key, aut in (("plant", p.plant), ("spec", p.spec)):
        with open(os.path.join(directory, names[key]), "w") as fh:
            fh.write(format_automaton(aut))
    pf = ProblemFile(
        names["plant"], names["spec"], list(p.agents), p.architecture,
        None if p.enable_default is None else list(p.ordered(p.enable_default)),
        None if p.disable_default is None else list(p.ordered(p.disable_default)),
    )
    path = os.path.join(directory, f"{stem}.prob")
    with open(path, "w") as fh:
        fh.write(pf.to_text())
    return path


# -- JSON and DOT -----------------------------------------------------------


def automaton_to_json(a: Automaton) -> dict:
    return {
        "states": list(a.states),
        "alphabet": list(a.alphabet),
        "initial": a.initial,
        "marked": list(a.order_states(a.marked)),
        "transitions": [list(t) for t in a.transitions],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(a: Automaton, decisions: Optional[Dict[str, frozenset]] = None, name: str = "G") -> str:
    """Deterministic DOT text.  Marked states are double circles, the initial
    state is drawn bold; supervisor decision sets, when given, are appended
    to node labels."""
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for s in a.states:
        shape = "doublecircle" if s in a.marked else "circle"
        label = _q(s)
        if decisions is not None and s in decisions:
            label = label[:-1] + "\\n{" + ",".join(a.order_events(decisions[s])) + '}"'
        style = ", style=bold" if s == a.initial else ""
        out.append(f"  {_q(s)} [shape={shape}{style}, label={label}];")
    for s, e, t in a.transitions:
        out.append(f"  {_q(s)} -> {_q(t)} [label={_q(e)}];")
    out.append("}")
    return "\n".join(out) + "\n"
