"""Command-line entry point.

Exit codes: 0 success or property holds, 1 input error, 2 sound refusal
(a condition fails, a synthesis is refused, automata are not bisimilar).
"""

import argparse
import os
import sys

from decbisim.automaton import AutomatonError, sound_bound
from decbisim.checks import check_cp_coobservable, check_da_coobservable, decide_existence
from decbisim.equivalence import bisimilar
from decbisim.io import (
    ParseError,
    automaton_to_json,
    dumps,
    export_dot,
    format_automaton,
    load_automaton,
    load_problem,
)
from decbisim.oracle import Limits, oracle_check, random_problem
from decbisim.problem import ARCHITECTURES, GENERAL, ProblemError
from decbisim.synthesis import synthesize

OK, INPUT_ERROR, REFUSED = 0, 1, 2


def _word(s):
    return " ".join(s) if s else "ε"


def verdict_text(v) -> str:
    out = [f"architecture: {v.architecture}"]
    for e in v.entries:
        name = e.condition + (f" ({e.variant})" if e.variant else "")
        out.append(f"{name}: {'holds' if e.holds else 'fails'}")
        if e.witness is not None:
            w = e.witness
            if w.sigma is not None or w.s:
                out.append(f"  s = {_word(w.s)}" + (f", sigma = {w.sigma}" if w.sigma else ""))
            for c in w.per_agent:
                out.append(f"  agent {c.agent} confuses it with {_word(c.confusing)}")
            if w.counterexample is not None:
                out.append("  distinguishing move tree in JSON output")
    out.append(f"overall: {'holds' if v.overall else 'fails'}")
    return "\n".join(out) + "\n"


def _problem(args):
    p = load_problem(args.problem)
    arch = getattr(args, "arch", None)
    if arch and arch != p.architecture:
        if arch == GENERAL and (p.enable_default is None or p.disable_default is None):
            raise ProblemError("--arch general needs enable-default and disable-default in the problem file")
        p = p.with_architecture(arch, p.enable_default, p.disable_default)
    return p


def cmd_validate(args):
    path = args.file
    if path.endswith(".prob"):
        p = load_problem(path)
        sys.stdout.write(
            f"{path}: ok, {len(p.agents)} agents, |Sigma| = {len(p.alphabet)}, "
            f"uncontrollable = {{{','.join(p.ordered(p.uncontrollable))}}}\n"
        )
    else:
        a = load_automaton(path)
        sys.stdout.write(f"{path}: ok, {len(a.states)} states, {len(a.transitions)} transitions\n")
    return OK


def cmd_check(args):
    v = decide_existence(_problem(args))
    if args.format == "json":
        sys.stdout.write(dumps(v.to_json()))
    else:
        sys.stdout.write(verdict_text(v))
    return OK if v.overall else REFUSED


def cmd_synthesize(args):
    p = _problem(args)
    res = synthesize(p)
    if not res.ok:
        sys.stdout.write(dumps(res.verdict.to_json()) if args.format == "json" else verdict_text(res.verdict))
        return REFUSED
    out = args.out
    os.makedirs(out, exist_ok=True)
    files = []

    def write(name, text):
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text)
        files.append(name)

    for sup in res.supervisors:
        i = sup.agent.index
        write(f"supervisor_{i}.aut", format_automaton(sup.automaton, sup.decisions))
        if args.dot:
            write(f"supervisor_{i}.dot", export_dot(sup.automaton, sup.decisions, name=f"S{i}"))
    loop = res.closed_loop.automaton
    write("closed_loop.aut", format_automaton(loop))
    if args.dot:
        write("closed_loop.dot", export_dot(loop, name="closed_loop"))
    write("relation.txt", "\n".join(res.relation.to_lines()) + "\n")
    bundle = {
        "schema": 1,
        "verdict": res.verdict.to_json(),
        "fusion": res.rule.tag,
        "supervisors": [
            {
                "agent": s.agent.index,
                "automaton": automaton_to_json(s.automaton),
                "decisions": {y: list(s.automaton.order_events(d)) for y, d in s.decisions.items()},
            }
            for s in res.supervisors
        ],
        "closed_loop": automaton_to_json(loop),
        "relation": res.relation.to_json(),
    }
    write("bundle.json", dumps(bundle))
    if args.format == "json":
        sys.stdout.write(dumps({"schema": 1, "ok": True, "out": out, "files": files}))
    else:
        sys.stdout.write(f"synthesized {len(res.supervisors)} supervisors into {out}: {', '.join(files)}\n")
    return OK


def cmd_bisim(args):
    a, b = load_automaton(args.a), load_automaton(args.b)
    res = bisimilar(a, b)
    if args.format == "json":
        sys.stdout.write(dumps(res.to_json()))
    elif res.verdict:
        sys.stdout.write("bisimilar\n" + "\n".join(res.to_lines()) + "\n")
    else:
        sys.stdout.write("not bisimilar\n" + dumps(res.counterexample))
    return OK if res.verdict else REFUSED


def _oracle_rows(p, depth):
    entries = decide_existence(p).entries
    rows = []
    for e in entries:
        if e.variant == GENERAL:
            prop = "gen-coobservable"
        elif e.variant:
            prop = f"{e.variant}-coobservable"
        else:
            prop = e.condition
        o = oracle_check(prop, p, depth)
        rows.append((prop, e.holds, o))
    # both co-observability flavours are reported regardless of architecture
    for prop, fn in (("cp-coobservable", check_cp_coobservable), ("da-coobservable", check_da_coobservable)):
        if all(r[0] != prop for r in rows):
            rows.append((prop, fn(p).holds, oracle_check(prop, p, depth)))
    return rows


def cmd_oracle(args):
    if args.random:
        problems = [(f"seed {args.seed + n}", random_problem(args.seed + n, Limits())) for n in range(args.random)]
    elif args.problem:
        problems = [(args.problem, _problem(args))]
    else:
        raise ProblemError("oracle needs a problem file or --random N")
    disagreements = 0
    report = []
    for name, p in problems:
        depth = args.depth
        if depth is None and args.sound_bound:
            depth = sound_bound(p.plant, p.spec)
        for prop, mine, o in _oracle_rows(p, depth):
            # a bounded "holds" cannot contradict a checker failure beyond the bound
            disagreements += mine != o.holds and o.exhaustive
            report.append({"problem": name, "property": prop, "checker": mine, "oracle": o.holds,
                           "oracle_label": o.label, "agree": mine == o.holds})
    if args.format == "json":
        sys.stdout.write(dumps({"schema": 1, "disagreements": disagreements, "rows": report}))
    else:
        width = max(len(r["property"]) for r in report)
        for r in report:
            mark = "" if r["agree"] else "  <-- differs"
            sys.stdout.write(
                f"{r['problem']}  {r['property']:<{width}}  checker={'holds' if r['checker'] else 'fails'}"
                f"  oracle={'holds' if r['oracle'] else 'fails'} ({r['oracle_label']}){mark}\n"
            )
        sys.stdout.write(f"disagreements: {disagreements}\n")
    return OK if disagreements == 0 else REFUSED


def cmd_export_dot(args):
    a, decisions = load_automaton(args.file, with_decisions=True)
    text = export_dot(a, decisions or None, name=args.name)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=None,
                        help="output format (default: json; text for oracle)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=None,
                        help="oracle enumeration depth (default: run to exhaustion)")

    parser = argparse.ArgumentParser(prog="decbisim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse a .prob or .aut file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    for name, fn, helptext in (
        ("check", cmd_check, "decide the existence conditions"),
        ("synthesize", cmd_synthesize, "build local supervisors and the closed loop"),
        ("oracle", cmd_oracle, "compare the checker with the brute-force oracle"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("problem", nargs="?" if name == "oracle" else None)
        s.add_argument("--arch", choices=ARCHITECTURES)
        s.set_defaults(fn=fn)
        if name == "synthesize":
            s.add_argument("--out", default="out")
            s.add_argument("--dot", action="store_true", help="also write DOT renderings")
        if name == "oracle":
            s.add_argument("--random", type=int, default=0, metavar="N", help="check N seeded random problems")
            s.add_argument("--sound-bound", action="store_true",
                           help="cap the oracle at |det G| * |det R| + 1 instead of exhausting it")

    s = sub.add_parser("bisim", parents=[common], help="strong bisimilarity of two automata")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_bisim)

    s = sub.add_parser("export-dot", parents=[common], help="render an automaton or supervisor as DOT")
    s.add_argument("file")
    s.add_argument("--out")
    s.add_argument("--name", default="G")
    s.set_defaults(fn=cmd_export_dot)
    return parser


def run_command(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "text" if args.command == "oracle" else "json"
    try:
        return args.fn(args)
    except ParseError as exc:
        for d in exc.diagnostics:
            sys.stderr.write(f"{exc.source or '<input>'}:{d}\n")
        return INPUT_ERROR
    except (ProblemError, AutomatonError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return INPUT_ERROR


def main():
    sys.exit(run_command())
