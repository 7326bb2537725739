import json
import os

import pytest
from hypothesis import given, settings

from decbisim import fixtures as F
from decbisim.automaton import Automaton
from decbisim.cli import run_command
from decbisim.equivalence import bisimilar
from decbisim.io import (
    ParseError,
    export_dot,
    format_automaton,
    load_automaton,
    load_problem,
    parse_automaton,
    parse_problem,
    parse_problem_file,
    write_problem,
)

from conftest import automata

AUT = """\
alphabet a b
states x y
initial x
marked y
trans x a y
"""


def categories(exc):
    return [d.category for d in exc.value.diagnostics]


def test_example1_file(data_dir):
    p = load_problem(os.path.join(data_dir, "example1.prob"))
    assert len(p.agents) == 2
    assert p.uncontrollable == {"a", "c"}


@pytest.mark.parametrize("stem, make", [
    ("example1", F.example1), ("ex2", F.example2), ("ex3", F.example3), ("ex4", F.example4),
])
def test_shipped_files_match_fixtures(data_dir, stem, make):
    assert load_problem(os.path.join(data_dir, f"{stem}.prob")) == make()


def test_parse_automaton_roundtrip():
    a = parse_automaton(AUT)
    assert a.marked == {"y"}
    assert parse_automaton(format_automaton(a)) == a


def test_parse_automaton_diagnostics():
    with pytest.raises(ParseError) as exc:
        parse_automaton(AUT + "trans y q x\ntrans x a z\nbogus\n")
    diags = exc.value.diagnostics
    assert {d.category for d in diags} == {"unknown-event", "undeclared-state", "syntax"}
    unknown = [d for d in diags if d.category == "unknown-event"][0]
    assert (unknown.line, unknown.column) == (6, 9)


def test_decisions_roundtrip():
    a = parse_automaton(AUT)
    text = format_automaton(a, {"x": frozenset({"a"}), "y": frozenset()})
    b, decisions = parse_automaton(text, with_decisions=True)
    assert b == a and decisions == {"x": {"a"}, "y": frozenset()}


PROB = """\
plant g.aut
spec r.aut
architecture general
agent 1 {
  controllable: a
  observable: a b
}
agent 2 { controllable: b; observable: b }
enable-default: a
disable-default: b
"""


def test_problem_file_roundtrip():
    pf = parse_problem_file(PROB)
    assert [a.index for a in pf.agents] == [1, 2]
    assert parse_problem_file(pf.to_text()) == pf


def test_empty_agent_list():
    with pytest.raises(ParseError) as exc:
        parse_problem_file("plant g.aut\nspec r.aut\n")
    assert categories(exc) == ["missing-agent"]


def test_overlap():
    with pytest.raises(ParseError) as exc:
        parse_problem_file(PROB.replace("disable-default: b", "disable-default: a b"))
    assert categories(exc) == ["overlap"]
    assert exc.value.diagnostics[0].line == 10


def test_unknown_event_in_agent(tmp_path):
    (tmp_path / "g.aut").write_text(AUT)
    (tmp_path / "r.aut").write_text(AUT)
    text = PROB.replace("observable: a b", "observable: a q")
    with pytest.raises(ParseError) as exc:
        parse_problem(text, str(tmp_path))
    assert "unknown-event" in categories(exc)
    assert exc.value.diagnostics[0].line == 4


@settings(max_examples=50, deadline=None)
@given(automata())
def test_automaton_roundtrip_property(a):
    assert parse_automaton(format_automaton(a)) == a


def test_write_problem_roundtrip(tmp_path):
    p = F.example4()
    path = write_problem(p, str(tmp_path), "ex")
    assert load_problem(path) == p


def test_dot_single_state():
    a = Automaton(("s",), ("a",), (), "s", set())
    text = export_dot(a)
    assert text.count("shape=") == 1 and "->" not in text


def test_dot_fix_b():
    text = export_dot(F.fix_b())
    assert text.count("shape=") == 5
    assert text.count("->") == 4
    assert text.count("doublecircle") == 1
    assert text == export_dot(F.fix_b())


def test_dot_decisions():
    a = parse_automaton(AUT)
    text = export_dot(a, {"x": frozenset({"a"}), "y": frozenset()})
    assert 'label="x\\n{a}"' in text


# -- command line -----------------------------------------------------------


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_check_example1(capsys, data_dir):
    code, out, _ = run(capsys, "check", os.path.join(data_dir, "example1.prob"))
    assert code == 0
    assert json.loads(out)["overall"] is True


def test_cli_refusal_ex3(capsys, data_dir, tmp_path):
    code, out, _ = run(capsys, "synthesize", os.path.join(data_dir, "ex3.prob"),
                       "--arch", "disjunctive", "--out", str(tmp_path / "o"))
    assert code == 2
    doc = json.loads(out)
    co = [c for c in doc["conditions"] if c["condition"] == "coobservability"][0]
    assert co["variant"] == "da" and co["witness"]["sigma"] == "g"
    assert not (tmp_path / "o").exists()


def test_cli_synthesize_writes_artifacts(capsys, data_dir, tmp_path):
    out_dir = tmp_path / "o"
    code, _, _ = run(capsys, "synthesize", os.path.join(data_dir, "ex4.prob"),
                     "--out", str(out_dir), "--dot")
    assert code == 0
    names = set(os.listdir(out_dir))
    assert {"supervisor_1.aut", "supervisor_2.aut", "closed_loop.aut", "relation.txt",
            "bundle.json", "closed_loop.dot"} <= names
    loop = load_automaton(str(out_dir / "closed_loop.aut"))
    assert bisimilar(loop, F.example4().spec).verdict
    _, decisions = load_automaton(str(out_dir / "supervisor_1.aut"), with_decisions=True)
    assert decisions
    first = (out_dir / "bundle.json").read_bytes()
    run(capsys, "synthesize", os.path.join(data_dir, "ex4.prob"), "--out", str(out_dir), "--dot")
    assert (out_dir / "bundle.json").read_bytes() == first


def test_cli_bisim(capsys, data_dir, tmp_path):
    fb = os.path.join(data_dir, "fix_b.aut")
    assert run(capsys, "bisim", fb, fb)[0] == 0
    det = tmp_path / "det.aut"
    from decbisim.automaton import determinize
    det.write_text(format_automaton(determinize(F.fix_b()).automaton))
    code, out, _ = run(capsys, "bisim", fb, str(det))
    assert code == 2 and json.loads(out)["verdict"] is False


def test_cli_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.aut"
    bad.write_text("states x\ninitial y\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "undeclared-state" in err and "bad.aut:2:" in err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.prob"))
    assert code == 1 and err


def test_cli_validate_and_text(capsys, data_dir):
    code, out, _ = run(capsys, "validate", os.path.join(data_dir, "example1.prob"))
    assert code == 0 and "uncontrollable = {a,c}" in out
    code, out, _ = run(capsys, "check", os.path.join(data_dir, "ex2.prob"), "--arch", "conjunctive",
                       "--format", "text")
    assert code == 2
    assert "s = ε, sigma = g" in out


def test_cli_oracle(capsys, data_dir):
    code, out, _ = run(capsys, "oracle", os.path.join(data_dir, "ex4.prob"))
    assert code == 0 and "disagreements: 0" in out
    code, out, _ = run(capsys, "oracle", "--random", "5", "--seed", "3", "--format", "json")
    assert code == 0 and json.loads(out)["disagreements"] == 0
    code, _, _ = run(capsys, "oracle")
    assert code == 1


def test_cli_export_dot(capsys, data_dir):
    code, out, _ = run(capsys, "export-dot", os.path.join(data_dir, "fix_b.aut"))
    assert code == 0 and out == export_dot(F.fix_b())
