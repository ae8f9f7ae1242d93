import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from qcsp_forests.cli import EXHAUSTED, NEGATIVE, OK, USAGE, main

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("golden", sorted(p.name for p in GOLDEN.glob("*.json")))
def test_json_matches_golden(golden):
    argv = {
        "classify_path_101.json": ["classify", "--path", "101"],
        "classify_path_0100.json": ["classify", "--path", "0100"],
        "classify_path_0011001.json": ["classify", "--path", "0011001"],
        "surject_lemma_surhom_m_3.json": ["surject", "--lemma", "surhom", "--m", "3"],
        "survey_pathsupto_5_auditcases.json": ["survey", "--paths-up-to", "5", "--audit-cases"],
    }[golden]
    code, out, _ = run(*argv, "--json")
    assert code == OK
    assert json.loads(out) == json.loads((GOLDEN / golden).read_text())


def test_classify_101_json():
    code, out, _ = run("classify", "--path", "101", "--json")
    assert code == OK and json.loads(out)["class"] == "Pspace-complete"


def test_classify_tree_file(tmp_path):
    f = tmp_path / "star.txt"
    f.write_text("4\n1 2\n1 3\n1 4\n2 2\n")
    code, out, _ = run("classify", "--tree", str(f))
    assert code == OK and "class: NL" in out


def test_eval_exit_codes(tmp_path):
    s = tmp_path / "s.txt"
    s.write_text("E x\nedge x x\n")
    assert run("eval", "--template", "101", "--sentence", str(s))[:2] == (OK, "true\n")
    assert run("eval", "--template", "000", "--sentence", str(s))[:2] == (NEGATIVE, "false\n")
    g = tmp_path / "g.txt"
    g.write_text("2\n1 2\n2 2\n")
    assert run("eval", "--template-file", str(g), "--sentence", str(s))[0] == OK


def test_eval_exhausted(tmp_path):
    names = [f"x{i}" for i in range(10)]
    s = tmp_path / "chain.txt"
    s.write_text("".join(f"E {v}\n" for v in names) + "".join(f"edge {a} {b}\n" for a, b in zip(names, names[1:])))
    code, out, _ = run("eval", "--template", "1111111", "--sentence", str(s), "--limit", "2")
    assert code == EXHAUSTED and out.strip() == "exhausted"


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--path", "102"],
    ["classify", "--path", "101", "--tree", "x"],
    ["eval", "--template", "101", "--sentence", "/nonexistent"],
    ["eval", "--template", "101", "--template-file", "f", "--sentence", "s"],
    ["poly", "--graph", "101"],
    ["surject", "--lemma", "surhom"],
    ["survey", "--paths-up-to", "0"],
    ["nonsense"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == USAGE


def test_reduce_emit_and_check(tmp_path):
    nae = tmp_path / "i.txt"
    nae.write_text("E x\nE y\nE z\nc x y z\n")
    emit = tmp_path / "out.txt"
    code, out, _ = run("reduce", "--template", "101", "--nae", str(nae), "--emit", str(emit), "--check")
    assert code == OK
    assert "clause gadget exact: True" in out
    from qcsp_forests.logic import parse_sentence
    assert parse_sentence(emit.read_text()).universals
    nae.write_text("E x\nc x x x\n")
    code, out, _ = run("reduce", "--template", "101", "--nae", str(nae), "--check", "--json")
    doc = json.loads(out)
    assert code == OK and doc["check"] == {"oracle": False, "compiled": False, "agree": True,
                                           "gadget_exact": True, "anchors_sound": True}


def test_reduce_to_stdout(tmp_path):
    nae = tmp_path / "i.txt"
    nae.write_text("E x\nc x x x\n")
    code, out, _ = run("reduce", "--template", "101", "--nae", str(nae))
    assert code == OK and out.startswith("A ")


def test_poly():
    code, out, _ = run("poly", "--graph", "101", "--search")
    assert (code, out.strip()) == (NEGATIVE, "refuted")
    code, out, _ = run("poly", "--graph", "0110", "--construct", "f1", "--json")
    assert code == OK and json.loads(out)["verified"]
    assert run("poly", "--graph", "0110", "--search", "--budget", "1")[0] == EXHAUSTED


def test_surject_matrix_m6():
    code, out, _ = run("surject", "--lemma", "surhom", "--m", "6")
    assert code == OK
    rows = out.strip().splitlines()
    assert rows[1].split() == ["1", "-1", "1", "-1", "1", "-1", "1"]
    assert rows[-1] == "surjective homomorphism: True"


def test_surject_witness():
    code, out, _ = run("surject", "--witness", "0100", "--method", "unbalanced", "--json")
    assert code == OK and json.loads(out)["verified"]


def test_survey_audit():
    code, out, _ = run("survey", "--paths-up-to", "7", "--audit-cases")
    assert code == OK
    assert "0011001" in out.split("unmatched non-0-eccentric words:")[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qcsp_forests", "classify", "--path", "101"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Pspace-complete" in res.stdout
