import json
import re

import jsonschema
import pytest

from helpers import FIXTURES
from ontocomplete import cli
from ontocomplete.parser import PROFILE_ENV
from ontocomplete.report import report_schema

GATE = FIXTURES / "gate"


@pytest.fixture(autouse=True)
def no_profile_env(monkeypatch):
    monkeypatch.delenv(PROFILE_ENV, raising=False)


def run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def approx_tree(expected):
    if isinstance(expected, dict):
        return {k: approx_tree(v) for k, v in expected.items()}
    if isinstance(expected, list):
        return [approx_tree(v) for v in expected]
    if isinstance(expected, float):
        return pytest.approx(expected, rel=1e-12, abs=1e-15)
    return expected


def test_evaluate_empty_ontology(capsys, tmp_path):
    empty = tmp_path / "empty.ttl"
    empty.write_text("")
    code, out, _ = run(capsys, "evaluate", empty)
    assert code == 0 and "Ontology completeness:" in out


def test_diagnostics_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.ttl"
    bad.write_text("@prefix : <http://x.org/#> .\n:A rdfs:subClassOf :B .\n")
    code, _, err = run(capsys, "evaluate", bad)
    assert code == 1
    assert re.search(r"bad\.ttl:2:\d+", err)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["evaluate"],
        ["frobnicate", "x.ttl"],
        ["evaluate", "missing.ttl"],
        ["gate", str(GATE / "perfect.ttl"), "--threshold", "1.5"],
        ["gate", str(GATE / "perfect.ttl"), "--phase", "9.9"],
        ["evaluate", str(GATE / "perfect.ttl"), "--profile", "missing.json"],
        ["replay", str(GATE / "perfect.ttl")],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_gate_advances(capsys):
    code, out, _ = run(capsys, "gate", GATE / "oc_0913.ttl", "--phase", "2.5", "--threshold", "0.8")
    assert code == 0
    assert "91.3%" in out and "advance to 2.6" in out


def test_gate_closed_exit_three(capsys):
    code, out, _ = run(capsys, "gate", GATE / "oc_0765.ttl", "--phase", "2.5", "--format", "json")
    assert code == 3
    payload = json.loads(out)
    assert payload["advance"] is False and payload["next_phase"] == "2.6"
    assert payload["oc"] == pytest.approx(0.7652286, abs=5e-7)


def test_place(capsys):
    code, out, _ = run(capsys, "place", FIXTURES / "place_taxonomy.ttl", "--format", "json")
    assert code == 0 and json.loads(out)["phase"] == "2.4"
    assert "post-development" in run(capsys, "place", GATE / "perfect.ttl")[1]


@pytest.mark.parametrize(
    "golden,argv",
    [
        ("oc_0913.recommend.json", ["recommend", GATE / "oc_0913.ttl", "--phase", "2.5"]),
        ("perfect.evaluate.json", ["evaluate", GATE / "perfect.ttl", "--phase", "post"]),
    ],
)
def test_json_matches_golden_and_schema(capsys, golden, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, report_schema())
    assert doc == approx_tree(json.loads((FIXTURES / "golden" / golden).read_text()))


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "evaluate", GATE / "oc_0913.ttl", "--phase", "2.5", "--format", "json", "-o", target)
    assert code == 0 and out == ""
    jsonschema.validate(json.loads(target.read_text()), report_schema())


NODE_TEXT = re.compile(r"^\s+(\S+)\s+w=([\d.]+) w'=([\d.]+) price=([\d.]+)%$")
NODE_HTML = re.compile(r"<tr><td>(oc[^<]*)</td><td>([\d.]+)</td><td>([\d.]+)</td><td>([\d.]+)%</td></tr>")


def test_formats_agree(capsys):
    argv = ["recommend", GATE / "oc_0765.ttl", "--phase", "2.5"]
    doc = json.loads(run(capsys, *argv, "--format", "json")[1])
    text = run(capsys, *argv, "--format", "text")[1]
    html = run(capsys, *argv, "--format", "html")[1]

    expected = [
        (n["path"], f"{n['weight']:.3f}", f"{n['relative_weight']:.3f}", f"{n['price'] * 100:.1f}")
        for n in doc["nodes"]
        if n["price"] is not None
    ]
    text_rows = [m.groups() for m in map(NODE_TEXT.match, text.splitlines()) if m]
    assert [(p.rsplit("/", 1)[-1], w, r, pr) for p, w, r, pr in expected] == text_rows
    assert expected == NODE_HTML.findall(html)

    oc = f"{doc['oc'] * 100:.1f}%"
    assert f"Ontology completeness: {oc}" in text
    assert f'<span id="oc">{oc}</span>' in html
    gains = [f"+{a['gain']:.1f}%" for a in doc["actions"]]
    assert gains == re.findall(r"^\s+(\+[\d.]+%)", text, re.M)


def test_replay_csv(capsys):
    code, out, _ = run(capsys, "replay", FIXTURES / "replay6")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 7
    assert [ln.rsplit(",", 1)[1] for ln in lines[1:]].count("true") == 1


def test_replay_json(capsys):
    code, out, _ = run(capsys, "replay", FIXTURES / "replay12", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and [r["iteration"] for r in rows if r["gate_fired"]] == [3, 7, 9, 11, 12]


def test_replay_parse_error(capsys, tmp_path):
    (tmp_path / "s1.ttl").write_text("")
    (tmp_path / "s2.ttl").write_text(":A a owl:Class")
    code, _, err = run(capsys, "replay", tmp_path)
    assert code == 1 and "snapshot 2" in err and "s2.ttl" in err


def test_profile_from_env_and_flag(capsys, monkeypatch, tmp_path):
    # all weight on the abox, which is perfect in this fixture
    prof = tmp_path / "abox.json"
    prof.write_text(json.dumps({"weights": {"oc/tbox": 0, "oc/rbox": 0, "oc/abox": 1}}))
    argv = ["evaluate", GATE / "oc_0913.ttl", "--phase", "2.5", "--format", "json"]
    base = json.loads(run(capsys, *argv)[1])["oc"]
    assert base < 1.0
    monkeypatch.setenv(PROFILE_ENV, str(prof))
    assert json.loads(run(capsys, *argv)[1])["oc"] == 1.0

    other = tmp_path / "tbox.json"
    other.write_text(json.dumps({"weights": {"oc/tbox": 1, "oc/rbox": 0, "oc/abox": 0}}))
    assert json.loads(run(capsys, *argv, "--profile", other)[1])["oc"] < 1.0


def test_bad_profile_exit_one(capsys, tmp_path):
    prof = tmp_path / "neg.json"
    prof.write_text('{"weights": {"oc/tbox": -1}}')
    code, _, err = run(capsys, "evaluate", GATE / "perfect.ttl", "--profile", prof)
    assert code == 1 and "negative" in err
