import json
from pathlib import Path

import pytest

from floerlab.cli import run

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_depth_two_generator(capsys):
    code, out, _ = invoke(capsys, "depth", SAMPLES / "two_generator.json")
    assert code == 0 and json.loads(out)["boundary_depth"] == "2"


def test_table_output(capsys):
    code, out, _ = invoke(capsys, "barcode", SAMPLES / "two_generator.json", "--format", "table")
    assert code == 0
    assert "degree  birth  death  length" in out


def test_threshold_precondition(capsys):
    code, _, err = invoke(capsys, "spectrum-ta", SAMPLES / "torus_small_k.json")
    assert code == 2 and "k* = 10600/333" in err


def test_oracle_table(capsys):
    code, out, _ = invoke(capsys, "oracle", "--seed", 7, "--size", 5)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "seed: 7"
    rows = [l.split() for l in lines if l.startswith("  ") and l.split()[0].isdigit()]
    assert len(rows) == 5 and all(r[-1] == "true" for r in rows)
    assert "all_match: true" in lines and "depth_skipped: 0" in lines


def test_deterministic_json(capsys):
    first = invoke(capsys, "oracle", "--seed", 3, "--size", 3, "--format", "json")[1]
    second = invoke(capsys, "oracle", "--seed", 3, "--size", 3, "--format", "json")[1]
    assert first == second and json.loads(first)["all_match"]


@pytest.mark.parametrize("name,command", [
    ("unit_cycle.json", "spectral"),
    ("capped.json", "extension"),
    ("detect.json", "detect"),
    ("torus.json", "spectrum-ta"),
    ("contact.json", "spectrum-contact"),
    ("toric.json", "toric"),
    ("ledger.json", "ledger"),
    ("two_generator.json", "validate"),
    ("two_generator.json", "svd"),
])
def test_samples_succeed(capsys, name, command):
    code, out, err = invoke(capsys, command, SAMPLES / name)
    assert code == 0, err
    json.loads(out)


def test_window_too_small(capsys):
    code, _, err = invoke(capsys, "svd", SAMPLES / "two_generator.json", "--window", "1")
    assert code == 2 and "level spread" in err


def test_uncertified_window_is_a_verdict_failure(tmp_path, capsys):
    doc = {"generators": [{"label": "x", "level": "3", "degree": 1}, {"label": "y", "level": "1", "degree": 0}],
           "differential": [{"from": "x", "to": "y", "exponents": ["3"]}]}
    path = tmp_path / "long.json"
    path.write_text(json.dumps(doc))
    code, out, _ = invoke(capsys, "svd", path, "--window", "4")
    assert code == 1 and json.loads(out)["offending_bar"]["death"] == "3"


def test_validation_failure_has_witness(tmp_path, capsys):
    doc = {"generators": [{"label": "x", "level": "3", "degree": 1}, {"label": "y", "level": "4", "degree": 0}],
           "differential": [{"from": "x", "to": "y", "exponents": ["1/2"]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = invoke(capsys, "validate", path)
    report = json.loads(out)
    assert code == 1 and report["violations"][0]["kind"] == "filtration"
    assert (report["violations"][0]["from"], report["violations"][0]["to"]) == ("x", "y")


def test_schema_errors(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text('{"generators": [\n  {"label": "x",}\n]}')
    code, _, err = invoke(capsys, "depth", broken)
    assert code == 2 and "line 2" in err
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"generators": [{"label": "x", "degree": 0}]}))
    code, _, err = invoke(capsys, "depth", missing)
    assert code == 2 and "generators[0]: missing field 'level'" in err


def test_ledger_contradiction(tmp_path, capsys):
    path = tmp_path / "ledger.json"
    path.write_text(json.dumps({"steps": [
        {"op": "lemma3_bound", "args": {"beta": "0", "Eplus": "2", "Eminus": "2", "hbar": "1"}},
        {"op": "energy_capacity_chain", "args": {"sde_bound": "1", "epsilon": "1/10"}},
    ]}))
    code, out, _ = invoke(capsys, "ledger", path)
    assert code == 1 and json.loads(out)["contradictions"][0]["quantity"] == "c"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = invoke(capsys, "toric", SAMPLES / "toric.json", "--out", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["toric_bound"] == "2/5"


def test_tensor_and_dsum(capsys):
    code, out, _ = invoke(capsys, "tensor", SAMPLES / "two_generator.json", SAMPLES / "unit_cycle.json")
    assert code == 0 and len(json.loads(out)["generators"]) == 2
    code, out, _ = invoke(capsys, "dsum", SAMPLES / "two_generator.json", SAMPLES / "two_generator.json")
    assert code == 0 and [g["label"] for g in json.loads(out)["generators"]] == ["L.x", "L.y", "R.x", "R.y"]


def test_usage_error(capsys):
    assert run(["nonsense"]) == 2
