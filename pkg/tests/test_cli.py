import json
import subprocess
import sys
from pathlib import Path

import pytest

from walker.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def checks(rep):
    return {c["name"]: c for c in rep["checks"]}


def write(tmp_path, doc):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(doc))
    return p


@pytest.mark.parametrize("name, code", [
    ("walker3_strict", 0), ("walker3_nonstrict", 1), ("walker4_ricci_flat", 0),
    ("walker_general", 0), ("heisenberg", 0), ("aff", 0), ("koszul_solvable", 0),
    ("koszul_y", 0), ("deformation", 0),
])
def test_check_exit_codes(capsys, name, code):
    assert run(capsys, "check", SPECS / f"{name}.json")[0] == code


def test_walker3_report(capsys):
    code, rep = report(capsys, "check", SPECS / "walker3_strict.json")
    assert code == 0
    c = checks(rep)
    assert c["ricci_kernel"]["verdict"] is True
    assert c["ricci_kernel"]["confidence"] == "EXACT"
    assert c["strict"]["level"] == "INFO" and c["strict"]["verdict"] is True
    assert c["classification"]["diagnostics"]["model"] == "AbelianWalker"
    assert rep["tensors"]["scal"] == "0"
    assert set(rep) == {"kind", "command", "seed", "checks", "tensors", "timings"}


def test_every_record_is_tagged(capsys):
    for path in SPECS.glob("*.json"):
        _, rep = report(capsys, "check", path)
        names = [c["name"] for c in rep["checks"]]
        assert len(names) == len(set(names))
        for c in rep["checks"]:
            assert c["confidence"] in ("EXACT", "PROBABILISTIC", "SAMPLED")
            assert c["level"] in ("CHECK", "INFO")


def test_exit_code_tracks_check_records(capsys):
    for path in SPECS.glob("*.json"):
        code, rep = report(capsys, "check", path)
        failed = any(c["verdict"] is False for c in rep["checks"] if c["level"] == "CHECK")
        assert code == (1 if failed else 0)


def test_curvature_summary_is_informational(capsys):
    code, rep = report(capsys, "check", SPECS / "walker4_ricci_flat.json")
    c = checks(rep)
    assert code == 0
    assert c["ricci_flat"]["level"] == c["flat"]["level"] == "INFO"
    assert c["ricci_flat"]["verdict"] is True
    # a = x3^2 is removed by x1 -> x1 + x3^3/6, so the metric is flat as well
    assert c["flat"]["verdict"] is True


def test_nonstrict_walker3_fails_ricci_kernel(capsys):
    code, rep = report(capsys, "check", SPECS / "walker3_nonstrict.json")
    assert code == 1
    c = checks(rep)
    assert c["ricci_kernel"]["verdict"] is False
    assert c["ricci_kernel"]["diagnostics"]["detail"] == "Ric(X1, d_x3) = 3"


def test_gap_notes_are_info(capsys):
    _, rep = report(capsys, "check", SPECS / "walker3_strict.json")
    c = checks(rep)
    assert c["inverse_metric_entries"]["level"] == "INFO"
    assert c["orthogonal_complement"]["level"] == "INFO"
    assert "TM" in json.dumps(c["orthogonal_complement"]["diagnostics"])


def test_json_is_deterministic(capsys):
    outs = {run(capsys, "check", SPECS / "heisenberg.json", "--json")[1] for _ in range(3)}
    assert len(outs) == 1
    assert json.loads(outs.pop())["timings"] == {}


def test_timings_are_opt_in(capsys):
    _, rep = report(capsys, "check", SPECS / "walker3_strict.json", "--timings")
    assert rep["timings"] and all(v >= 0 for v in rep["timings"].values())


def test_seed_is_reported(capsys):
    _, rep = report(capsys, "check", SPECS / "aff.json", "--seed", 7)
    assert rep["seed"] == 7
    _, rep = report(capsys, "check", SPECS / "aff.json")
    assert rep["seed"] == 42


def test_classify_label(capsys):
    code, out, _ = run(capsys, "classify", SPECS / "aff.json")
    assert code == 0
    assert "solvable, non-nilpotent, completely solvable (SAMPLED)" in out


def test_develop_walker3_segment_gives_one(capsys, tmp_path):
    spec = write(tmp_path, {"kind": "walker3", "f": "x2^2", "epsilon": 1,
                            "curves": [{"polyline": [[0, 0, 0], [1, 2, 3]]}]})
    code, rep = report(capsys, "develop", spec)
    assert code == 0
    entry = rep["tensors"]["develop"][0]
    assert entry["exact_vector"] == [1]
    assert entry["vector"] == [pytest.approx(1.0, abs=1e-12)]


def test_develop_heisenberg_path_independence(capsys):
    code, rep = report(capsys, "develop", SPECS / "heisenberg.json")
    assert code == 0
    c = checks(rep)
    assert c["path_independent[1,2]"]["verdict"] is True
    m = rep["tensors"]["develop"][0]["matrix"]
    assert m[0][2] == pytest.approx(1.0, abs=1e-12)


def test_deform_transitions(capsys):
    code, rep = report(capsys, "deform", SPECS / "deformation.json")
    assert code == 0
    trans = rep["tensors"]["transitions"]
    assert len(trans) == 1
    assert trans[0]["from_t"] == 0 and trans[0]["to_t"] == pytest.approx(0.1)
    assert trans[0]["from"] == "NilpotentWalker" and trans[0]["to"] == "SolvableWalker"


def test_curvature_at_point(capsys):
    code, rep = report(capsys, "curvature", SPECS / "walker3_strict.json", "--at", "x1=0,x2=1,x3=2")
    assert code == 0
    at = rep["tensors"]["at"]
    assert at["metric"] == [[0, 0, 1], [0, 1, 0], [1, 0, 1]]


def test_at_requires_every_coordinate(capsys):
    code, _, err = run(capsys, "curvature", SPECS / "walker3_strict.json", "--at", "x1=0")
    assert code == 2 and "error" in err


def test_malformed_expression_exits_2(capsys, tmp_path):
    spec = write(tmp_path, {"kind": "walker3", "f": "x1 +", "epsilon": 1})
    code, out, err = run(capsys, "check", spec)
    assert code == 2 and out == ""
    assert "unexpected end of input at offset 4" in err


@pytest.mark.parametrize("doc", [
    {"kind": "walker5"},
    {"kind": "walker3"},
    {"kind": "walker3", "f": "x1", "epsilon": 2},
    {"kind": "lie_group", "dimension": 2, "brackets": ["[1,2] = e1*e2"]},
])
def test_invalid_documents_exit_2(capsys, tmp_path, doc):
    assert run(capsys, "check", write(tmp_path, doc))[0] == 2


def test_missing_file_exits_2(capsys, tmp_path):
    assert run(capsys, "check", tmp_path / "nope.json")[0] == 2


def test_command_must_fit_the_kind(capsys):
    assert run(capsys, "deform", SPECS / "walker3_strict.json")[0] == 2
    assert run(capsys, "curvature", SPECS / "aff.json")[0] == 2


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "walker.cli", "classify", str(SPECS / "aff.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "SolvableWalker" in proc.stdout
