import json
from importlib import resources

import pytest

from frcheck.cli import main

FIG1 = str(resources.files("frcheck").joinpath("data/fig1.model"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_fig1(capsys):
    code, out, _ = run(capsys, "eval", "--model", FIG1, "--world", "w0", "[x][y]phi & <x>~phi")
    assert code == 0 and out == "true\n"


def test_eval_expectation_mismatch(capsys):
    code, out, _ = run(capsys, "eval", "--model", FIG1, "--world", "w0", "--expect", "true", "phi")
    assert code == 1 and out == "false\n"


def test_eval_probability_structure(tmp_path, capsys):
    path = tmp_path / "s.model"
    path.write_text(json.dumps({
        "worlds": ["w0", "w1"], "agents": ["x"], "relations": {}, "valuation": {"p": ["w1"]},
        "weights": {"x": {"w0": 0.0, "w1": 1.0}},
    }))
    code, out, _ = run(capsys, "eval", "--model", str(path), "--world", "w0", "--format", "machine", "[x]p")
    assert code == 0 and json.loads(out)["value"] is True


def test_check_frame(capsys):
    code, out, _ = run(capsys, "check-frame", "--model", FIG1, "--agent", "y", "--property", "reflexive")
    assert code == 0 and out == "y reflexive: false  violated at w0\n"
    code, _, _ = run(capsys, "check-frame", "--model", FIG1, "--property", "serial", "--property", "euclidean", "--expect", "true")
    assert code == 0


def test_find_model(tmp_path, capsys):
    out_path = tmp_path / "found.model"
    code, out, _ = run(
        capsys, "find-model", "--frame", "serial", "--frame", "transitive", "--frame", "euclidean",
        "--at", "[x][y]p & <x>~p", "--out", str(out_path), "--expect", "sat",
    )
    assert code == 0 and out.startswith("SAT\n") and out_path.exists()
    code, out, _ = run(capsys, "find-model", "--frame", "reflexive", "--at", "[x][y]p & <x>~p", "--expect", "sat")
    assert code == 1 and out.startswith("UNSAT")


def test_quantum_verify(capsys):
    code, out, _ = run(capsys, "quantum-verify", "--format", "machine")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "VERIFIED"
    targets = {"a1": 0, "a2_joint": 1 / 12, "a2_complement": 11 / 12, "a3": 0, "a4_fail": 1, "a4_not_ok": 1}
    for k, v in targets.items():
        assert abs(doc["values"][k] - v) <= 1e-9


def test_quantum_verify_tolerance_flag(capsys):
    code, _, _ = run(capsys, "quantum-verify", "--tolerance", "1e-30")
    assert code == 1


def test_fr_run(capsys):
    code, out, _ = run(capsys, "fr-run", "--frame", "reflexive")
    assert code == 0 and out.startswith("theorem_fr: CONTRADICTION\n")
    code, out, _ = run(capsys, "fr-run", "--frame", "serial")
    assert code == 0 and out.startswith("theorem_fr_star: CONTRADICTION\n")


def test_fr_ablate(capsys):
    code, out, _ = run(capsys, "fr-ablate", "--drop", "U-for-agent-a", "--format", "machine")
    assert code == 0 and json.loads(out)["verdict"] == "SAT"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["fr-run", "--frame", "symmetric"],
        ["eval", "--model", FIG1, "[x"],
        ["eval", "--model", "/nonexistent.model", "p"],
        ["eval", "--model", FIG1, "unknown_atom"],
        ["fr-run", "--point", "9.9.ok.ok"],
        ["quantum-verify", "--tolerance", "-1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err
