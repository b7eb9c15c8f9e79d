import json
import pathlib

import pytest

from sessprog.cli import main

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_accepts_forwarder(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "forwarder.ssp")
    assert code == 0 and "accept" in out and "al=1" in out


def test_check_rejects_mutual_with_witness(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "mutual.ssp")
    assert code == 1 and "be < de" in out and "de < be" in out


def test_check_json_is_deterministic(capsys):
    _, out1, _ = run(capsys, "check", CORPUS / "forwarder.ssp", "--json")
    _, out2, _ = run(capsys, "check", CORPUS / "forwarder.ssp", "--json")
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["status"] == "accept"


def test_oracle_self_counterexample(capsys):
    code, out, _ = run(capsys, "oracle", CORPUS / "self.ssp", "--approx", 1)
    assert code == 1 and "violated-dynamic" in out


def test_oracle_forwarder_holds(capsys):
    code, out, _ = run(capsys, "oracle", CORPUS / "forwarder.ssp")
    assert code == 0 and "holds-dynamic-at-bound" in out


def test_progress_verdicts(capsys):
    assert run(capsys, "progress", CORPUS / "forwarder.ssp")[0] == 0
    assert run(capsys, "progress", CORPUS / "mutual.ssp")[0] == 1


def test_explore_stats(capsys):
    code, out, _ = run(capsys, "explore", CORPUS / "forwarder.ssp", "--approx", 1)
    assert code == 0 and "states:" in out


def test_explore_truncation_exit(capsys):
    code, _, _ = run(
        capsys, "explore", CORPUS / "forwarder.ssp", "--approx", "3", "--max-states", "5"
    )
    assert code == 3


def test_run_is_seeded(capsys):
    _, out1, _ = run(capsys, "run", CORPUS / "forwarder.ssp", "--seed", 5, "--max-steps", 8, "--json")
    _, out2, _ = run(capsys, "run", CORPUS / "forwarder.ssp", "--seed", 5, "--max-steps", 8, "--json")
    assert out1 == out2


def test_measure_output(capsys):
    code, out, _ = run(capsys, "measure", CORPUS / "mutual.ssp")
    assert code == 0 and "E = 4" in out


def test_measure_infinite_index(capsys):
    code, _, err = run(capsys, "measure", CORPUS / "forwarder.ssp")
    assert code == 1 and "infinite" in err


def test_approx_prints_replaced_indices(capsys):
    code, out, _ = run(capsys, "approx", CORPUS / "orphan.ssp", "2")
    assert code == 0 and "rec[2]" in out and "inf" not in out


def test_dual_verdicts(capsys):
    code, out, _ = run(
        capsys,
        "dual",
        "rec[inf]t. ?[al,be] int . t",
        "![be,al] int . rec[inf]t. ![be,al] int . t",
    )
    assert code == 0
    assert "dual_strict: False" in out and "dual_full: True" in out


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.ssp"
    bad.write_text("new . 0")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "parse error" in err


def test_missing_file_exit(capsys):
    code, _, _ = run(capsys, "check", "/nonexistent/x.ssp")
    assert code == 2
