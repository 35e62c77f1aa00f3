"""CLI tests: document I/O, flag merging, exit codes, determinism.

main() is driven in-process through argv lists; the module entry point
gets one real subprocess.  Every stdout payload must parse as a single
JSON document with sorted keys.
"""

import io
import json
import subprocess
import sys

import pytest

from noridim.cli import main

SL2_GENS = [[1, 1, 0, 1], [1, 0, 1, 1]]


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    doc = json.loads(captured.out) if captured.out else None
    return code, doc, captured.err


def write_doc(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


# -- exp / log -----------------------------------------------------------


def test_exp_document(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"command": "exp", "n": 2, "p": 5, "k": 1, "matrix": [0, 1, 0, 0]},
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path])
    assert code == 0
    assert doc["status"] == "ok"
    assert doc["schema_version"] == 1
    assert doc["results"]["matrix"] == [1, 1, 0, 1]
    assert doc["checks"] == {"input_nilpotent": True}
    assert doc["timing_ms"] is None
    assert doc["inputs"]["n"] == 2


def test_exp_from_stdin(tmp_path, capsys, monkeypatch):
    payload = json.dumps({"n": 2, "p": 5, "matrix": [0, 1, 0, 0]})
    monkeypatch.setattr(sys, "stdin", io.StringIO(payload))
    code, doc, _ = run_cli(capsys, ["exp", "--input", "-"])
    assert code == 0
    assert doc["results"]["matrix"] == [1, 1, 0, 1]


def test_log_inverts_exp(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"command": "log", "n": 2, "p": 5, "matrix": [1, 1, 0, 1]},
    )
    code, doc, _ = run_cli(capsys, ["log", "--input", doc_path])
    assert code == 0
    assert doc["results"]["matrix"] == [0, 1, 0, 0]


def test_exp_rejects_non_nilpotent(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [1, 0, 0, 1]}
    )
    code, doc, err = run_cli(capsys, ["exp", "--input", doc_path])
    assert code == 2
    assert doc["status"] == "error"
    assert doc["error"]["type"] == "NotNilpotent"
    assert "NotNilpotent" in err


def test_matrix_shape_is_checked(tmp_path, capsys):
    doc_path = write_doc(tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1]})
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path])
    assert code == 2
    assert doc["error"]["type"] == "InvalidInput"


# -- job resolution ------------------------------------------------------


def test_flag_document_conflict(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1, 0, 0]}
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path, "--p", "7"])
    assert code == 2
    assert "conflict" in doc["error"]["message"]


def test_matching_flag_and_document_is_fine(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1, 0, 0]}
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path, "--p", "5"])
    assert code == 0


def test_unknown_field_is_rejected(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1, 0, 0], "extra": 1}
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path])
    assert code == 2
    assert "extra" in doc["error"]["message"]


def test_command_mismatch_is_rejected(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"command": "log", "n": 2, "p": 5, "matrix": [0, 1, 0, 0]},
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path])
    assert code == 2


def test_missing_required_field(capsys):
    code, doc, _ = run_cli(capsys, ["exp", "--n", "2", "--p", "5"])
    assert code == 2
    assert "matrix" in doc["error"]["message"]


def test_inapplicable_flag_is_rejected(capsys):
    code, doc, _ = run_cli(capsys, ["exp", "--n", "2", "--p", "5", "--trials", "3"])
    assert code == 2
    assert "--trials" in doc["error"]["message"]


def test_bad_json_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, doc, _ = run_cli(capsys, ["exp", "--input", str(path)])
    assert code == 2


def test_missing_input_file(capsys):
    code, doc, _ = run_cli(capsys, ["exp", "--input", "/nonexistent/job.json"])
    assert code == 2


# -- ndim / enumerate ----------------------------------------------------


def test_ndim_of_sl2(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "generators": SL2_GENS}
    )
    code, doc, _ = run_cli(capsys, ["ndim", "--input", doc_path])
    assert code == 0
    r = doc["results"]
    assert r["span_dim"] == 3
    assert r["lie_dim"] == 3
    assert r["ndim"] == 3
    assert r["span_equals_lie"] is True
    assert r["order"] == 120
    assert r["p_core_order"] == 120
    assert r["log_set_size"] == 25
    assert len(r["span_basis"]) == 3
    assert len(r["lie_basis"]) == 3


def test_ndim_requires_mod_p(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "k": 2, "generators": SL2_GENS}
    )
    code, doc, _ = run_cli(capsys, ["ndim", "--input", doc_path])
    assert code == 2


def test_ndim_output_is_byte_deterministic(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "generators": SL2_GENS}
    )
    main(["ndim", "--input", doc_path])
    first = capsys.readouterr().out
    main(["ndim", "--input", doc_path])
    second = capsys.readouterr().out
    assert first == second
    assert json.dumps(json.loads(first), indent=2, sort_keys=True) + "\n" == first


def test_enumerate_reports_depth(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "generators": SL2_GENS}
    )
    code, doc, _ = run_cli(capsys, ["enumerate", "--input", doc_path])
    assert code == 0
    assert doc["results"] == {"order": 120, "max_depth": 8, "generator_count": 2}


def test_enumerate_cap_exit_code(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "generators": SL2_GENS}
    )
    code, doc, _ = run_cli(capsys, ["enumerate", "--input", doc_path, "--cap", "50"])
    assert code == 3
    assert doc["error"]["type"] == "CapExceeded"
    assert doc["error"]["exit_code"] == 3


def test_enumerate_rejects_empty_generators(tmp_path, capsys):
    doc_path = write_doc(tmp_path, "job.json", {"n": 2, "p": 5, "generators": []})
    code, doc, _ = run_cli(capsys, ["enumerate", "--input", doc_path])
    assert code == 2


# -- filtration ----------------------------------------------------------


def test_filtration_smoke(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"n": 2, "p": 5, "k": 2, "generators": SL2_GENS, "declared_dim": 3},
    )
    code, doc, _ = run_cli(capsys, ["filtration", "--input", doc_path])
    assert code == 0
    r = doc["results"]
    assert r["group_orders"] == [120, 15000]
    assert r["dims"] == [3]
    assert r["growth_profile"] == [3]
    assert r["ndim_mod_p"] == 3
    assert r["declared_dim"] == 3
    assert r["levels"][0]["m"] == 1
    assert r["levels"][0]["dim"] == 3
    assert doc["checks"]["upper_bound_declared"] is True


def test_filtration_requires_k_at_least_2(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "k": 1, "generators": SL2_GENS}
    )
    code, doc, _ = run_cli(capsys, ["filtration", "--input", doc_path])
    assert code == 2


def test_filtration_bad_declared_dim_is_an_invariant_failure(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"n": 2, "p": 5, "k": 2, "generators": SL2_GENS, "declared_dim": 2},
    )
    code, doc, _ = run_cli(capsys, ["filtration", "--input", doc_path])
    assert code == 4
    assert doc["error"]["type"] == "InvariantViolation"


# -- lemma-check ---------------------------------------------------------


def test_lemma_check_batch(capsys):
    code, doc, _ = run_cli(
        capsys,
        ["lemma-check", "--n", "2", "--p", "7", "--k", "2", "--trials", "50"],
    )
    assert code == 0
    assert doc["results"]["trials"] == 50
    assert doc["results"]["failures"] == 0
    assert doc["checks"] == {"zero_failures": True}
    assert doc["inputs"]["seed"] == 0
    assert "witness" not in doc["results"]


def test_lemma_check_refuses_small_primes(capsys):
    code, doc, _ = run_cli(capsys, ["lemma-check", "--n", "3", "--p", "5"])
    assert code == 2
    assert "2n" in doc["error"]["message"]


# -- census --------------------------------------------------------------


def test_census_single_prime_with_cap(capsys):
    code, doc, _ = run_cli(capsys, ["census", "--p", "5", "--cap", "10000"])
    assert code == 0
    rows = {r["entry"]: r for r in doc["results"]["rows"]}
    assert set(rows) == {"sl2", "sl3", "heisenberg", "torus1", "borel2", "gl2"}
    assert rows["sl3"]["skipped"].startswith("declared order 372000")
    for name in ("sl2", "heisenberg", "torus1", "borel2", "gl2"):
        assert rows[name]["bounds_ok"] is True
        assert rows[name]["formula_ok"] is True
        assert rows[name]["count"] == rows[name]["formula_value"]
    assert doc["checks"]["all_ok"] is True
    assert rows["torus1"] == {
        "entry": "torus1",
        "p": 5,
        "count": 4,
        "lower": 4,
        "upper": 6,
        "bounds_ok": True,
        "formula_value": 4,
        "formula_ok": True,
    }


def test_census_skips_inadmissible_primes(capsys):
    code, doc, _ = run_cli(capsys, ["census", "--p", "2", "--cap", "100"])
    assert code == 0
    rows = {r["entry"]: r for r in doc["results"]["rows"]}
    assert rows["heisenberg"]["skipped"] == "inadmissible prime"  # p < n
    assert rows["sl3"]["skipped"] == "inadmissible prime"


# -- diagnostic ----------------------------------------------------------


def test_diagnostic_from_catalog_entry(capsys):
    code, doc, _ = run_cli(capsys, ["diagnostic", "--entry", "sl2", "--p", "5"])
    assert code == 0
    r = doc["results"]
    assert r["max_bfs_depth"] == 3
    assert r["budget"] == 32
    assert r["letter_count"] == 24
    assert r["group_order"] == 120
    assert r["family_size"] == 25
    assert doc["checks"] == {}


def test_diagnostic_from_explicit_family(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "nilpotents": [[0, 1, 0, 0]]}
    )
    code, doc, _ = run_cli(capsys, ["diagnostic", "--input", doc_path])
    assert code == 0
    r = doc["results"]
    assert r["max_bfs_depth"] == 1
    assert r["budget"] == 8
    assert r["group_order"] == 5
    assert r["letter_count"] == 4


def test_diagnostic_source_validation(tmp_path, capsys):
    code, doc, _ = run_cli(capsys, ["diagnostic", "--p", "5"])
    assert code == 2
    code, doc, _ = run_cli(capsys, ["diagnostic", "--p", "5", "--entry", "nope"])
    assert code == 2
    assert "unknown catalog entry" in doc["error"]["message"]
    both = write_doc(
        tmp_path, "job.json",
        {"p": 5, "entry": "sl2", "nilpotents": [[0, 1, 0, 0]], "n": 2},
    )
    code, doc, _ = run_cli(capsys, ["diagnostic", "--input", both])
    assert code == 2
    missing_n = write_doc(
        tmp_path, "job2.json", {"p": 5, "nilpotents": [[0, 1, 0, 0]]}
    )
    code, doc, _ = run_cli(capsys, ["diagnostic", "--input", missing_n])
    assert code == 2
    code, doc, _ = run_cli(
        capsys, ["diagnostic", "--entry", "sl2", "--p", "5", "--n", "3"]
    )
    assert code == 2


# -- plumbing ------------------------------------------------------------


def test_output_file(tmp_path, capsys):
    out_path = tmp_path / "out.json"
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1, 0, 0]}
    )
    code = main(["exp", "--input", doc_path, "--output", str(out_path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out_path.read_text())
    assert doc["results"]["matrix"] == [1, 1, 0, 1]


def test_timing_flag_fills_timing(tmp_path, capsys):
    doc_path = write_doc(
        tmp_path, "job.json", {"n": 2, "p": 5, "matrix": [0, 1, 0, 0]}
    )
    code, doc, _ = run_cli(capsys, ["exp", "--input", doc_path, "--timing"])
    assert code == 0
    assert isinstance(doc["timing_ms"], float)


def test_module_entry_point(tmp_path):
    doc_path = write_doc(
        tmp_path, "job.json",
        {"command": "exp", "n": 2, "p": 5, "matrix": [0, 1, 0, 0]},
    )
    out = subprocess.run(
        [sys.executable, "-m", "noridim", "exp", "--input", doc_path],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"]["matrix"] == [1, 1, 0, 1]
