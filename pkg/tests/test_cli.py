"""End-to-end command-line checks run through real subprocesses."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURE = Path(__file__).parent / "data" / "table_4x3.json"

# Frozen full-network cost goldens (see test_cost_model.py).
ALL_LARGEST_FLOPS = 708_804_992
ALL_SMALLEST_FLOPS = 315_629_504


def run_cli(*args, check=True):
    proc = subprocess.run(
        [sys.executable, "-m", "ponas", *args],
        capture_output=True,
        text=True,
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"ponas {' '.join(args)} failed:\n{proc.stderr}")
    return proc


def test_cost_largest_golden():
    proc = run_cli("cost", "--genes", "largest")
    doc = json.loads(proc.stdout)
    assert doc["flops"] == ALL_LARGEST_FLOPS
    assert doc["genes"] == [11] * 19
    assert doc["flops_m"] == round(ALL_LARGEST_FLOPS / 1e6, 2)


def test_cost_smallest_golden():
    doc = json.loads(run_cli("cost", "--genes", "smallest").stdout)
    assert doc["flops"] == ALL_SMALLEST_FLOPS
    assert doc["genes"] == [0] * 19


def test_cost_explicit_genes():
    genes = ",".join(["3"] * 19)
    doc = json.loads(run_cli("cost", "--genes", genes).stdout)
    assert doc["params"] > 0


def test_cost_wrong_length_is_usage_error():
    proc = run_cli("cost", "--genes", "1,2,3", check=False)
    assert proc.returncode == 2
    assert "19" in proc.stderr


def test_cost_bad_gene_value():
    proc = run_cli("cost", "--genes", ",".join(["12"] * 19), check=False)
    assert proc.returncode == 2


def test_unknown_flag_rejected():
    proc = run_cli("cost", "--genes", "largest", "--bogus", check=False)
    assert proc.returncode == 2


def test_provenance_header():
    doc = json.loads(run_cli("cost", "--genes", "largest", "--seed", "7").stdout)
    assert doc["provenance"] == {"tool_version": "0.1.0", "seed": 7, "command": "cost"}


def test_build_table_manifest(tmp_path):
    out = tmp_path / "m.json"
    proc = run_cli("build-table", "--seed", "5", "--out", str(out))
    doc = json.loads(proc.stdout)
    assert doc["evaluations"] == 228
    assert len(doc["best_genes"]) == 19
    assert doc["table"]["layers"] == 19
    assert doc["seed"] == 5
    assert out.read_text() == proc.stdout
    # winners really are the per-row argmax of the emitted table
    for layer, row in enumerate(doc["table"]["values"]):
        assert row[doc["best_genes"][layer]] == max(row)


def test_build_table_byte_identical_across_runs_and_threads():
    a = run_cli("build-table", "--seed", "9", "--threads", "1").stdout
    b = run_cli("build-table", "--seed", "9", "--threads", "6").stdout
    c = run_cli("build-table", "--seed", "9", "--threads", "6").stdout
    assert a == b == c
    d = run_cli("build-table", "--seed", "10").stdout
    assert d != a


def test_loss_table_conversion(tmp_path):
    out = tmp_path / "loss.json"
    proc = run_cli("loss-table", "--table", str(FIXTURE), "--out", str(out))
    doc = json.loads(proc.stdout)
    assert doc["domain"] == "loss"
    assert doc["layers"] == 4 and doc["candidates"] == 3
    for row in doc["values"]:
        assert min(row) == 0.0
        assert all(v >= 0 for v in row)
    assert json.loads(out.read_text()) == doc


def test_loss_table_rejects_loss_input(tmp_path):
    out = tmp_path / "loss.json"
    run_cli("loss-table", "--table", str(FIXTURE), "--out", str(out))
    proc = run_cli("loss-table", "--table", str(out), check=False)
    assert proc.returncode == 5
    assert "already" in proc.stderr


def test_specialize_and_oracle_agree_on_fixture(tmp_path):
    loss_path = tmp_path / "loss.json"
    run_cli("loss-table", "--table", str(FIXTURE), "--out", str(loss_path))

    # a binding ceiling for the 4x3 toy macro: between cheapest and dearest
    spec = json.loads(
        run_cli(
            "specialize", "--table", str(loss_path), "--metric", "flops",
            "--ceiling", "6000000", "--generations", "120", "--seed", "3",
        ).stdout
    )
    oracle = json.loads(
        run_cli(
            "oracle", "--table", str(loss_path), "--metric", "flops",
            "--ceiling", "6000000",
        ).stdout
    )
    assert spec["loss"] == pytest.approx(oracle["loss"], abs=1e-12)
    assert spec["flops"] <= 6_000_000
    assert oracle["flops"] <= 6_000_000


def test_specialize_accepts_accuracy_table(tmp_path):
    log = tmp_path / "evo.csv"
    doc = json.loads(
        run_cli(
            "specialize", "--table", str(FIXTURE), "--metric", "flops",
            "--ceiling", str(2**62), "--generations", "40", "--log", str(log),
        ).stdout
    )
    assert doc["loss"] == 0.0
    assert doc["generations"] == 40
    lines = log.read_text().splitlines()
    assert lines[0] == "generation,best_loss,mean_loss"
    assert len(lines) == 41


def test_specialize_deterministic(tmp_path):
    loss_path = tmp_path / "loss.json"
    run_cli("loss-table", "--table", str(FIXTURE), "--out", str(loss_path))
    args = ("specialize", "--table", str(loss_path), "--metric", "params",
            "--ceiling", "25000", "--generations", "60", "--seed", "21")
    assert run_cli(*args).stdout == run_cli(*args).stdout


def test_specialize_infeasible_exit_code():
    proc = run_cli(
        "specialize", "--table", str(FIXTURE), "--metric", "flops", "--ceiling", "1000",
        check=False,
    )
    assert proc.returncode == 3
    assert "cheapest" in proc.stderr


def test_oracle_guard_on_full_space(tmp_path):
    table = tmp_path / "big.json"
    run_cli("build-table", "--seed", "1", "--out", str(tmp_path / "m.json"))
    manifest = json.loads((tmp_path / "m.json").read_text())
    table.write_text(json.dumps(manifest["table"]))
    proc = run_cli("oracle", "--table", str(table), "--metric", "flops",
                   "--ceiling", str(2**62), check=False)
    assert proc.returncode == 5


def test_missing_table_file_is_io_error():
    proc = run_cli("loss-table", "--table", "/no/such/file.json", check=False)
    assert proc.returncode == 4


def test_malformed_table_is_validation_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json at all")
    proc = run_cli("loss-table", "--table", str(bad), check=False)
    assert proc.returncode == 5


def test_analyze_kendall_prints_bare_value():
    proc = run_cli("analyze", "kendall", "--xs", "1,2,3", "--ys", "3,2,1")
    assert proc.stdout == "-1.000000\n"


def test_analyze_kendall_requires_samples():
    proc = run_cli("analyze", "kendall", check=False)
    assert proc.returncode == 2


def test_analyze_importance_csv(tmp_path):
    loss_path = tmp_path / "loss.json"
    run_cli("loss-table", "--table", str(FIXTURE), "--out", str(loss_path))
    proc = run_cli("analyze", "importance", "--table", str(loss_path))
    lines = proc.stdout.splitlines()
    assert lines[0] == "layer,max_loss"
    assert len(lines) == 5
    assert lines[1].startswith("0,")


def test_analyze_importance_json():
    doc = json.loads(
        run_cli("analyze", "importance", "--table", str(FIXTURE), "--format", "json").stdout
    )
    assert len(doc["layers"]) == 4
    assert set(doc["layers"][0]) == {"layer", "max_loss"}


def test_analyze_ablation_worst():
    doc = json.loads(run_cli("analyze", "ablation-worst", "--table", str(FIXTURE)).stdout)
    vectors = {k: v for k, v in doc.items() if k != "provenance"}
    assert set(vectors) == {"worst", "worst_plus_least", "worst_plus_most"}
    for entry in vectors.values():
        assert len(entry["genes"]) == 4
    assert vectors["worst_plus_most"]["loss"] <= vectors["worst"]["loss"]
    assert vectors["worst_plus_most"]["loss"] <= vectors["worst_plus_least"]["loss"]


def test_version_flag():
    proc = run_cli("--version")
    assert proc.stdout.strip() == "ponas 0.1.0"


def test_no_arguments_is_usage_error():
    proc = run_cli(check=False)
    assert proc.returncode == 2
