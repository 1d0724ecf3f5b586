"""CLI surface tests: structured output stability, exit codes, benches."""

import json
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("PROBBITS_CLI")
ROOT = pathlib.Path(os.environ.get("PROBBITS_ROOT", "."))
CORPUS = ROOT / "corpus"
GOLDEN = ROOT / "tests" / "golden"

pytestmark = pytest.mark.skipif(CLI is None, reason="PROBBITS_CLI not set")


def run_cli(*args, expect_code=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert proc.returncode == expect_code, proc.stdout + proc.stderr
    return proc


def strip_volatile(report):
    if "stats" in report:
        report["stats"].pop("wall_ms", None)
    report.pop("program", None)  # absolute path varies by checkout
    return report


def test_run_discrete4_matches_golden():
    proc = run_cli("run", str(CORPUS / "discrete4.pb"), "--stats")
    got = strip_volatile(json.loads(proc.stdout))
    want = json.loads((GOLDEN / "discrete4_run.json").read_text())
    assert got == want


def test_run_output_is_stable_across_runs():
    a = run_cli("run", str(CORPUS / "triangle-small.pb"), "--stats").stdout
    b = run_cli("run", str(CORPUS / "triangle-small.pb"), "--stats").stdout
    assert strip_volatile(json.loads(a)) == strip_volatile(json.loads(b))


def test_run_with_oracle_reports_deviation():
    proc = run_cli("run", str(CORPUS / "luhn2.pb"), "--oracle")
    report = json.loads(proc.stdout)
    assert report["oracle"]["max_abs_deviation"] < 1e-9


def test_encoding_flag_switches_encoding():
    categ = json.loads(run_cli("run", str(CORPUS / "discrete4.pb"), "--encoding", "categ",
                               "--stats").stdout)
    bitwise = json.loads(run_cli("run", str(CORPUS / "discrete4.pb"), "--stats").stdout)
    assert categ["encoding"] == "categ"
    # same distribution, different circuit size
    assert categ["queries"] == bitwise["queries"]
    assert categ["stats"]["decision_nodes"] != bitwise["stats"]["decision_nodes"]


def test_exit_codes():
    # parse error
    bad = ROOT / "build" / "cli_bad_syntax.pb"
    bad.write_text("observe(")
    proc = run_cli("run", str(bad), expect_code=2)
    assert json.loads(proc.stdout)["error"]["kind"] == "syntax"
    assert json.loads(proc.stdout)["error"]["line"] == 1

    # compile error (random array index)
    bad.write_text("let xs = [1, 2] let u = uniform(0, 2) return xs[u]")
    proc = run_cli("run", str(bad), expect_code=3)
    assert json.loads(proc.stdout)["error"]["kind"] == "compile"

    # unsatisfiable evidence
    bad.write_text("let x = flip(0.5) observe(x && !x) return x")
    proc = run_cli("run", str(bad), expect_code=4)
    assert json.loads(proc.stdout)["error"]["kind"] == "unsatisfiable-evidence"

    # missing file
    run_cli("run", str(ROOT / "no-such-file.pb"), expect_code=6)


def test_bench_lt_rows():
    csv_path = ROOT / "build" / "cli_bench_lt.csv"
    proc = run_cli("bench", "lt", "--max-bits", "6", "--reps", "1", "--csv", str(csv_path))
    report = json.loads(proc.stdout)
    rows = report["rows"]
    assert [r["bits"] for r in rows] == list(range(1, 7))
    counts = [r["node_count"] for r in rows]
    assert counts == sorted(counts)  # monotone non-decreasing
    assert not any(r["timed_out"] for r in rows)

    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "bits,wall_ms,node_count,value,timed_out"
    assert len(lines) == 7


def test_bench_categ_vs_bitwise_at_4_bits():
    proc = run_cli("bench", "categ-vs-bitwise", "--bits", "4")
    rows = json.loads(proc.stdout)["rows"]
    assert rows[0]["categ_nodes"] == 49
    assert rows[0]["bitwise_nodes"] == 26


def test_run_timeout_exit_code():
    proc = run_cli("run", str(CORPUS / "survey-network.pb"), "--timeout-sec", "0.001",
                   expect_code=5)
    assert json.loads(proc.stdout)["error"]["kind"] == "timeout"
