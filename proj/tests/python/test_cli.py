import json
import os
import subprocess

import pytest

CLI = os.environ.get("TRIPSSQP_CLI", "tripssqp")

SMALL_SWEEP = {
    "solver": {"max_iters": 30},
    "experiment": {
        "noise_levels": [1e-4],
        "methods": [{"algorithm": "adaptive", "hessian": "Id"}],
        "runs_per_instance": 1,
        "suite": {"count": 2},
    },
}


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_solve_ok(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"solver": {"max_iters": 20}})
    out = tmp_path / "trace.json"
    csv = tmp_path / "trace.csv"
    r = run("solve", "--problem", "hs35", "--config", cfg, "--out", str(out), "--csv", str(csv))
    assert r.returncode == 0, r.stderr
    assert json.loads(out.read_text())["problem"] == "hs35"
    assert csv.read_text().startswith("# tripssqp-trace v1")


def test_unknown_key_exit_2(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"solver": {"max_iters": 20, "bogus": 1}})
    r = run("solve", "--problem", "hs35", "--config", cfg, "--out", str(tmp_path / "t.json"))
    assert r.returncode == 2
    assert "bogus" in r.stderr


def test_bad_arguments_exit_2(tmp_path):
    assert run("solve", "--out", str(tmp_path / "t.json")).returncode == 2
    assert run("solve", "--problem", "no_such_problem", "--out", str(tmp_path / "t.json")).returncode == 2


def test_missing_dataset_exit_3(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"solver": {"max_iters": 5},
                                           "logistic": {"csv_path": str(tmp_path / "missing.csv")}})
    r = run("solve", "--problem", "logistic", "--config", cfg, "--out", str(tmp_path / "t.json"))
    assert r.returncode == 3


def test_empty_results_exit_3(tmp_path):
    empty = tmp_path / "results.csv"
    empty.write_text("")
    assert run("summary", "--in", str(empty), "--out", str(tmp_path / "b.csv")).returncode == 3


def test_failed_run_exit_4(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"solver": {"max_iters": 50, "baseline": {"threshold": "negated"}}})
    r = run("solve", "--problem", "hs35", "--config", cfg, "--algorithm", "fully-stochastic",
            "--out", str(tmp_path / "t.json"))
    assert r.returncode == 4
    assert json.loads((tmp_path / "t.json").read_text())["status"] == "merit-divergence"


def test_sweep_with_failures_exit_4(tmp_path):
    doc = json.loads(json.dumps(SMALL_SWEEP))
    doc["solver"]["baseline"] = {"threshold": "negated"}
    doc["experiment"]["methods"] = [{"algorithm": "fully-stochastic", "hessian": "Id"}]
    doc["experiment"]["suite"] = {"count": 10}
    cfg = write_json(tmp_path / "c.json", doc)
    r = run("bench", "--experiment", "exp3-adaptive-vs-fixed", "--config", cfg, "--out", str(tmp_path / "out"))
    assert r.returncode == 4


def test_bench_profile_summary_ok(tmp_path):
    cfg = write_json(tmp_path / "c.json", SMALL_SWEEP)
    out = tmp_path / "out"
    r = run("bench", "--experiment", "exp3-adaptive-vs-fixed", "--config", cfg, "--out", str(out))
    assert r.returncode == 0, r.stderr
    for name in ("config.json", "results.csv", "profile.csv", "boxes.csv"):
        assert (out / name).exists()
    results = str(out / "results.csv")
    assert run("profile", "--in", results, "--out", str(tmp_path / "p.csv"), "--grid", "1,10,100").returncode == 0
    assert run("summary", "--in", results, "--out", str(tmp_path / "b.csv")).returncode == 0
    assert run("profile", "--in", results, "--out", str(tmp_path / "p.csv"), "--grid", "10,1").returncode == 2
