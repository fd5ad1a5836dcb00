"""End-to-end CLI pipeline check.

Drives the command-line tool through a sphere mini-campaign and verifies
the emitted improvement table against an independent recomputation from
the raw dataset CSVs.
"""

import csv
import math
import os
import subprocess
import sys

import pytest

BIN = os.environ.get("CMASWITCH_BIN")

pytestmark = pytest.mark.skipif(
    BIN is None or not os.path.exists(BIN or ""),
    reason="CMASWITCH_BIN not set",
)

BUDGET = 20000
N_TARGETS = 51


def run(*args, expect=0):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    assert proc.returncode == expect, (
        f"{args} -> {proc.returncode}\n{proc.stdout}\n{proc.stderr}"
    )
    return proc.stdout


def read_rows(path):
    with open(path) as f:
        return [row for row in csv.DictReader(f) if row]


def hit(row, t):
    v = row[f"hit_{t}"]
    return int(v) if v else None


def independent_ert(rows, config, t):
    total, ok = 0.0, 0
    for row in rows:
        if row["config"] != config:
            continue
        h = hit(row, t)
        if h is None:
            total += BUDGET
        else:
            total += h
            ok += 1
    return total / ok if ok else math.inf


def independent_phi_min(rows):
    configs = {row["config"] for row in rows}
    for t in range(N_TARGETS - 1, -1, -1):
        for config in configs:
            mine = [row for row in rows if row["config"] == config]
            if mine and all(hit(row, t) is not None for row in mine):
                return t
    raise AssertionError("no configuration reached any target")


def test_cli_pipeline(tmp_path):
    manifest = tmp_path / "campaign.txt"
    manifest.write_text(
        "configs = 00000000000, 01000000000, 00000010000\n"
        "fids = 1\n"
        "instances = 1,2\n"
        "runs_per_instance = 3\n"
        "dim = 5\n"
        f"budget = {BUDGET}\n"
        "base_seed = 7\n"
        f"out = {tmp_path / 'static.csv'}\n"
    )
    run("run-static", "--manifest", str(manifest), "--quiet")

    run("metrics", "--data", str(tmp_path / "static.csv"),
        "--budget", str(BUDGET), "--out", str(tmp_path / "table.csv"))
    assert (tmp_path / "table.csv").exists()

    run("select", "--data", str(tmp_path / "static.csv"), "--fid", "1",
        "--method", "sliding-mean", "--top-k", "3", "--limited",
        "--budget", str(BUDGET), "--out", str(tmp_path / "sel.csv"),
        "--emit-run-manifest", str(tmp_path / "adaptive.txt"),
        "--run-out", str(tmp_path / "adaptive.csv"),
        "--runs", "3", "--instances", "1", "2", "--seed", "9")
    run("run-adaptive", "--manifest", str(tmp_path / "adaptive.txt"), "--quiet")

    out = run("analyze", "--selection", str(tmp_path / "sel.csv"),
              "--rerun", str(tmp_path / "static.csv"),
              "--achieved", str(tmp_path / "adaptive.csv"),
              "--budget", str(BUDGET),
              "--out-dir", str(tmp_path / "reports"))
    assert "relative improvement" in out

    # ---- independent recomputation from the raw CSVs ----
    static_rows = read_rows(tmp_path / "static.csv")
    adaptive_rows = read_rows(tmp_path / "adaptive.csv")
    phi_min = independent_phi_min(static_rows)

    best_static = math.inf
    for config in sorted({row["config"] for row in static_rows}):
        best_static = min(best_static,
                          independent_ert(static_rows, config, phi_min))

    triples = sorted({row["config"] for row in adaptive_rows})
    achieved = [independent_ert(adaptive_rows, t, phi_min) for t in triples]
    finite = [a for a in achieved if math.isfinite(a)]
    expected_fraction = (
        100.0 * sum(1 for a in finite if a < best_static) / len(achieved)
    )

    report = read_rows(tmp_path / "reports" / "f1_improvement.csv")[0]
    assert float(report["best_static_ert"]) == pytest.approx(best_static)
    assert float(report["improvement_fraction_pct"]) == pytest.approx(
        expected_fraction)
    best_adaptive = min(finite) if finite else math.inf
    assert float(report["best_adaptive_ert"]) == pytest.approx(best_adaptive)
    expected_improvement = (best_static - best_adaptive) / best_static * 100.0
    assert float(report["relative_improvement_pct"]) == pytest.approx(
        expected_improvement, abs=1e-6)

    # resumability: a second invocation computes nothing new
    out = run("run-static", "--manifest", str(manifest), "--quiet")
    assert "executed 0" in out
    assert "skipped 18" in out

    # export writes the same file set plus the SVG renderings
    out = run("export", "--selection", str(tmp_path / "sel.csv"),
              "--rerun", str(tmp_path / "static.csv"),
              "--achieved", str(tmp_path / "adaptive.csv"),
              "--budget", str(BUDGET),
              "--out-dir", str(tmp_path / "exported"))
    for suffix in ("_activation.csv", "_activation.svg",
                   "_predicted_vs_achieved.csv", "_predicted_vs_achieved.svg",
                   "_improvement.csv", "_files.txt"):
        assert (tmp_path / "exported" / f"f1{suffix}").exists()
    svg = (tmp_path / "exported" / "f1_activation.svg").read_text()
    assert svg.startswith("<svg")


def test_cli_two_stage(tmp_path):
    manifest = tmp_path / "campaign.txt"
    manifest.write_text(
        "configs = 00000000000, 01000000000, 00000110000, 00100000000\n"
        "fids = 5\n"
        "instances = 1,2\n"
        "runs_per_instance = 3\n"
        "dim = 5\n"
        f"budget = {BUDGET}\n"
        "base_seed = 3\n"
        f"out = {tmp_path / 'stage1.csv'}\n"
    )
    run("run-static", "--manifest", str(manifest), "--quiet")
    out = run("two-stage", "--stage1", str(tmp_path / "stage1.csv"),
              "--fid", "5", "--budget", str(BUDGET),
              "--instances", "1", "2", "--runs", "3",
              "--top-statics", "2", "--top-triples", "5",
              "--emit-manifest", str(tmp_path / "rerun.txt"),
              "--rerun-out", str(tmp_path / "rerun.csv"))
    assert "candidate configurations" in out
    run("run-static", "--manifest", str(tmp_path / "rerun.txt"), "--quiet")
    out = run("two-stage", "--rerun", str(tmp_path / "rerun.csv"),
              "--fid", "5", "--budget", str(BUDGET), "--top-k", "5",
              "--out", str(tmp_path / "sel.csv"))
    assert "two_stage" in out
    text = (tmp_path / "sel.csv").read_text()
    assert text.startswith("# fid=5 method=two_stage")
    assert "rank,c1,c2,tau_index,predicted_value,method" in text


def test_cli_exit_codes(tmp_path):
    run("definitely-not-a-command", expect=1)
    run("select", "--data", "/nonexistent.csv", "--fid", "1",
        "--out", str(tmp_path / "x.csv"), expect=1)
    bad = tmp_path / "bad.csv"
    bad.write_text("this,is,not,a,dataset\n")
    run("metrics", "--data", str(bad), "--out", str(tmp_path / "t.csv"),
        expect=2)


def test_enumerate_counts():
    assert run("enumerate").strip() == "4608"
    assert run("enumerate", "--no-restarts").strip() == "1536"
    listing = run("enumerate", "--no-restarts", "--list").splitlines()
    assert len(listing) == 1536
    assert listing[0] == "00000000000"
    assert all(c.endswith("0") for c in listing)


HELP_FLAGS = {
    "enumerate": ["--no-restarts", "--list"],
    "run-static": ["--manifest", "--out", "--workers", "--quiet"],
    "run-adaptive": ["--manifest", "--out", "--workers", "--quiet"],
    "metrics": ["--data", "--budget", "--out"],
    "select": ["--data", "--fid", "--method", "--top-k", "--limited",
               "--budget", "--out", "--emit-run-manifest", "--runs",
               "--instances", "--seed"],
    "two-stage": ["--stage1", "--rerun", "--fid", "--budget", "--runs",
                  "--instances", "--seed", "--top-statics", "--top-triples",
                  "--rank-by-ert", "--emit-manifest", "--top-k", "--out",
                  "--emit-run-manifest"],
    "analyze": ["--selection", "--rerun", "--achieved", "--budget",
                "--out-dir"],
    "export": ["--selection", "--rerun", "--achieved", "--budget",
               "--out-dir"],
}


def test_help_documents_every_flag():
    top = run("--help")
    for sub, flags in HELP_FLAGS.items():
        assert sub in top
        text = run(sub, "--help")
        for flag in flags:
            assert flag in text, f"{sub} --help is missing {flag}"
