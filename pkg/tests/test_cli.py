import json

import numpy as np
import pytest

from semistable import charfn
from semistable.cli import DEFAULT_SEED, main, run_selftest


def read(path):
    with open(path) as fh:
        return fh.read()


# -- sample -----------------------------------------------------------------------

def test_sample_deterministic_files(tmp_path):
    out1 = str(tmp_path / "a.csv")
    out2 = str(tmp_path / "b.csv")
    args = ["sample", "--model", "petersburg", "--n", "10", "--seed", "1"]
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    assert read(out1) == read(out2)
    lines = read(out1).splitlines()
    assert lines[0] == "index,value"
    assert len(lines) == 11
    meta = json.loads(read(out1 + ".meta.json"))
    assert meta["seed"] == 1
    assert meta["config"]["subcommand"] == "sample"


def test_sample_pareto_symmetrized(tmp_path):
    out = str(tmp_path / "p.csv")
    code = main(["sample", "--model", "pareto", "--alpha", "0.5", "--n", "64",
                 "--symmetrize", "--seed", "2", "--out", out])
    assert code == 0
    vals = [float(l.split(",")[1]) for l in read(out).splitlines()[1:]]
    assert any(v < 0 for v in vals) and any(v > 0 for v in vals)


def test_sample_model_json(tmp_path):
    from semistable.tailmodel import make_pareto, model_to_json
    doc = tmp_path / "model.json"
    doc.write_text(model_to_json(make_pareto(0.5)))
    out = str(tmp_path / "m.csv")
    assert main(["sample", "--model-json", str(doc), "--n", "8", "--seed", "3",
                 "--out", out]) == 0
    assert len(read(out).splitlines()) == 9


# -- cdf --------------------------------------------------------------------------

def test_cdf_grid_rows_and_monotone(tmp_path):
    out = str(tmp_path / "g.csv")
    assert main(["cdf", "--law", "g", "--grid", "-5:15:0.1", "--tol", "1e-8",
                 "--out", out]) == 0
    lines = read(out).splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "x,F,tol"
    rows = [tuple(float(v) for v in l.split(",")) for l in lines[2:]]
    assert len(rows) == 201  # floor((15 - -5)/0.1) + 1
    fs = [r[1] for r in rows]
    assert all(b >= a for a, b in zip(fs, fs[1:]))
    assert lines[-1].endswith(",1e-08")


def test_cdf_gamma_law(tmp_path):
    out = str(tmp_path / "gg.csv")
    assert main(["cdf", "--law", "g-gamma", "--gamma", "1.5", "--grid",
                 "0:4:1", "--out", out]) == 0
    assert len(read(out).splitlines()) == 7


def test_cdf_bad_grid():
    assert main(["cdf", "--law", "g", "--grid", "5:1:0.1"]) == 2
    assert main(["cdf", "--law", "g", "--grid", "nope"]) == 2


def test_parse_error_exit_code():
    assert main(["cdf", "--law", "not-a-law", "--grid", "0:1:1"]) == 2
    assert main(["no-such-command"]) == 2


def test_numeric_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise charfn.InversionError("no decay")
    monkeypatch.setattr("semistable.cli.charfn.cdf_table", boom)
    assert main(["cdf", "--law", "g", "--grid", "0:1:1"]) == 4


# -- experiments -------------------------------------------------------------------

def test_merging_json_artifact(tmp_path):
    out = str(tmp_path / "m.json")
    code = main(["merging", "--n", "1536", "--reps", "20000", "--seed", "7",
                 "--format", "json", "--out", out])
    assert code == 0
    doc = json.loads(read(out))
    assert doc["experiment"] == "merging"
    assert doc["pass"] is True
    assert doc["statistic"] <= 0.03
    assert doc["config"]["seed"] == 7
    assert doc["params"]["gamma"] == 1.5


def test_jsonl_appends(tmp_path):
    out = str(tmp_path / "runs.jsonl")
    for seed in ("5", "6"):
        assert main(["orderstats", "--p", "3", "--n", "500", "--reps", "5000",
                     "--tolerance", "0.03", "--seed", seed, "--format",
                     "jsonl", "--out", out]) == 0
    lines = read(out).splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["config"]["seed"] == 5


def test_threads_byte_identical(tmp_path):
    # identical config (same out path), different worker counts
    out = str(tmp_path / "t.json")
    base = ["feller", "--n", "256", "--reps", "400", "--seed", "9", "--out", out]
    assert main(base + ["--threads", "1"]) == 0
    first = read(out)
    assert main(base + ["--threads", "4"]) == 0
    assert read(out) == first


def test_coupling_csv(tmp_path):
    out = str(tmp_path / "c.csv")
    code = main(["coupling", "--alpha", "0.5", "--n-list", "50,200", "--reps",
                 "200", "--seed", "3", "--format", "csv", "--out", out])
    assert code in (0, 3)
    lines = read(out).splitlines()
    assert lines[1] == "n,median_gap,q90_gap,ks"
    assert len(lines) == 4


def test_negligibility_cli():
    assert main(["negligibility", "--alphas", "0.5,2.5", "--n", "2000",
                 "--reps", "200", "--seed", "4"]) == 0


def test_seed_env_override(tmp_path, monkeypatch):
    out = str(tmp_path / "s.csv")
    monkeypatch.setenv("SEMISTABLE_SEED", "12345")
    assert main(["sample", "--model", "petersburg", "--n", "4", "--out", out]) == 0
    meta = json.loads(read(out + ".meta.json"))
    assert meta["seed"] == 12345
    # explicit flag wins over the environment
    assert main(["sample", "--model", "petersburg", "--n", "4", "--seed", "77",
                 "--out", out]) == 0
    meta = json.loads(read(out + ".meta.json"))
    assert meta["seed"] == 77
    monkeypatch.delenv("SEMISTABLE_SEED")
    assert main(["sample", "--model", "petersburg", "--n", "4", "--out", out]) == 0
    meta = json.loads(read(out + ".meta.json"))
    assert meta["seed"] == DEFAULT_SEED


# -- selftest ---------------------------------------------------------------------

def test_selftest_passes_and_reports():
    code, lines = run_selftest(DEFAULT_SEED)
    assert code == 0
    assert len(lines) >= 8
    assert all(("PASS" in l) or ("FAIL" in l) for l in lines)
    assert all(l.startswith("selftest ") for l in lines)


def test_selftest_injected_corruption_fails():
    # degrading the series truncation budget must break the identity check
    code, lines = run_selftest(DEFAULT_SEED, g_tol=1.0)
    assert code == 3
    assert any("FAIL" in l for l in lines)
