import json

import pytest

from gcfp.cli import main
from gcfp.scenarios import builtin, scenario_to_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def expansion_config(tmp_path):
    # x -> 2x on the whole line: a self-map that breaks every contraction bound.
    cfg = scenario_to_config(builtin("shift-counterexample"))
    cfg["name"] = "doubling"
    cfg["map"] = {"kind": "affine", "matrix": [[2.0]], "vector": [0.0]}
    cfg["params"] = {"variant": "graph-gc-strict", "a": 0.5, "b": 0.5, "c": 0.2}
    path = tmp_path / "doubling.json"
    path.write_text(json.dumps(cfg))
    return path


class TestCheck:
    def test_halving(self, capsys):
        code, out, _ = run(capsys, "check", "--builtin", "halving", "--samples", "100000",
                           "--seed", "7", "--no-timestamp")
        assert code == 0
        body = json.loads(out)
        assert body["ok"] and body["condition"]["violation_count"] == 0
        assert body["manifest"]["seed"] == 7

    def test_shift_holds(self, capsys):
        code, out, _ = run(capsys, "check", "--builtin", "shift-counterexample", "--no-timestamp")
        assert code == 0
        assert json.loads(out)["condition"]["samples_tested"] > 0

    def test_expansion_fails(self, capsys, expansion_config):
        code, out, _ = run(capsys, "check", "--config", str(expansion_config), "--samples", "2000")
        assert code == 1
        body = json.loads(out)
        assert body["condition"]["violation_count"] > 0
        assert body["condition"]["violations"]

    def test_config_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        code, _, err = run(capsys, "check", "--config", str(bad))
        assert code == 2 and "parse error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "check", "--config", str(tmp_path / "none.json"))
        assert code == 2


class TestSolve:
    def test_halving(self, capsys):
        code, out, err = run(capsys, "solve", "--builtin", "halving", "--tol", "1e-9", "--no-timestamp")
        assert code == 0
        body = json.loads(out)
        cert = body["certificate"]
        assert cert["status"] == "converged"
        assert abs(cert["omega"][0]) <= 1e-8
        assert body["matches_expected"] is True
        trace = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
        assert len(trace) == len(cert["steps"])

    def test_shift_force(self, capsys, tmp_path):
        out_path = tmp_path / "cert.json"
        code, _, _ = run(capsys, "solve", "--builtin", "shift-counterexample", "--force",
                         "--out", str(out_path))
        assert code == 1
        trace = [json.loads(line) for line in out_path.with_suffix(".trace.jsonl").read_text().splitlines()]
        assert len(trace) == 200
        assert all(abs(step["residual"] - 1) <= 1e-12 for step in trace)
        cert = json.loads(out_path.read_text())["certificate"]
        assert cert["status"] == "hypothesis-failure" and not cert["certifying"]

    def test_beta_rejected(self, capsys):
        code, _, err = run(capsys, "solve", "--builtin", "halving", "--beta", "0.39")
        assert code == 2 and "outside" in err

    def test_shift_without_force(self, capsys):
        code, _, _ = run(capsys, "solve", "--builtin", "shift-counterexample")
        assert code == 2

    def test_trace_path(self, capsys, tmp_path):
        trace = tmp_path / "t.jsonl"
        code, _, _ = run(capsys, "solve", "--builtin", "affine-monotone", "--trace", str(trace))
        assert code == 0
        lines = trace.read_text().splitlines()
        assert lines and all("residual" in json.loads(line) for line in lines)


class TestLemmas:
    @pytest.mark.parametrize("name", ["halving", "affine-monotone"])
    def test_pass(self, capsys, name):
        code, out, _ = run(capsys, "lemmas", "--builtin", name)
        assert code == 0
        assert out.count("PASS") == 4

    def test_shift_fails(self, capsys, tmp_path):
        out_path = tmp_path / "lemmas.json"
        code, out, _ = run(capsys, "lemmas", "--builtin", "shift-counterexample", "--out", str(out_path))
        assert code == 1
        suites = {s["lemma"]: s for s in json.loads(out_path.read_text())["suites"]}
        assert not suites["reduction index"]["passed"]


def test_demo_strip(capsys):
    code, out, _ = run(capsys, "demo-strip", "--no-timestamp")
    assert code == 0
    body = json.loads(out)
    assert body["ok"]
    assert body["manifest"]["timestamp"] is None


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("check", "--builtin", "halving", "--samples", "5000"),
        ("solve", "--builtin", "affine-monotone"),
        ("lemmas", "--builtin", "strip-space", "--samples", "2000"),
        ("demo-strip", "--terms", "50"),
    ])
    def test_byte_identical(self, tmp_path, capsys, argv):
        paths = [tmp_path / f"r{i}.json" for i in range(2)]
        for p in paths:
            main([*argv, "--no-timestamp", "--out", str(p)])
        capsys.readouterr()
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("GCFP_SEED", "11")
        _, out, _ = run(capsys, "check", "--builtin", "halving", "--samples", "1000", "--no-timestamp")
        assert json.loads(out)["manifest"]["seed"] == 11
        _, out, _ = run(capsys, "check", "--builtin", "halving", "--samples", "1000",
                        "--seed", "3", "--no-timestamp")
        assert json.loads(out)["manifest"]["seed"] == 3

    def test_timestamp_present_by_default(self, capsys):
        _, out, _ = run(capsys, "demo-strip", "--terms", "10")
        assert json.loads(out)["manifest"]["timestamp"].endswith("Z")
