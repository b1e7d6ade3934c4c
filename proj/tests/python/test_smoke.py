import json
import math
import os
import subprocess
import sys

import pytest

import dexc

CLI = os.environ.get("DEXC_CLI")


def test_rot_distance_examples():
    assert dexc.rot_distance((1, 0, 0, 0), (1, 0, 0, 0)) == 0.0
    s = math.sqrt(0.5)
    assert dexc.rot_distance((s, 0, 0, s), (1, 0, 0, 0)) == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(dexc.InvalidArgument):
        dexc.rot_distance((2, 0, 0, 0), (1, 0, 0, 0))


def test_task_reward_matches_formula():
    cfg = dexc.RunConfig("[reward]\nbeta_pos = 10\n")
    t = dexc.task_reward((0.1, 0, 0), (1, 0, 0, 0), 0.0, (0, 0, 0), (1, 0, 0, 0), 0.0, cfg)
    assert t["r_task"] == pytest.approx(math.exp(-1.0), abs=1e-15)
    same = dexc.task_reward((0, 0, 0), (1, 0, 0, 0), 0.3, (0, 0, 0), (1, 0, 0, 0), 0.3)
    assert same["r_task"] == 1.0


def test_add_auc_cases():
    assert dexc.add_auc([0.0] * 10) == 1.0
    assert dexc.add_auc([0.2] * 10) == 0.0
    assert dexc.add_auc([float("inf")] * 10) == 0.0
    assert dexc.add_auc([0.05] * 10, 0.1, 100) == pytest.approx(0.51)
    th = dexc.auc_thresholds(0.1, 4)
    assert th == pytest.approx([0.025, 0.05, 0.075, 0.1])


def test_config_overrides_and_hash():
    a = dexc.RunConfig("", [("run.seed", "3")])
    b = dexc.RunConfig(a.canonical())
    assert a.hash() == b.hash()
    assert a.method == "dexmachina"
    with pytest.raises(dexc.Error):
        dexc.RunConfig("[train]\nno_such_key = 1\n")


def test_end_to_end_tiny(tmp_path):
    demo = tmp_path / "demo.json"
    assert dexc.generate_demo("lift", 40, 0.02, str(demo)) == 40
    cfg = dexc.RunConfig(
        f'[task]\ndemo = "{demo}"\n[train]\nn_envs = 4\nhorizon = 16\n'
        "max_iterations = 2\nhidden = [8]\n[eval]\nn_episodes = 1\n"
    )
    with pytest.raises(dexc.Error, match="run prep first"):
        dexc.train(cfg, str(tmp_path / "run"))
    summary = dexc.prep(str(demo), cfg)
    assert os.path.exists(summary["retarget"])
    ckpt = dexc.train(cfg, str(tmp_path / "run"))
    report = dexc.evaluate(cfg, "policy", str(tmp_path / "eval"), checkpoint=ckpt)
    assert 0.0 <= report["add_auc"] <= 1.0
    assert report["method"] == "dexmachina"
    assert len(report["episodes"]) == 1
    loaded = dexc.load_report(str(tmp_path / "eval" / "report.json"))
    assert loaded["add_auc"] == report["add_auc"]
    baseline = dexc.evaluate(cfg, "kinematics-only", str(tmp_path / "kin"))
    assert baseline["method"] == "kinematics-only"
    rows = dexc.aggregate([str(tmp_path)])
    assert sorted(r["method"] for r in rows) == ["dexmachina", "kinematics-only"]
    assert all(r["n"] == 1 for r in rows)


@pytest.mark.skipif(CLI is None, reason="DEXC_CLI not set")
def test_cli_gen_demo_and_errors(tmp_path):
    out = tmp_path / "d.json"
    r = subprocess.run([CLI, "gen-demo", "--script", "lift", "--frames", "30", "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert json.loads(out.read_text())["object_id"]
    bad = subprocess.run([CLI, "gen-demo", "--script", "dance", "--out", str(tmp_path / "x.json")],
                         capture_output=True, text=True)
    assert bad.returncode != 0
    assert bad.stderr.startswith("error:")
    assert len(bad.stderr.strip().splitlines()) == 1
    usage = subprocess.run([CLI, "train", "--bogus"], capture_output=True, text=True)
    assert usage.returncode == 2


@pytest.mark.skipif(CLI is None, reason="DEXC_CLI not set")
def test_cli_eval_baseline(tmp_path):
    demo = tmp_path / "d.json"
    subprocess.run([CLI, "gen-demo", "--script", "lift", "--frames", "40", "--out", str(demo)],
                   check=True, capture_output=True)
    subprocess.run([CLI, "prep", "--demo", str(demo)], check=True, capture_output=True)
    r = subprocess.run([CLI, "eval", "--mode", "controller-only", "--episodes", "1",
                        "--set", f"task.demo={demo}", "--out", str(tmp_path / "ev")],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "ev" / "report.json").read_text())
    assert report["mode"] == "controller-only"
    assert report["add_auc"] >= 0.95
