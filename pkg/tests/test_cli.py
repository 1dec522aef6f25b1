"""CLI: run/validate/bench surfaces and exit codes."""

import json

import pytest

from tankbarrier.cli import main
from tankbarrier.harness import import_log


def write_scenario(tmp_path, doc):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return str(path)


def tiny_doc(duration_s=0.1):
    return {
        "name": "cli_test",
        "mode": "scripted",
        "duration_s": duration_s,
        "dt_s": 0.002,
        "robot": {
            "type": "planar",
            "link_lengths_m": [0.4, 0.35, 0.25],
            "q_min_rad": [-2.9] * 3,
            "q_max_rad": [2.9] * 3,
        },
        "q0_rad": [0.7, 0.8, 0.6],
        "controller": {},
        "admittance": {"inertia_kg": [0.75, 0.75], "damping_ns_per_m": [2.0, 2.0]},
        "tank": {},
        "tasks": [{"type": "position_goal", "gain": 5.0, "goal_m": [0.15, 0.7]}],
        "schedule": {},
    }


def test_validate_ok(tmp_path, capsys):
    path = write_scenario(tmp_path, tiny_doc())
    assert main(["validate", path]) == 0
    assert "OK" in capsys.readouterr().out


def test_validate_builtin(capsys):
    assert main(["validate", "builtin:experiment_2_moving_obstacle"]) == 0
    assert "12500 cycles" in capsys.readouterr().out


def test_validate_rejects_broken(tmp_path, capsys):
    doc = tiny_doc()
    doc["duration_s"] = -1
    path = write_scenario(tmp_path, doc)
    assert main(["validate", path]) == 1
    assert "INVALID" in capsys.readouterr().err


def test_run_writes_csv_log(tmp_path, capsys):
    path = write_scenario(tmp_path, tiny_doc())
    out = tmp_path / "log.csv"
    assert main(["run", path, "--out", str(out)]) == 0
    records = import_log(out)
    assert len(records) == 50


def test_run_writes_jsonl_by_extension(tmp_path):
    path = write_scenario(tmp_path, tiny_doc())
    out = tmp_path / "log.jsonl"
    assert main(["run", path, "--out", str(out)]) == 0
    first = json.loads(out.read_text().splitlines()[0])
    assert first["t_s"] == 0.0


def test_run_prints_summary(tmp_path, capsys):
    path = write_scenario(tmp_path, tiny_doc())
    assert main(["run", path, "--summary"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["records"] == 50
    assert "min_tank_energy_j" in summary


def test_run_rejects_live_mode(tmp_path, capsys):
    doc = tiny_doc()
    doc["mode"] = "live"
    path = write_scenario(tmp_path, doc)
    assert main(["run", path]) == 2


def test_bench_smoke(capsys):
    assert main(["bench", "--cycles", "50"]) == 0
    out = capsys.readouterr().out
    stats = json.loads(out[: out.rindex("}") + 1])
    assert stats["cycles"] == 50
    assert stats["constraint_rows"] == 8
