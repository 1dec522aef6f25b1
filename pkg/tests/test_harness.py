"""Harness: scenario validation, scripted runs, log export/import, determinism."""

import json
import math

import numpy as np
import pytest

from tankbarrier.harness import (
    ScenarioRun,
    export_log,
    import_log,
    run_scenario,
    summarize,
)
from tankbarrier.scenario import ScenarioError, load_scenario, validate_scenario
from tankbarrier.scenarios import builtin_names, builtin_scenario


def small_scenario(duration_s=0.5, **overrides):
    doc = {
        "name": "test",
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
        "controller": {"force_weight_gain": 10.0, "slack_weight": 100.0},
        "admittance": {"inertia_kg": [0.75, 0.75], "damping_ns_per_m": [2.0, 2.0]},
        "tank": {"initial_energy_j": 1.0, "floor_j": 0.1},
        "tasks": [
            {"type": "position_goal", "gain": 5.0, "goal_m": [0.15, 0.7]},
            {"type": "joint_limits", "gain": 1.0},
        ],
        "schedule": {
            "forces": [
                {"t_start_s": 0.1, "t_end_s": 0.3, "force_n": [0.3, -0.1], "ramp_s": 0.05}
            ]
        },
    }
    doc.update(overrides)
    return doc


class TestScenarioValidation:
    def test_valid_document(self):
        scenario = validate_scenario(small_scenario())
        assert scenario.n_cycles == 250

    @pytest.mark.parametrize(
        "mutation,fragment",
        [
            ({"duration_s": 0.0}, "duration"),
            ({"dt_s": -1.0}, "dt_s"),
            ({"q0_rad": [0.0, 0.0]}, "q0_rad"),
            ({"mode": "other"}, "mode"),
            ({"tank": {"initial_energy_j": 0.05, "floor_j": 0.1}}, "floor"),
        ],
    )
    def test_rejects_bad_fields(self, mutation, fragment):
        doc = small_scenario()
        doc.update(mutation)
        with pytest.raises(ScenarioError, match=fragment):
            validate_scenario(doc)

    def test_rejects_out_of_range_q0(self):
        doc = small_scenario()
        doc["q0_rad"] = [3.5, 0.0, 0.0]
        with pytest.raises(ScenarioError):
            validate_scenario(doc)

    def test_rejects_unordered_waypoints(self):
        doc = small_scenario()
        doc["schedule"]["obstacle_waypoints"] = [
            {"t_s": 0.3, "position_m": [1.0, 0.0]},
            {"t_s": 0.1, "position_m": [0.5, 0.0]},
        ]
        with pytest.raises(ScenarioError, match="increasing"):
            validate_scenario(doc)

    def test_rejects_force_times_outside_duration(self):
        doc = small_scenario()
        doc["schedule"]["forces"] = [
            {"t_start_s": 0.0, "t_end_s": 2.0, "force_n": [0.1, 0.0]}
        ]
        with pytest.raises(ScenarioError, match="segment"):
            validate_scenario(doc)

    def test_potential_needs_obstacle(self):
        doc = small_scenario()
        doc["admittance"]["potential"] = {
            "gain_nm2": 1.0,
            "activation_distance_m": 0.5,
        }
        scenario = validate_scenario(doc)
        with pytest.raises(ScenarioError, match="obstacle"):
            scenario.build()

    def test_load_scenario_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError, match="JSON"):
            load_scenario(str(path))

    def test_builtin_scenarios_validate_and_build(self):
        names = builtin_names()
        assert "experiment_1_goal_interruption" in names
        assert "experiment_2_moving_obstacle" in names
        assert "experiment_3_tank_floor" in names
        for name in names:
            builtin_scenario(name).build()


class TestRunScenario:
    def test_record_count_matches_duration(self):
        scenario = validate_scenario(small_scenario())
        records, summary = run_scenario(scenario)
        assert len(records) == scenario.n_cycles == 250
        assert summary["records"] == 250

    def test_at_goal_no_schedule_is_still(self):
        doc = small_scenario()
        doc["schedule"] = {}
        # place the goal exactly at the starting pose
        from tankbarrier.kinematics import PlanarArm

        arm = PlanarArm([0.4, 0.35, 0.25], [-2.9] * 3, [2.9] * 3)
        x0 = arm.forward_kinematics([0.7, 0.8, 0.6])
        doc["tasks"][0]["goal_m"] = [float(x0[0]), float(x0[1])]
        records, summary = run_scenario(validate_scenario(doc))
        assert summary["min_tank_energy_j"] == 1.0
        for r in records:
            assert np.linalg.norm(r.xdot_opt) <= 1e-6
        assert summary["final_goal_error_m"] <= 1e-6

    def test_exact_energy_balance(self):
        scenario = validate_scenario(small_scenario())
        records, _ = run_scenario(scenario)
        acc = 0.0
        for r in records:
            acc += 0.002 * float(np.asarray(r.f_e) @ np.asarray(r.xdot_opt))
        assert abs(records[-1].tank_energy_j - 1.0 - acc) <= 1e-12

    def test_deterministic_bit_for_bit(self, tmp_path):
        doc = small_scenario()
        first, _ = run_scenario(validate_scenario(doc))
        second, _ = run_scenario(validate_scenario(doc))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        export_log(first, "csv", p1, include_timing=False)
        export_log(second, "csv", p2, include_timing=False)
        assert p1.read_bytes() == p2.read_bytes()

    def test_admittance_switch_applies(self):
        doc = small_scenario(duration_s=0.4)
        doc["schedule"]["admittance_switches"] = [
            {"t_s": 0.2, "inertia_kg": [0.3, 0.3]}
        ]
        scenario = validate_scenario(doc)
        run = ScenarioRun(scenario)
        for _ in range(scenario.n_cycles):
            run.step()
        np.testing.assert_array_equal(
            run.loop.admittance_params.inertia_kg, [0.3, 0.3]
        )

    def test_waypoint_track_interpolation(self):
        doc = small_scenario(duration_s=1.0)
        doc["tasks"].insert(
            1, {"type": "obstacle", "gain": 10.0, "d_min_m": 0.25}
        )
        doc["schedule"] = {
            "obstacle_waypoints": [
                {"t_s": 0.0, "position_m": [2.0, 0.0]},
                {"t_s": 1.0, "position_m": [3.0, 1.0]},
            ]
        }
        scenario = validate_scenario(doc)
        pos, vel = scenario.obstacle_track.at(0.5)
        np.testing.assert_allclose(pos, [2.5, 0.5])
        np.testing.assert_allclose(vel, [1.0, 1.0])
        pos, vel = scenario.obstacle_track.at(2.0)
        np.testing.assert_allclose(pos, [3.0, 1.0])
        np.testing.assert_allclose(vel, [0.0, 0.0])


class TestLogRoundTrip:
    def make_records(self):
        doc = small_scenario(duration_s=0.1)
        doc["schedule"] = {
            "forces": [
                {"t_start_s": 0.02, "t_end_s": 0.08, "force_n": [0.3, -0.1]}
            ]
        }
        records, _ = run_scenario(validate_scenario(doc))
        return records

    @pytest.mark.parametrize("fmt,suffix", [("csv", ".csv"), ("jsonl", ".jsonl")])
    def test_export_import_export_is_byte_identical(self, tmp_path, fmt, suffix):
        records = self.make_records()
        p1 = tmp_path / f"log1{suffix}"
        p2 = tmp_path / f"log2{suffix}"
        export_log(records, fmt, p1)
        reloaded = import_log(p1)
        export_log(reloaded, fmt, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_import_preserves_values_exactly(self, tmp_path):
        records = self.make_records()
        path = tmp_path / "log.csv"
        export_log(records, "csv", path)
        reloaded = import_log(path)
        assert len(reloaded) == len(records)
        for a, b in zip(records, reloaded):
            assert a.t_s == b.t_s
            assert a.q == b.q
            assert a.tank_energy_j == b.tank_energy_j
            assert a.task_h == b.task_h
            assert a.fault == b.fault
            assert math.isnan(b.obstacle_distance_m) == math.isnan(
                a.obstacle_distance_m
            )

    def test_empty_log_csv_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        export_log([], "csv", path)
        content = path.read_text()
        assert content.strip() == "t_s"
        assert import_log(path) == []

    def test_jsonl_lines_parse_individually(self, tmp_path):
        records = self.make_records()
        path = tmp_path / "log.jsonl"
        export_log(records, "jsonl", path)
        for line in path.read_text().splitlines():
            doc = json.loads(line)
            assert "t_s" in doc and "tank_energy_j" in doc

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            export_log([], "xml", tmp_path / "log.xml")
