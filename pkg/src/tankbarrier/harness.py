"""Scripted scenario runner, per-cycle log records, and log export/import.

Scripted runs are fixed-step and deterministic: wall time is measured
and reported but never paces or skips simulated cycles.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["LogRecord", "run_scenario", "summarize", "export_log", "import_log"]


@dataclass
class LogRecord:
    """One control cycle's state, energies, task values, and solve stats."""

    t_s: float
    q: list
    x: list
    f_e: list
    xdot_a: list
    xdot_opt: list
    tank_energy_j: float
    tank_accumulated_j: float
    task_names: list
    task_h: list
    task_slack: list
    obstacle_distance_m: float
    solver_iterations: int
    solve_time_s: float
    control_time_s: float
    fault: str = ""


class ScenarioRun:
    """Cycle-by-cycle driver for a scenario: schedule in, log records out."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.loop = scenario.build()
        self.records = []
        self._switches = list(scenario.admittance_switches)
        self._obstacle_tasks = [
            t for t in self.loop.tasks if t.name.startswith("obstacle")
        ]
        self._goal_tasks = [
            t for t in self.loop.tasks if t.name.startswith("position_goal")
        ]

    def reset(self):
        self.loop = self.scenario.build()
        self.records = []
        self._switches = list(self.scenario.admittance_switches)
        self._obstacle_tasks = [
            t for t in self.loop.tasks if t.name.startswith("obstacle")
        ]
        self._goal_tasks = [
            t for t in self.loop.tasks if t.name.startswith("position_goal")
        ]

    def apply_schedule(self, t):
        """Apply admittance switches and move scheduled targets for time t."""
        scenario = self.scenario
        while self._switches and self._switches[0].t_s <= t:
            switch = self._switches.pop(0)
            params = self.loop.admittance_params
            if switch.inertia_kg is not None:
                params.inertia_kg = np.asarray(switch.inertia_kg, dtype=float)
            if switch.damping_ns_per_m is not None:
                params.damping_ns_per_m = np.asarray(
                    switch.damping_ns_per_m, dtype=float
                )
        if scenario.obstacle_track is not None:
            pos, vel = scenario.obstacle_track.at(t)
            self.set_obstacle(pos, vel)
        if scenario.goal_track is not None:
            pos, vel = scenario.goal_track.at(t)
            self.set_goal(pos, vel)

    def set_obstacle(self, position, velocity=None):
        position = np.asarray(position, dtype=float)
        velocity = (
            np.zeros_like(position) if velocity is None else np.asarray(velocity)
        )
        for task in self._obstacle_tasks:
            task.x_obs = position
            task.xdot_obs = velocity
        potential = self.loop.admittance_params.potential
        if potential is not None:
            potential.x_obs = position

    def set_goal(self, position, velocity=None):
        position = np.asarray(position, dtype=float)
        velocity = (
            np.zeros_like(position) if velocity is None else np.asarray(velocity)
        )
        for task in self._goal_tasks:
            task.x_goal = position
            task.xdot_goal = velocity

    def obstacle_position(self):
        if self._obstacle_tasks:
            return self._obstacle_tasks[0].x_obs
        potential = self.loop.admittance_params.potential
        return None if potential is None else potential.x_obs

    def goal_position(self):
        return self._goal_tasks[0].x_goal if self._goal_tasks else None

    def step(self, f_ext=None, include_passivity_row=True):
        """Advance one cycle; scheduled force applies unless overridden."""
        t = self.loop.t
        self.apply_schedule(t)
        if f_ext is None:
            f_ext = self.scenario.force_at(t)
        cycle = self.loop.cycle(f_ext, include_passivity_row=include_passivity_row)
        record = self._record_of(cycle)
        self.records.append(record)
        return record

    def _record_of(self, cycle):
        obstacle = self.obstacle_position()
        distance = float("nan")
        if obstacle is not None:
            distance = float(np.linalg.norm(cycle.x - obstacle))
        out = cycle.output
        return LogRecord(
            t_s=cycle.t,
            q=[float(v) for v in cycle.joint_state.q],
            x=[float(v) for v in cycle.x],
            f_e=[float(v) for v in cycle.f_ext],
            xdot_a=[float(v) for v in cycle.xdot_a],
            xdot_opt=[float(v) for v in out.xdot_opt],
            tank_energy_j=float(cycle.tank.energy_j),
            tank_accumulated_j=float(cycle.tank.accumulated_j),
            task_names=[task.name for task in self.loop.tasks],
            task_h=[float(v) for v in out.task_h],
            task_slack=[float(v) for v in out.task_slack],
            obstacle_distance_m=distance,
            solver_iterations=out.iterations,
            solve_time_s=out.solve_time_s,
            control_time_s=cycle.control_time_s,
            fault=out.fault or "",
        )

    def run(self):
        for _ in range(self.scenario.n_cycles):
            self.step()
        return self.records


def run_scenario(scenario):
    """Run a scripted scenario to completion; returns (records, summary)."""
    if scenario.mode != "scripted":
        raise ValueError("run_scenario handles scripted scenarios only")
    run = ScenarioRun(scenario)
    records = run.run()
    return records, summarize(records, run)


def summarize(records, run=None):
    """Scenario summary: energies, clearances, goal error, slack, timing."""
    if not records:
        return {"records": 0}
    distances = [
        r.obstacle_distance_m
        for r in records
        if not math.isnan(r.obstacle_distance_m)
    ]
    slacks = [abs(s) for r in records for s in r.task_slack]
    control_times = sorted(r.control_time_s for r in records)
    summary = {
        "records": len(records),
        "duration_s": records[-1].t_s + (records[1].t_s - records[0].t_s)
        if len(records) > 1
        else records[-1].t_s,
        "min_tank_energy_j": min(r.tank_energy_j for r in records),
        "min_obstacle_distance_m": min(distances) if distances else None,
        "max_abs_slack": max(slacks) if slacks else 0.0,
        "median_control_time_s": control_times[len(control_times) // 2],
        "worst_control_time_s": control_times[-1],
        "faults": sum(1 for r in records if r.fault),
    }
    if run is not None and run.goal_position() is not None:
        goal = run.goal_position()
        final_x = np.asarray(records[-1].x)
        summary["final_goal_error_m"] = float(np.linalg.norm(final_x - goal))
    return summary


def _csv_header(record, include_timing):
    n = len(record.q)
    m = len(record.x)
    cols = ["t_s"]
    cols += [f"q_{i}" for i in range(n)]
    cols += [f"x_{i}" for i in range(m)]
    cols += [f"f_e_{i}" for i in range(m)]
    cols += [f"xdot_a_{i}" for i in range(m)]
    cols += [f"xdot_opt_{i}" for i in range(m)]
    cols += ["tank_energy_j", "tank_accumulated_j"]
    cols += [f"h_{name}" for name in record.task_names]
    cols += [f"delta_{name}" for name in record.task_names]
    cols += ["obstacle_distance_m", "solver_iterations"]
    if include_timing:
        cols += ["solve_time_s", "control_time_s"]
    cols += ["fault"]
    return cols


def _csv_row(record, include_timing):
    vals = [repr(record.t_s)]
    vals += [repr(v) for v in record.q]
    vals += [repr(v) for v in record.x]
    vals += [repr(v) for v in record.f_e]
    vals += [repr(v) for v in record.xdot_a]
    vals += [repr(v) for v in record.xdot_opt]
    vals += [repr(record.tank_energy_j), repr(record.tank_accumulated_j)]
    vals += [repr(v) for v in record.task_h]
    vals += [repr(v) for v in record.task_slack]
    vals += [repr(record.obstacle_distance_m), str(record.solver_iterations)]
    if include_timing:
        vals += [repr(record.solve_time_s), repr(record.control_time_s)]
    vals += [record.fault]
    return vals


def export_log(records, fmt, path, include_timing=True):
    """Write records as CSV (fixed column order) or JSON lines.

    Float fields use shortest round-trip formatting, so an exported log
    re-imports losslessly at full double precision.
    """
    if fmt not in ("csv", "jsonl"):
        raise ValueError("format must be 'csv' or 'jsonl'")
    if fmt == "csv":
        lines = []
        if records:
            lines.append(",".join(_csv_header(records[0], include_timing)))
            for record in records:
                lines.append(",".join(_csv_row(record, include_timing)))
        else:
            lines.append("t_s")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        return path
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for record in records:
            doc = {
                "t_s": record.t_s,
                "q": record.q,
                "x": record.x,
                "f_e": record.f_e,
                "xdot_a": record.xdot_a,
                "xdot_opt": record.xdot_opt,
                "tank_energy_j": record.tank_energy_j,
                "tank_accumulated_j": record.tank_accumulated_j,
                "task_names": record.task_names,
                "task_h": record.task_h,
                "task_slack": record.task_slack,
                "obstacle_distance_m": None
                if math.isnan(record.obstacle_distance_m)
                else record.obstacle_distance_m,
                "solver_iterations": record.solver_iterations,
                "fault": record.fault,
            }
            if include_timing:
                doc["solve_time_s"] = record.solve_time_s
                doc["control_time_s"] = record.control_time_s
            fh.write(json.dumps(doc) + "\n")
    return path


def _parse_csv(lines):
    header = lines[0].split(",")
    index = {name: i for i, name in enumerate(header)}
    n = sum(1 for name in header if name.startswith("q_"))
    m = sum(1 for name in header if name.startswith("x_") and name != "x_")
    task_names = [name[2:] for name in header if name.startswith("h_")]
    include_timing = "solve_time_s" in index
    records = []
    for line in lines[1:]:
        if not line:
            continue
        vals = line.split(",")
        records.append(
            LogRecord(
                t_s=float(vals[index["t_s"]]),
                q=[float(vals[index[f"q_{i}"]]) for i in range(n)],
                x=[float(vals[index[f"x_{i}"]]) for i in range(m)],
                f_e=[float(vals[index[f"f_e_{i}"]]) for i in range(m)],
                xdot_a=[float(vals[index[f"xdot_a_{i}"]]) for i in range(m)],
                xdot_opt=[float(vals[index[f"xdot_opt_{i}"]]) for i in range(m)],
                tank_energy_j=float(vals[index["tank_energy_j"]]),
                tank_accumulated_j=float(vals[index["tank_accumulated_j"]]),
                task_names=task_names,
                task_h=[float(vals[index[f"h_{name}"]]) for name in task_names],
                task_slack=[
                    float(vals[index[f"delta_{name}"]]) for name in task_names
                ],
                obstacle_distance_m=float(vals[index["obstacle_distance_m"]]),
                solver_iterations=int(vals[index["solver_iterations"]]),
                solve_time_s=float(vals[index["solve_time_s"]])
                if include_timing
                else 0.0,
                control_time_s=float(vals[index["control_time_s"]])
                if include_timing
                else 0.0,
                fault=vals[index["fault"]],
            )
        )
    return records


def import_log(path, fmt=None):
    """Read a log produced by export_log (format sniffed from content)."""
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read()
    lines = content.splitlines()
    if not lines:
        return []
    if fmt is None:
        fmt = "jsonl" if lines[0].lstrip().startswith("{") else "csv"
    if fmt == "csv":
        if len(lines) <= 1:
            return []
        return _parse_csv(lines)
    records = []
    for line in lines:
        if not line.strip():
            continue
        doc = json.loads(line)
        distance = doc.get("obstacle_distance_m")
        records.append(
            LogRecord(
                t_s=doc["t_s"],
                q=doc["q"],
                x=doc["x"],
                f_e=doc["f_e"],
                xdot_a=doc["xdot_a"],
                xdot_opt=doc["xdot_opt"],
                tank_energy_j=doc["tank_energy_j"],
                tank_accumulated_j=doc["tank_accumulated_j"],
                task_names=doc["task_names"],
                task_h=doc["task_h"],
                task_slack=doc["task_slack"],
                obstacle_distance_m=float("nan") if distance is None else distance,
                solver_iterations=doc["solver_iterations"],
                solve_time_s=doc.get("solve_time_s", 0.0),
                control_time_s=doc.get("control_time_s", 0.0),
                fault=doc.get("fault", ""),
            )
        )
    return records
