"""Scenario files: schema validation, schedule evaluation, system assembly.

A scenario is one JSON document with explicit units in its field names.
It describes the robot, the controller and admittance settings, the tank
budget, the barrier task stack, and a timed schedule of external inputs
(force segments, obstacle/goal waypoint trajectories, admittance
parameter switches).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .admittance import AdmittanceParams, AdmittanceState, RepulsivePotential
from .barriers import JointLimitTask, ObstacleAvoidanceTask, PositionGoalTask
from .controller import ControllerConfig, ControlLoop
from .kinematics import JointState, PlanarArm, SpatialArm
from .tank import init_tank

__all__ = ["ScenarioError", "Scenario", "load_scenario", "validate_scenario"]


class ScenarioError(ValueError):
    """Scenario document failed validation."""


def _require(condition, message):
    if not condition:
        raise ScenarioError(message)


def _as_floats(value, name, length=None):
    try:
        arr = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{name} must be a list of numbers") from exc
    _require(all(math.isfinite(v) for v in arr), f"{name} must be finite")
    if length is not None:
        _require(len(arr) == length, f"{name} must have {length} entries")
    return arr


@dataclass
class ForceSegment:
    t_start_s: float
    t_end_s: float
    force_n: list
    ramp_s: float = 0.0

    def value_at(self, t):
        if t < self.t_start_s or t > self.t_end_s:
            return None
        factor = 1.0
        if self.ramp_s > 0.0:
            factor = min(
                1.0,
                (t - self.t_start_s) / self.ramp_s,
                (self.t_end_s - t) / self.ramp_s,
            )
            factor = max(0.0, factor)
        return factor * np.asarray(self.force_n)


@dataclass
class WaypointTrack:
    """Piecewise-linear position track; velocity is the segment slope."""

    times_s: list
    points_m: list

    def at(self, t):
        ts, ps = self.times_s, self.points_m
        if t <= ts[0]:
            return np.asarray(ps[0], dtype=float), np.zeros(len(ps[0]))
        if t >= ts[-1]:
            return np.asarray(ps[-1], dtype=float), np.zeros(len(ps[-1]))
        k = 1
        while ts[k] < t:
            k += 1
        span = ts[k] - ts[k - 1]
        frac = (t - ts[k - 1]) / span
        a = np.asarray(ps[k - 1], dtype=float)
        b = np.asarray(ps[k], dtype=float)
        return a + frac * (b - a), (b - a) / span


@dataclass
class AdmittanceSwitch:
    t_s: float
    inertia_kg: list | None
    damping_ns_per_m: list | None


@dataclass
class Scenario:
    """Validated scenario ready to be assembled into a control loop."""

    name: str
    mode: str
    duration_s: float
    dt_s: float
    robot_spec: dict
    q0_rad: list
    controller_spec: dict
    admittance_spec: dict
    tank_spec: dict
    task_specs: list
    force_segments: list
    obstacle_track: WaypointTrack | None
    goal_track: WaypointTrack | None
    admittance_switches: list
    raw: dict

    def build_model(self):
        spec = self.robot_spec
        if spec["type"] == "planar":
            return PlanarArm(
                spec["link_lengths_m"], spec["q_min_rad"], spec["q_max_rad"]
            )
        return SpatialArm(
            spec["joint_axes"],
            spec["link_offsets_m"],
            spec["q_min_rad"],
            spec["q_max_rad"],
        )

    def build(self):
        """Assemble the full control loop at its initial state."""
        model = self.build_model()
        x0 = model.forward_kinematics(np.asarray(self.q0_rad))

        obstacle0 = None
        if self.obstacle_track is not None:
            obstacle0 = self.obstacle_track.at(0.0)[0]
        goal0 = None
        if self.goal_track is not None:
            goal0 = self.goal_track.at(0.0)[0]

        tasks = []
        for spec in self.task_specs:
            kind = spec["type"]
            if kind == "position_goal":
                target = goal0 if goal0 is not None else spec["goal_m"]
                tasks.append(
                    PositionGoalTask(
                        gain=spec["gain"],
                        x_goal=np.asarray(target, dtype=float),
                        xdot_goal=np.zeros(model.m),
                        use_slack=spec.get("use_slack", True),
                    )
                )
            elif kind == "obstacle":
                target = obstacle0 if obstacle0 is not None else spec["position_m"]
                tasks.append(
                    ObstacleAvoidanceTask(
                        gain=spec["gain"],
                        d_min_m=spec["d_min_m"],
                        x_obs=np.asarray(target, dtype=float),
                        xdot_obs=np.zeros(model.m),
                        use_slack=spec.get("use_slack", True),
                    )
                )
            elif kind == "joint_limits":
                for i in range(model.n):
                    tasks.append(
                        JointLimitTask(
                            gain=spec["gain"],
                            joint_index=i,
                            q_lo=float(model.q_min[i]),
                            q_hi=float(model.q_max[i]),
                            use_slack=spec.get("use_slack", True),
                        )
                    )

        potential = None
        pot_spec = self.admittance_spec.get("potential")
        if pot_spec is not None:
            anchor = obstacle0
            if anchor is None:
                for spec in self.task_specs:
                    if spec["type"] == "obstacle":
                        anchor = np.asarray(spec["position_m"], dtype=float)
                        break
            _require(
                anchor is not None,
                "a repulsive potential needs an obstacle position "
                "(obstacle task or obstacle waypoints)",
            )
            potential = RepulsivePotential(
                gain_nm2=pot_spec["gain_nm2"],
                activation_distance_m=pot_spec["activation_distance_m"],
                x_obs=np.asarray(anchor, dtype=float),
            )

        params = AdmittanceParams(
            inertia_kg=np.asarray(self.admittance_spec["inertia_kg"]),
            damping_ns_per_m=np.asarray(self.admittance_spec["damping_ns_per_m"]),
            potential=potential,
        )
        config = ControllerConfig(
            force_weight_gain=self.controller_spec.get("force_weight_gain", 10.0),
            slack_weight=self.controller_spec.get("slack_weight", 100.0),
            dt_s=self.dt_s,
            jacobian_damping=self.controller_spec.get("jacobian_damping", 1e-4),
        )
        loop = ControlLoop(
            model=model,
            joint_state=JointState(q=np.asarray(self.q0_rad), u=np.zeros(model.n)),
            admittance_params=params,
            admittance_state=AdmittanceState(x_a=x0, xdot_a=np.zeros(model.m)),
            tank_state=init_tank(
                self.tank_spec.get("initial_energy_j", 1.0),
                self.tank_spec.get("floor_j", 0.1),
            ),
            tasks=tasks,
            config=config,
        )
        return loop

    def force_at(self, t):
        total = None
        for segment in self.force_segments:
            value = segment.value_at(t)
            if value is not None:
                total = value if total is None else total + value
        if total is None:
            return np.zeros(self._task_dim())
        return total

    def _task_dim(self):
        return 2 if self.robot_spec["type"] == "planar" else 3

    @property
    def n_cycles(self):
        return int(round(self.duration_s / self.dt_s))


def validate_scenario(doc):
    """Validate a scenario dict and return the Scenario object."""
    _require(isinstance(doc, dict), "scenario must be a JSON object")
    name = doc.get("name", "unnamed")
    mode = doc.get("mode", "scripted")
    _require(mode in ("scripted", "live"), "mode must be 'scripted' or 'live'")
    duration = float(doc.get("duration_s", 0.0))
    _require(duration > 0, "duration_s must be positive")
    dt = float(doc.get("dt_s", 0.002))
    _require(dt > 0, "dt_s must be positive")

    robot = doc.get("robot")
    _require(isinstance(robot, dict), "robot section is required")
    rtype = robot.get("type")
    _require(rtype in ("planar", "spatial"), "robot.type must be planar or spatial")
    if rtype == "planar":
        lengths = _as_floats(robot.get("link_lengths_m", []), "link_lengths_m")
        _require(len(lengths) >= 1, "planar robot needs link lengths")
        _require(all(l > 0 for l in lengths), "link lengths must be positive")
        n = len(lengths)
        m = 2
        robot_spec = {"type": "planar", "link_lengths_m": lengths}
    else:
        axes = robot.get("joint_axes", [])
        offsets = robot.get("link_offsets_m", [])
        _require(len(axes) >= 1, "spatial robot needs joint axes")
        _require(len(axes) == len(offsets), "joint_axes/link_offsets_m must match")
        axes = [_as_floats(a, "joint_axes entry", 3) for a in axes]
        offsets = [_as_floats(o, "link_offsets_m entry", 3) for o in offsets]
        n = len(axes)
        m = 3
        robot_spec = {"type": "spatial", "joint_axes": axes, "link_offsets_m": offsets}
    q_min = _as_floats(robot.get("q_min_rad", []), "q_min_rad", n)
    q_max = _as_floats(robot.get("q_max_rad", []), "q_max_rad", n)
    _require(
        all(lo < hi for lo, hi in zip(q_min, q_max)),
        "each q_min_rad entry must be below q_max_rad",
    )
    robot_spec["q_min_rad"] = q_min
    robot_spec["q_max_rad"] = q_max

    q0 = _as_floats(doc.get("q0_rad", []), "q0_rad", n)
    _require(
        all(lo <= v <= hi for v, lo, hi in zip(q0, q_min, q_max)),
        "q0_rad must lie within the joint limits",
    )

    controller = doc.get("controller", {})
    _require(isinstance(controller, dict), "controller must be an object")
    _require(
        float(controller.get("slack_weight", 100.0)) > 0,
        "controller.slack_weight must be positive",
    )
    _require(
        float(controller.get("force_weight_gain", 10.0)) >= 0,
        "controller.force_weight_gain must be non-negative",
    )

    admittance = doc.get("admittance", {})
    inertia = _as_floats(
        admittance.get("inertia_kg", [0.75] * m), "admittance.inertia_kg", m
    )
    damping = _as_floats(
        admittance.get("damping_ns_per_m", [0.05] * m),
        "admittance.damping_ns_per_m",
        m,
    )
    _require(all(v > 0 for v in inertia), "admittance inertia must be positive")
    _require(all(v >= 0 for v in damping), "admittance damping must be non-negative")
    admittance_spec = {"inertia_kg": inertia, "damping_ns_per_m": damping}
    # rotational values are recorded for reference only; the task space is
    # Cartesian position and orientation control is not implemented
    for key in ("rotational_inertia_kg", "rotational_damping_ns_per_m"):
        if key in admittance:
            value = float(admittance[key])
            _require(value >= 0, f"admittance.{key} must be non-negative")
            admittance_spec[key] = value
    pot = admittance.get("potential")
    if pot is not None:
        gain = float(pot.get("gain_nm2", 1.0))
        dstar = float(pot.get("activation_distance_m", 0.5))
        _require(gain >= 0, "potential gain must be non-negative")
        _require(dstar > 0, "potential activation distance must be positive")
        admittance_spec["potential"] = {
            "gain_nm2": gain,
            "activation_distance_m": dstar,
        }

    tank = doc.get("tank", {})
    t0 = float(tank.get("initial_energy_j", 1.0))
    floor = float(tank.get("floor_j", 0.1))
    _require(floor > 0, "tank floor must be positive")
    _require(t0 >= floor, "initial tank energy must not be below the floor")
    tank_spec = {"initial_energy_j": t0, "floor_j": floor}

    task_specs = []
    has_obstacle_task = False
    for spec in doc.get("tasks", []):
        _require(isinstance(spec, dict), "each task must be an object")
        kind = spec.get("type")
        _require(
            kind in ("position_goal", "obstacle", "joint_limits"),
            f"unknown task type {kind!r}",
        )
        gain = float(spec.get("gain", 1.0))
        _require(gain > 0, f"{kind} gain must be positive")
        entry = {"type": kind, "gain": gain}
        if "use_slack" in spec:
            entry["use_slack"] = bool(spec["use_slack"])
        if kind == "position_goal":
            entry["goal_m"] = _as_floats(spec.get("goal_m", []), "goal_m", m)
        elif kind == "obstacle":
            d_min = float(spec.get("d_min_m", 0.25))
            _require(d_min > 0, "d_min_m must be positive")
            entry["d_min_m"] = d_min
            if "position_m" in spec:
                entry["position_m"] = _as_floats(spec["position_m"], "position_m", m)
        task_specs.append(entry)
        has_obstacle_task = has_obstacle_task or kind == "obstacle"

    schedule = doc.get("schedule", {})
    _require(isinstance(schedule, dict), "schedule must be an object")

    segments = []
    for seg in schedule.get("forces", []):
        t_start = float(seg.get("t_start_s", 0.0))
        t_end = float(seg.get("t_end_s", duration))
        _require(
            0.0 <= t_start < t_end <= duration,
            "force segment times must satisfy 0 <= start < end <= duration",
        )
        force = _as_floats(seg.get("force_n", []), "force_n", m)
        ramp = float(seg.get("ramp_s", 0.0))
        _require(ramp >= 0, "force ramp must be non-negative")
        segments.append(
            ForceSegment(t_start_s=t_start, t_end_s=t_end, force_n=force, ramp_s=ramp)
        )

    def read_track(key):
        waypoints = schedule.get(key, [])
        if not waypoints:
            return None
        times, points = [], []
        for wp in waypoints:
            t_wp = float(wp.get("t_s", 0.0))
            _require(0.0 <= t_wp <= duration, f"{key} times must lie in [0, duration]")
            times.append(t_wp)
            points.append(_as_floats(wp.get("position_m", []), key, m))
        _require(
            all(a < b for a, b in zip(times, times[1:])),
            f"{key} times must be strictly increasing",
        )
        return WaypointTrack(times_s=times, points_m=points)

    obstacle_track = read_track("obstacle_waypoints")
    goal_track = read_track("goal_waypoints")

    if obstacle_track is None and has_obstacle_task:
        for entry in task_specs:
            if entry["type"] == "obstacle":
                _require(
                    "position_m" in entry,
                    "obstacle task needs position_m or obstacle_waypoints",
                )
    if goal_track is None:
        for entry in task_specs:
            if entry["type"] == "position_goal":
                _require(
                    "goal_m" in entry and entry["goal_m"],
                    "position_goal task needs goal_m or goal_waypoints",
                )

    switches = []
    for sw in schedule.get("admittance_switches", []):
        t_sw = float(sw.get("t_s", 0.0))
        _require(0.0 <= t_sw <= duration, "switch times must lie in [0, duration]")
        inertia_sw = sw.get("inertia_kg")
        damping_sw = sw.get("damping_ns_per_m")
        if inertia_sw is not None:
            inertia_sw = _as_floats(inertia_sw, "switch inertia_kg", m)
            _require(all(v > 0 for v in inertia_sw), "switch inertia must be positive")
        if damping_sw is not None:
            damping_sw = _as_floats(damping_sw, "switch damping_ns_per_m", m)
            _require(
                all(v >= 0 for v in damping_sw),
                "switch damping must be non-negative",
            )
        switches.append(
            AdmittanceSwitch(
                t_s=t_sw, inertia_kg=inertia_sw, damping_ns_per_m=damping_sw
            )
        )
    switches.sort(key=lambda s: s.t_s)

    return Scenario(
        name=name,
        mode=mode,
        duration_s=duration,
        dt_s=dt,
        robot_spec=robot_spec,
        q0_rad=q0,
        controller_spec=dict(controller),
        admittance_spec=admittance_spec,
        tank_spec=tank_spec,
        task_specs=task_specs,
        force_segments=segments,
        obstacle_track=obstacle_track,
        goal_track=goal_track,
        admittance_switches=switches,
        raw=doc,
    )


def load_scenario(path):
    """Load and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    return validate_scenario(doc)
