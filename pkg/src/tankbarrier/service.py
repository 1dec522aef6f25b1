"""Live simulation service: fixed-step control loop plus WebSocket I/O.

The control loop runs on its own thread, paced to the wall clock (or
unpaced for tests); the network side runs on the asyncio event loop.
The only shared state is a single-slot-per-channel input mailbox
(last-writer-wins) and the outbound state snapshot (single producer,
atomically swapped). Inbound commands steer force, obstacle, goal,
pause/resume/reset, and admittance parameter overrides; malformed
frames get an error frame back and never disturb the loop.
"""

import asyncio
import json
import math
import threading
import time
from contextlib import asynccontextmanager

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .harness import ScenarioRun

__all__ = ["InputMailbox", "LiveSession", "create_app"]


class InputMailbox:
    """Single-slot, last-writer-wins channels shared with the loop thread."""

    def __init__(self):
        self._lock = threading.Lock()
        self._force = None  # (vector, owner)
        self._obstacle = None
        self._goal = None
        self._params = None
        self._paused = False
        self._reset = False

    def set_force(self, value, owner):
        with self._lock:
            self._force = (np.asarray(value, dtype=float), owner)

    def clear_force_if_owner(self, owner):
        with self._lock:
            if self._force is not None and self._force[1] == owner:
                self._force = None

    def set_obstacle(self, value):
        with self._lock:
            self._obstacle = np.asarray(value, dtype=float)

    def set_goal(self, value):
        with self._lock:
            self._goal = np.asarray(value, dtype=float)

    def set_params(self, inertia, damping):
        with self._lock:
            self._params = (inertia, damping)

    def set_paused(self, paused):
        with self._lock:
            self._paused = bool(paused)

    def request_reset(self):
        with self._lock:
            self._reset = True

    def snapshot(self):
        """Read all channels once; the reset flag is consumed."""
        with self._lock:
            force = None if self._force is None else self._force[0]
            reset = self._reset
            self._reset = False
            return {
                "force": force,
                "obstacle": self._obstacle,
                "goal": self._goal,
                "params": self._params,
                "paused": self._paused,
                "reset": reset,
            }


class LiveSession:
    """Owns the scenario run and the control thread for live mode."""

    def __init__(self, scenario, rate_hz=None, retain_records=False):
        self.scenario = scenario
        self.run = ScenarioRun(scenario)
        self.mailbox = InputMailbox()
        self.retain_records = retain_records
        if rate_hz is None:
            self.period_s = scenario.dt_s
        elif rate_hz == 0:
            self.period_s = 0.0  # unpaced, for tests
        else:
            self.period_s = 1.0 / rate_hz
        self._thread = None
        self._stop = threading.Event()
        self._snapshot = None  # latest (seq, frame dict), swapped atomically
        self._seq = 0
        self.cycles = 0
        self.overruns = 0

    # -- loop side ----------------------------------------------------

    def _apply_inputs(self, inputs):
        if inputs["reset"]:
            self.run.reset()
            self.cycles = 0
        if inputs["obstacle"] is not None:
            self.run.set_obstacle(inputs["obstacle"])
        if inputs["goal"] is not None:
            self.run.set_goal(inputs["goal"])
        if inputs["params"] is not None:
            inertia, damping = inputs["params"]
            params = self.run.loop.admittance_params
            if inertia is not None:
                params.inertia_kg = np.asarray(inertia, dtype=float)
            if damping is not None:
                params.damping_ns_per_m = np.asarray(damping, dtype=float)

    def step_once(self):
        """One live cycle: mailbox -> schedule -> control step -> snapshot."""
        inputs = self.mailbox.snapshot()
        self._apply_inputs(inputs)
        if inputs["paused"]:
            self._publish(paused=True)
            return None
        t = self.run.loop.t
        force = self.scenario.force_at(min(t, self.scenario.duration_s))
        if inputs["force"] is not None:
            force = force + inputs["force"]
        record = self.run.step(f_ext=force)
        if not self.retain_records:
            self.run.records.clear()
        self.cycles += 1
        self._publish(paused=False, record=record)
        return record

    def _publish(self, paused, record=None):
        previous = self._snapshot
        if record is None and previous is not None:
            frame = dict(previous[1])
        elif record is None:
            frame = self._initial_frame()
        else:
            frame = self._frame_of(record)
        self._seq += 1
        frame["seq"] = self._seq
        frame["paused"] = paused
        self._snapshot = (self._seq, frame)

    def _initial_frame(self):
        loop = self.run.loop
        x = loop.model.forward_kinematics(loop.joint_state.q)
        obstacle = self.run.obstacle_position()
        goal = self.run.goal_position()
        return {
            "type": "state",
            "t_sim": loop.t,
            "q": [float(v) for v in loop.joint_state.q],
            "x": [float(v) for v in x],
            "x_obs": None if obstacle is None else [float(v) for v in obstacle],
            "x_goal": None if goal is None else [float(v) for v in goal],
            "f_e": [0.0] * loop.model.m,
            "xdot_a": [0.0] * loop.model.m,
            "xdot_opt": [0.0] * loop.model.m,
            "tank_energy_j": loop.tank.energy_j,
            "tank_accumulated_j": loop.tank.accumulated_j,
            "tank_floor_j": loop.tank.floor_j,
            "task_names": [task.name for task in loop.tasks],
            "task_h": [0.0] * len(loop.tasks),
            "task_slack": [0.0] * len(loop.tasks),
            "obstacle_distance_m": None,
            "solver_iterations": 0,
            "fault": "",
        }

    def _frame_of(self, record):
        obstacle = self.run.obstacle_position()
        goal = self.run.goal_position()
        return {
            "type": "state",
            "t_sim": record.t_s,
            "q": record.q,
            "x": record.x,
            "x_obs": None if obstacle is None else [float(v) for v in obstacle],
            "x_goal": None if goal is None else [float(v) for v in goal],
            "f_e": record.f_e,
            "xdot_a": record.xdot_a,
            "xdot_opt": record.xdot_opt,
            "tank_energy_j": record.tank_energy_j,
            "tank_accumulated_j": record.tank_accumulated_j,
            "tank_floor_j": self.run.loop.tank.floor_j,
            "task_names": record.task_names,
            "task_h": record.task_h,
            "task_slack": record.task_slack,
            "obstacle_distance_m": None
            if math.isnan(record.obstacle_distance_m)
            else record.obstacle_distance_m,
            "solver_iterations": record.solver_iterations,
            "fault": record.fault,
        }

    def latest_frame(self):
        snap = self._snapshot
        return None if snap is None else snap[1]

    def _loop(self):
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            self.step_once()
            if self.period_s <= 0.0:
                continue
            next_deadline += self.period_s
            now = time.monotonic()
            if now < next_deadline:
                time.sleep(next_deadline - now)
            else:
                # Overrun: log it, keep simulated time fixed-step, and
                # re-anchor the deadline instead of skipping cycles.
                self.overruns += 1
                next_deadline = now

    def start(self):
        self._publish(paused=False)
        self._stop.clear()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    # -- command side -------------------------------------------------

    def handle_command(self, message, owner):
        """Apply one client command; raises ValueError on malformed input."""
        if not isinstance(message, dict):
            raise ValueError("command must be a JSON object")
        kind = message.get("type")
        m = self.run.loop.model.m
        if kind == "force":
            vec = _read_vector(message, ("fx", "fy", "fz"), m)
            self.mailbox.set_force(vec, owner)
        elif kind == "obstacle":
            self.mailbox.set_obstacle(_read_vector(message, ("x", "y", "z"), m))
        elif kind == "goal":
            self.mailbox.set_goal(_read_vector(message, ("x", "y", "z"), m))
        elif kind == "pause":
            self.mailbox.set_paused(True)
        elif kind == "resume":
            self.mailbox.set_paused(False)
        elif kind == "reset":
            self.mailbox.request_reset()
        elif kind == "param":
            inertia = message.get("inertia_kg")
            damping = message.get("damping_ns_per_m")
            if inertia is None and damping is None:
                raise ValueError("param command needs inertia_kg or damping_ns_per_m")
            for name, value in (("inertia_kg", inertia), ("damping_ns_per_m", damping)):
                if value is None:
                    continue
                arr = [float(v) for v in value]
                if len(arr) != m or not all(math.isfinite(v) for v in arr):
                    raise ValueError(f"{name} must be {m} finite numbers")
                if name == "inertia_kg" and any(v <= 0 for v in arr):
                    raise ValueError("inertia entries must be positive")
                if name == "damping_ns_per_m" and any(v < 0 for v in arr):
                    raise ValueError("damping entries must be non-negative")
            self.mailbox.set_params(inertia, damping)
        else:
            raise ValueError(f"unknown command type {kind!r}")

    def client_dropped(self, owner):
        self.mailbox.clear_force_if_owner(owner)


def _read_vector(message, keys, m):
    values = []
    for key in keys[:m]:
        if key not in message:
            raise ValueError(f"missing field {key!r}")
        value = float(message[key])
        if not math.isfinite(value):
            raise ValueError(f"field {key!r} must be finite")
        values.append(value)
    return np.array(values)


def create_app(scenario, rate_hz=None, broadcast_interval_s=0.016, retain_records=False):
    """FastAPI app serving the live loop over a WebSocket at /ws."""
    session = LiveSession(scenario, rate_hz=rate_hz, retain_records=retain_records)
    clients = set()

    @asynccontextmanager
    async def lifespan(app):
        session.start()
        broadcaster = asyncio.create_task(_broadcast())
        yield
        broadcaster.cancel()
        session.stop()

    app = FastAPI(title="tankbarrier live service", lifespan=lifespan)
    app.state.session = session

    async def _broadcast():
        last_seq = -1
        while True:
            await asyncio.sleep(broadcast_interval_s)
            snap = session._snapshot
            if snap is None or snap[0] == last_seq:
                continue
            last_seq = snap[0]
            payload = json.dumps(snap[1])
            dead = []
            for ws in list(clients):
                try:
                    await ws.send_text(payload)
                except Exception:
                    dead.append(ws)
            for ws in dead:
                clients.discard(ws)

    @app.get("/healthz")
    async def healthz():
        frame = session.latest_frame()
        return {
            "status": "ok",
            "cycles": session.cycles,
            "overruns": session.overruns,
            "t_sim": None if frame is None else frame["t_sim"],
        }

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        owner = id(ws)
        clients.add(ws)
        model = session.run.loop.model
        hello = {
            "type": "hello",
            "seq": 0,
            "t_sim": session.run.loop.t,
            "protocol": "tankbarrier-v1",
            "scenario": scenario.name,
            "dt_s": scenario.dt_s,
            "broadcast_interval_s": broadcast_interval_s,
            "robot": scenario.robot_spec,
            "tank_floor_j": session.run.loop.tank.floor_j,
            "task_names": [task.name for task in session.run.loop.tasks],
            "d_min_m": next(
                (s["d_min_m"] for s in scenario.task_specs if s["type"] == "obstacle"),
                None,
            ),
            "activation_distance_m": scenario.admittance_spec.get(
                "potential", {}
            ).get("activation_distance_m"),
            "n_joints": model.n,
            "task_dim": model.m,
        }
        await ws.send_text(json.dumps(hello))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    message = json.loads(raw)
                    session.handle_command(message, owner)
                except (ValueError, TypeError) as exc:
                    frame = session.latest_frame()
                    await ws.send_text(
                        json.dumps(
                            {
                                "type": "error",
                                "seq": 0 if frame is None else frame["seq"],
                                "t_sim": 0.0 if frame is None else frame["t_sim"],
                                "error": str(exc),
                            }
                        )
                    )
        except WebSocketDisconnect:
            pass
        finally:
            clients.discard(ws)
            session.client_dropped(owner)

    return app
