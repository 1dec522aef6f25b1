"""Controller timing benchmark: n = 6 spatial arm, 8 constraint rows.

Measures wall time of the per-cycle control computation (task evaluation,
QP assembly, solve) under a moving force/obstacle pattern that keeps the
working set changing, i.e. realistic warm-start behavior. The 2 ms cycle
period is the real-time budget.
"""

import time

import numpy as np

from .barriers import JointLimitTask, ObstacleAvoidanceTask, PositionGoalTask
from .controller import ControllerConfig, compute_control
from .kinematics import SpatialArm
from .tank import init_tank, tank_step

__all__ = ["bench_model", "run_bench"]


def bench_model():
    """Six-revolute spatial chain at roughly collaborative-arm scale."""
    axes = [
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
    ]
    offsets = [
        [0.0, 0.0, 0.18],
        [0.0, 0.0, 0.61],
        [0.0, 0.0, 0.57],
        [0.0, 0.17, 0.0],
        [0.0, 0.0, 0.12],
        [0.0, 0.12, 0.0],
    ]
    limits = np.full(6, 2.9)
    return SpatialArm(axes, offsets, -limits, limits)


def run_bench(cycles=2000, warmup=100):
    """Run the benchmark and return timing statistics in milliseconds."""
    model = bench_model()
    q = np.array([0.3, -0.9, 1.2, -0.4, 0.5, 0.2])
    x = model.forward_kinematics(q)
    config = ControllerConfig()
    tank = init_tank(5.0, 0.1)
    obstacle = ObstacleAvoidanceTask(
        gain=10.0,
        d_min_m=0.25,
        x_obs=x + np.array([0.4, 0.0, 0.0]),
        xdot_obs=np.zeros(3),
    )
    goal = PositionGoalTask(
        gain=5.0, x_goal=x + np.array([-0.2, 0.3, 0.1]), xdot_goal=np.zeros(3)
    )
    tasks = [obstacle, goal] + [
        JointLimitTask(
            gain=1.0,
            joint_index=i,
            q_lo=float(model.q_min[i]),
            q_hi=float(model.q_max[i]),
        )
        for i in range(model.n)
    ]

    times = []
    iterations = []
    previous = None
    dt = config.dt_s
    for k in range(warmup + cycles):
        phase = 0.8 * k * dt
        f_ext = np.array([2.0 * np.cos(phase), 2.0 * np.sin(phase), 0.5])
        xdot_a = np.array([0.1 * np.sin(phase), 0.1 * np.cos(phase), 0.02])
        obstacle.x_obs = x + np.array([0.35 * np.cos(phase / 2), 0.1, 0.0])
        obstacle.xdot_obs = np.array([-0.17 * np.sin(phase / 2), 0.0, 0.0])
        t0 = time.perf_counter()
        out = compute_control(
            model, q, f_ext, xdot_a, tank, tasks, config, previous_active_set=previous
        )
        elapsed = time.perf_counter() - t0
        previous = out.active_set
        tank = tank_step(tank, f_ext, out.xdot_opt, dt)
        q = q + out.qdot * dt
        x = model.forward_kinematics(q)
        if k >= warmup:
            times.append(elapsed)
            iterations.append(out.iterations)

    times_ms = sorted(t * 1e3 for t in times)
    n = len(times_ms)
    return {
        "cycles": n,
        "n_joints": model.n,
        "constraint_rows": len(tasks),
        "median_ms": times_ms[n // 2],
        "p99_ms": times_ms[min(n - 1, int(0.99 * n))],
        "max_ms": times_ms[-1],
        "mean_ms": sum(times_ms) / n,
        "mean_qp_iterations": sum(iterations) / n,
        "max_qp_iterations": max(iterations),
        "budget_ms": 2.0,
    }
