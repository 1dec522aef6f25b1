"""Per-cycle controller: merged QP over joint velocities and slacks.

Each control cycle packs the admittance-tracking objective, one slacked
inequality row per barrier task, and the hard tank-floor row into a
single strictly convex QP. The solution's task-space velocity modulates
the energy tank, so the passivity budget and the bookkeeping stay
mutually consistent.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import qp
from .admittance import step_admittance
from .barriers import identity_alpha, lower_to_row
from .kinematics import integrate_joints, pseudo_inverse
from .tank import modulation_vector, passivity_row, tank_step

__all__ = [
    "ControllerConfig",
    "ControlOutput",
    "weighting_matrix",
    "desired_joint_admittance",
    "compute_control",
    "ControlLoop",
]


@dataclass
class ControllerConfig:
    """Controller gains, cycle period, and solver settings."""

    force_weight_gain: float = 10.0  # kappa, 1/N^2
    slack_weight: float = 100.0  # quadratic penalty on constraint slacks
    dt_s: float = 0.002
    jacobian_damping: float = 1e-4
    alpha: callable = identity_alpha
    qp_tol: float = 1e-8
    qp_max_iter: int = 200

    def __post_init__(self):
        if self.dt_s <= 0:
            raise ValueError("cycle period must be positive")
        if self.slack_weight <= 0:
            raise ValueError("slack weight must be strictly positive")
        if self.force_weight_gain < 0:
            raise ValueError("force weighting gain must be non-negative")
        if self.jacobian_damping < 0:
            raise ValueError("jacobian damping must be non-negative")


@dataclass
class ControlOutput:
    """QP solution of one cycle plus the diagnostics worth logging."""

    qdot: np.ndarray
    slack: np.ndarray
    xdot_opt: np.ndarray
    task_h: list
    task_slack: list
    fault: str | None
    objective: float
    iterations: int
    active_set: list
    solve_time_s: float
    kkt: dict


def weighting_matrix(f_ext, kappa, dim):
    """Force-dependent metric (1 + kappa * ||F_e||^2) * I."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    f_ext = np.asarray(f_ext, dtype=float)
    return (1.0 + kappa * float(f_ext @ f_ext)) * np.eye(dim)


def desired_joint_admittance(J, xdot_a, damping=0.0):
    """Admittance velocity mapped into joint space via the damped inverse."""
    return pseudo_inverse(J, damping) @ np.asarray(xdot_a, dtype=float)


def compute_control(
    model,
    q,
    f_ext,
    xdot_a,
    tank_state,
    tasks,
    config,
    x=None,
    include_passivity_row=True,
    previous_active_set=None,
):
    """Assemble and solve the merged per-cycle QP.

    Decision variables are (qdot, slacks); every slacked task contributes
    one relaxed inequality row, the tank-floor row is hard. On a
    non-optimal solve the command falls back to zero velocity (passive
    for a velocity-controlled robot) with a fault flag set.
    """
    q = np.asarray(q, dtype=float)
    f_ext = np.asarray(f_ext, dtype=float)
    xdot_a = np.asarray(xdot_a, dtype=float)
    if x is None:
        x = model.forward_kinematics(q)
    J = model.jacobian(q)
    n = model.n

    evaluations = [task.evaluate(q, x) for task in tasks]
    slack_count = sum(1 for task in tasks if task.use_slack)
    rows = []
    slack_index = 0
    for task, ev in zip(tasks, evaluations):
        idx = None
        if task.use_slack:
            idx = slack_index
            slack_index += 1
        rows.append(lower_to_row(ev, J, task.alpha, idx))

    n_vars = n + slack_count
    weight = 1.0 + config.force_weight_gain * float(f_ext @ f_ext)
    diag = np.concatenate(
        [np.full(n, 2.0 * weight), np.full(slack_count, 2.0 * config.slack_weight)]
    )
    Q = np.diag(diag)
    qdot_a = desired_joint_admittance(J, xdot_a, config.jacobian_damping)
    c = np.concatenate([-2.0 * weight * qdot_a, np.zeros(slack_count)])

    n_rows = len(rows) + (1 if include_passivity_row else 0)
    G = np.zeros((n_rows, n_vars))
    b = np.zeros(n_rows)
    for i, row in enumerate(rows):
        G[i, :n] = row.a_qdot
        if row.slack_index is not None:
            G[i, n + row.slack_index] = 1.0
        b[i] = row.bound
    if include_passivity_row:
        coeffs, bound = passivity_row(tank_state, f_ext, J, config.dt_s)
        G[-1, :n] = coeffs
        b[-1] = bound

    problem = qp.QPProblem(Q=Q, c=c, G=G, b=b)
    solution = qp.warm_start(
        problem,
        previous_active_set,
        tol=config.qp_tol,
        max_iter=config.qp_max_iter,
    )

    fault = None
    if solution.status != "optimal":
        fault = f"solver_{solution.status}"
        qdot = np.zeros(n)
        slack = np.zeros(slack_count)
    else:
        qdot = solution.z[:n]
        slack = solution.z[n:]
        if include_passivity_row:
            margin = float(G[-1, :n] @ qdot) - b[-1]
            if margin < -1e-9:
                fault = "passivity_row_violated"
                qdot = np.zeros(n)
                slack = np.zeros(slack_count)

    task_slack = []
    slack_index = 0
    for task in tasks:
        if task.use_slack:
            task_slack.append(float(slack[slack_index]))
            slack_index += 1
        else:
            task_slack.append(0.0)

    return ControlOutput(
        qdot=qdot,
        slack=slack,
        xdot_opt=J @ qdot,
        task_h=[ev.h for ev in evaluations],
        task_slack=task_slack,
        fault=fault,
        objective=solution.objective,
        iterations=solution.iterations,
        active_set=solution.active_set,
        solve_time_s=solution.solve_time_s,
        kkt=solution.kkt,
    )


@dataclass
class CycleResult:
    """Everything one control cycle produced, for logging."""

    t: float
    joint_state: object
    x: np.ndarray
    f_ext: np.ndarray
    xdot_a: np.ndarray
    output: ControlOutput
    tank: object
    control_time_s: float
    qdot_alt: np.ndarray | None = None  # same cycle solved without the tank row


class ControlLoop:
    """Owns the per-cycle pipeline: admittance, QP, tank, joint integration.

    Strictly sequential and single-owner; callers feed the external force
    (and mutate task targets / admittance parameters) between cycles.
    """

    def __init__(
        self,
        model,
        joint_state,
        admittance_params,
        admittance_state,
        tank_state,
        tasks,
        config,
    ):
        self.model = model
        self.joint_state = joint_state
        self.admittance_params = admittance_params
        self.admittance_state = admittance_state
        self.tank = tank_state
        self.tasks = tasks
        self.config = config
        self.t = 0.0
        self._previous_active_set = None

    def cycle(self, f_ext, include_passivity_row=True, compare_without_passivity=False):
        """Run one fixed-step control cycle and return its record.

        With compare_without_passivity the same cycle state is also
        solved with the tank row removed (the commanded motion still
        comes from the full problem); the alternative command lands in
        the result for equivalence checks on free-motion segments.
        """
        t_start = time.perf_counter()
        f_ext = np.asarray(f_ext, dtype=float)
        dt = self.config.dt_s

        self.admittance_state, xdot_a = step_admittance(
            self.admittance_params, self.admittance_state, f_ext, dt
        )
        q = self.joint_state.q
        x = self.model.forward_kinematics(q)
        output = compute_control(
            self.model,
            q,
            f_ext,
            xdot_a,
            self.tank,
            self.tasks,
            self.config,
            x=x,
            include_passivity_row=include_passivity_row,
            previous_active_set=self._previous_active_set,
        )
        qdot_alt = None
        if compare_without_passivity:
            qdot_alt = compute_control(
                self.model,
                q,
                f_ext,
                xdot_a,
                self.tank,
                self.tasks,
                self.config,
                x=x,
                include_passivity_row=False,
            ).qdot
        self._previous_active_set = output.active_set
        # Tank port gain for the commanded velocity; also trips the
        # depletion guard if the floor contract ever broke upstream.
        modulation_vector(output.xdot_opt, self.tank)
        self.tank = tank_step(self.tank, f_ext, output.xdot_opt, dt)
        self.joint_state = integrate_joints(
            self.model, self.joint_state, output.qdot, dt
        )
        record = CycleResult(
            t=self.t,
            joint_state=self.joint_state,
            x=x,
            f_ext=f_ext,
            xdot_a=xdot_a,
            output=output,
            tank=self.tank,
            control_time_s=time.perf_counter() - t_start,
            qdot_alt=qdot_alt,
        )
        self.t += dt
        return record
