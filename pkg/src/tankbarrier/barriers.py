"""Barrier-encoded tasks and their reduction to linear QP constraint rows.

Three task families: keep the end-effector clear of a (moving) obstacle,
keep each joint inside its limits, drive the end-effector to a (moving)
goal. Each evaluates to a scalar h with gradients, then lowers to one
inequality row a . qdot + slack >= b of the controller QP.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "identity_alpha",
    "scaled_alpha",
    "BarrierEval",
    "LinearConstraintRow",
    "eval_obstacle",
    "eval_joint_limit",
    "eval_position_goal",
    "lower_to_row",
    "ObstacleAvoidanceTask",
    "JointLimitTask",
    "PositionGoalTask",
]


def identity_alpha(h):
    """Default barrier decay shaping: alpha(h) = h."""
    return h


def scaled_alpha(k):
    """Linear class-K alternative alpha(h) = k * h, k > 0."""
    if k <= 0:
        raise ValueError("alpha scale must be positive")
    return lambda h: k * h


@dataclass
class BarrierEval:
    """One task evaluation: value, time derivative, and its gradient.

    Task-space tasks carry grad_x; joint-space tasks carry the joint
    index and the scalar derivative dh_dq instead.
    """

    h: float
    dh_dt: float = 0.0
    grad_x: np.ndarray | None = None
    joint_index: int | None = None
    dh_dq: float = 0.0


@dataclass
class LinearConstraintRow:
    """Inequality a_qdot . qdot + slack >= bound (slack_index None = hard row)."""

    a_qdot: np.ndarray
    bound: float
    slack_index: int | None = None

    def __post_init__(self):
        self.a_qdot = np.asarray(self.a_qdot, dtype=float)
        if not np.all(np.isfinite(self.a_qdot)) or not np.isfinite(self.bound):
            raise ValueError("constraint row must be finite")


def eval_obstacle(x, xdot_obs, x_obs, d_min, gain):
    """Obstacle clearance barrier h = gain * (d^2 - d_min^2), d Euclidean.

    Non-negative exactly when the end-effector is at least d_min from the
    obstacle. Returns (h, grad_x, dh_dt).
    """
    x = np.asarray(x, dtype=float)
    x_obs = np.asarray(x_obs, dtype=float)
    xdot_obs = np.asarray(xdot_obs, dtype=float)
    offset = x - x_obs
    h = gain * (float(offset @ offset) - d_min * d_min)
    grad_x = 2.0 * gain * offset
    dh_dt = -2.0 * gain * float(offset @ xdot_obs)
    return h, grad_x, dh_dt


def eval_joint_limit(q_i, q_lo, q_hi, gain):
    """Joint-range barrier gain * (q_hi - q)(q - q_lo)/(q_hi - q_lo).

    Non-negative exactly when q_i lies within [q_lo, q_hi]. Returns
    (h, dh_dq).
    """
    if q_lo >= q_hi:
        raise ValueError("lower joint limit must be below the upper one")
    span = q_hi - q_lo
    h = gain * (q_hi - q_i) * (q_i - q_lo) / span
    dh_dq = gain * (q_hi + q_lo - 2.0 * q_i) / span
    return h, dh_dq


def eval_position_goal(x, x_goal, xdot_goal, gain):
    """Goal-tracking barrier h = -gain * ||x - x_goal||^2, zero only at the goal.

    Returns (h, grad_x, dh_dt).
    """
    x = np.asarray(x, dtype=float)
    x_goal = np.asarray(x_goal, dtype=float)
    xdot_goal = np.asarray(xdot_goal, dtype=float)
    offset = x - x_goal
    h = -gain * float(offset @ offset)
    grad_x = -2.0 * gain * offset
    dh_dt = 2.0 * gain * float(offset @ xdot_goal)
    return h, grad_x, dh_dt


def lower_to_row(evaluation, J, alpha=identity_alpha, slack_index=None):
    """Lower a barrier evaluation to a_qdot . qdot + slack >= bound.

    Task-space gradients chain through the Jacobian; joint-space tasks
    touch their single joint directly. bound = -dh_dt - alpha(h).
    """
    bound = -evaluation.dh_dt - alpha(evaluation.h)
    if evaluation.joint_index is not None:
        n = np.asarray(J).shape[1]
        a = np.zeros(n)
        a[evaluation.joint_index] = evaluation.dh_dq
    else:
        if evaluation.grad_x is None:
            raise ValueError("task-space evaluation is missing its gradient")
        a = np.asarray(J).T @ evaluation.grad_x
    return LinearConstraintRow(a_qdot=a, bound=bound, slack_index=slack_index)


@dataclass
class ObstacleAvoidanceTask:
    """Keep the end-effector at least d_min from a tracked obstacle."""

    gain: float
    d_min_m: float
    x_obs: np.ndarray
    xdot_obs: np.ndarray
    use_slack: bool = True
    alpha: callable = identity_alpha
    name: str = "obstacle"

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("barrier gain must be positive")
        if self.d_min_m <= 0:
            raise ValueError("minimum distance must be positive")
        self.x_obs = np.asarray(self.x_obs, dtype=float)
        self.xdot_obs = np.asarray(self.xdot_obs, dtype=float)

    def evaluate(self, q, x):
        h, grad_x, dh_dt = eval_obstacle(
            x, self.xdot_obs, self.x_obs, self.d_min_m, self.gain
        )
        return BarrierEval(h=h, dh_dt=dh_dt, grad_x=grad_x)


@dataclass
class JointLimitTask:
    """Keep one joint inside its configured range."""

    gain: float
    joint_index: int
    q_lo: float
    q_hi: float
    use_slack: bool = True
    alpha: callable = identity_alpha
    name: str = ""

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("barrier gain must be positive")
        if self.joint_index < 0:
            raise ValueError("joint index must be non-negative")
        if self.q_lo >= self.q_hi:
            raise ValueError("lower joint limit must be below the upper one")
        if not self.name:
            self.name = f"joint_limit_{self.joint_index}"

    def evaluate(self, q, x):
        h, dh_dq = eval_joint_limit(
            float(q[self.joint_index]), self.q_lo, self.q_hi, self.gain
        )
        return BarrierEval(h=h, joint_index=self.joint_index, dh_dq=dh_dq)


@dataclass
class PositionGoalTask:
    """Drive the end-effector toward a tracked goal position."""

    gain: float
    x_goal: np.ndarray
    xdot_goal: np.ndarray
    use_slack: bool = True
    alpha: callable = identity_alpha
    name: str = "position_goal"

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("barrier gain must be positive")
        self.x_goal = np.asarray(self.x_goal, dtype=float)
        self.xdot_goal = np.asarray(self.xdot_goal, dtype=float)

    def evaluate(self, q, x):
        h, grad_x, dh_dt = eval_position_goal(
            x, self.x_goal, self.xdot_goal, self.gain
        )
        return BarrierEval(h=h, dh_dt=dh_dt, grad_x=grad_x)
