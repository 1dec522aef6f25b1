"""Kinematics of velocity-controlled revolute serial arms.

Two chain flavors share one interface: a planar n-link arm (analytic
closed forms, the canonical test model) and a generic spatial chain with
a position-only task map (axis/offset joints, UR-class n=6).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlanarArm",
    "SpatialArm",
    "JointState",
    "pseudo_inverse",
    "integrate_joints",
]


@dataclass
class JointState:
    """Joint positions plus the last commanded joint velocities."""

    q: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.u))):
            raise ValueError("joint state entries must be finite")


class _SerialArm:
    """Shared joint-limit bookkeeping and input validation."""

    m: int  # task-space dimension, set by subclasses

    def __init__(self, q_min, q_max):
        self.q_min = np.asarray(q_min, dtype=float)
        self.q_max = np.asarray(q_max, dtype=float)
        if self.q_min.shape != (self.n,) or self.q_max.shape != (self.n,):
            raise ValueError("joint limits must have one entry per joint")
        if not np.all(self.q_min < self.q_max):
            raise ValueError("each lower joint limit must be below the upper one")

    def _check_q(self, q):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise ValueError(f"expected {self.n} joint values, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("joint vector must be finite")
        return q

    def forward_kinematics(self, q):
        """End-effector Cartesian position for joint vector q."""
        return self._position(self._check_q(q))

    def jacobian(self, q):
        """m x n position Jacobian at q."""
        return self._jacobian(self._check_q(q))


class PlanarArm(_SerialArm):
    """Planar revolute chain described by its link lengths (m = 2)."""

    m = 2

    def __init__(self, link_lengths_m, q_min, q_max):
        self.link_lengths_m = np.asarray(link_lengths_m, dtype=float)
        if self.link_lengths_m.ndim != 1 or self.link_lengths_m.size < 1:
            raise ValueError("need at least one link length")
        if np.any(self.link_lengths_m <= 0):
            raise ValueError("link lengths must be positive")
        self.n = self.link_lengths_m.size
        super().__init__(q_min, q_max)

    def _position(self, q):
        angles = np.cumsum(q)
        x = float(np.dot(self.link_lengths_m, np.cos(angles)))
        y = float(np.dot(self.link_lengths_m, np.sin(angles)))
        return np.array([x, y])

    def _jacobian(self, q):
        angles = np.cumsum(q)
        lsin = self.link_lengths_m * np.sin(angles)
        lcos = self.link_lengths_m * np.cos(angles)
        # column j sums contributions of links j..n-1 (reverse cumulative sum)
        J = np.empty((2, self.n))
        J[0] = -np.cumsum(lsin[::-1])[::-1]
        J[1] = np.cumsum(lcos[::-1])[::-1]
        return J


def _axis_rotation(axis, angle):
    """Rodrigues rotation matrix about a unit axis."""
    x, y, z = axis
    c, s = np.cos(angle), np.sin(angle)
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


class SpatialArm(_SerialArm):
    """Spatial revolute chain: per-joint rotation axis and link offset (m = 3).

    Joint i rotates about ``axes[i]`` (expressed in the frame reached so
    far); the link then translates by ``offsets_m[i]`` in the rotated
    frame. The task map is the end-effector position only.
    """

    m = 3

    def __init__(self, axes, offsets_m, q_min, q_max):
        self.axes = np.asarray(axes, dtype=float)
        self.offsets_m = np.asarray(offsets_m, dtype=float)
        if self.axes.ndim != 2 or self.axes.shape[1] != 3:
            raise ValueError("axes must be an (n, 3) array")
        if self.offsets_m.shape != self.axes.shape:
            raise ValueError("offsets must match axes shape")
        norms = np.linalg.norm(self.axes, axis=1)
        if np.any(norms < 1e-12):
            raise ValueError("joint axes must be nonzero")
        self.axes = self.axes / norms[:, None]
        self.n = self.axes.shape[0]
        super().__init__(q_min, q_max)

    def _frames(self, q):
        """World rotation before each joint, joint origins, and EE position."""
        R = np.eye(3)
        p = np.zeros(3)
        rotations = []
        origins = []
        for i in range(self.n):
            rotations.append(R)
            origins.append(p)
            R = R @ _axis_rotation(self.axes[i], q[i])
            p = p + R @ self.offsets_m[i]
        return rotations, origins, p

    def _position(self, q):
        return self._frames(q)[2]

    def _jacobian(self, q):
        rotations, origins, p_ee = self._frames(q)
        J = np.empty((3, self.n))
        for i in range(self.n):
            z_i = rotations[i] @ self.axes[i]
            J[:, i] = np.cross(z_i, p_ee - origins[i])
        return J


def pseudo_inverse(J, damping=0.0):
    """Damped least-squares inverse J^T (J J^T + damping^2 I)^-1.

    With damping 0 this is the exact Moore-Penrose pseudo-inverse and a
    rank-deficient J raises, since the bare inverse is meaningless there;
    callers near singularities must pass damping > 0.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2:
        raise ValueError("J must be a matrix")
    if not np.all(np.isfinite(J)):
        raise ValueError("J must be finite")
    if damping < 0:
        raise ValueError("damping must be non-negative")
    if damping == 0.0:
        u, s, vt = np.linalg.svd(J, full_matrices=False)
        if s.size == 0 or s[0] == 0.0 or s[-1] < 1e-12 * s[0]:
            raise np.linalg.LinAlgError(
                "rank-deficient Jacobian with zero damping; use damping > 0"
            )
        return (vt.T / s) @ u.T
    m = J.shape[0]
    gram = J @ J.T + (damping * damping) * np.eye(m)
    return np.linalg.solve(gram, J).T


def integrate_joints(model, state, u, dt):
    """Explicit Euler joint update: q' = q + u * dt, with u recorded."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    u = np.asarray(u, dtype=float)
    if u.shape != (model.n,):
        raise ValueError(f"expected {model.n} joint velocities, got shape {u.shape}")
    return JointState(q=state.q + u * dt, u=u.copy())
