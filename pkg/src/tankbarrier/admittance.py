"""Virtual mass-damper admittance with an optional repulsive potential.

The admittance maps measured external force to a desired task-space
velocity. Inertia and damping are diagonal and may be switched between
integration steps; the repulsive potential is centered on a (possibly
moving) obstacle and activates inside a configurable distance.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RepulsivePotential",
    "AdmittanceParams",
    "AdmittanceState",
    "potential_gradient",
    "potential_energy",
    "step_admittance",
    "storage_energy",
]

# Eq-of-motion distance clamp: the repulsion law is singular at d = 0.
_D_CLAMP = 1e-6


@dataclass
class RepulsivePotential:
    """Obstacle-centered repulsion: gain, activation distance, obstacle position."""

    gain_nm2: float
    activation_distance_m: float
    x_obs: np.ndarray

    def __post_init__(self):
        if self.activation_distance_m <= 0:
            raise ValueError("activation distance must be positive")
        if self.gain_nm2 < 0:
            raise ValueError("repulsion gain must be non-negative")
        self.x_obs = np.asarray(self.x_obs, dtype=float)


@dataclass
class AdmittanceParams:
    """Diagonal inertia/damping (switchable between steps) and optional potential."""

    inertia_kg: np.ndarray
    damping_ns_per_m: np.ndarray
    potential: RepulsivePotential | None = None

    def __post_init__(self):
        self.inertia_kg = np.asarray(self.inertia_kg, dtype=float)
        self.damping_ns_per_m = np.asarray(self.damping_ns_per_m, dtype=float)
        if self.inertia_kg.shape != self.damping_ns_per_m.shape:
            raise ValueError("inertia and damping must have matching shapes")
        if np.any(self.inertia_kg <= 0):
            raise ValueError("inertia entries must be strictly positive")
        if np.any(self.damping_ns_per_m < 0):
            raise ValueError("damping entries must be non-negative")


@dataclass
class AdmittanceState:
    """Virtual pose and velocity of the admittance."""

    x_a: np.ndarray
    xdot_a: np.ndarray

    def __post_init__(self):
        self.x_a = np.asarray(self.x_a, dtype=float)
        self.xdot_a = np.asarray(self.xdot_a, dtype=float)
        if not (np.all(np.isfinite(self.x_a)) and np.all(np.isfinite(self.xdot_a))):
            raise ValueError("admittance state must be finite")


def potential_gradient(pot, p):
    """Repulsive force at position p: pushes away from the obstacle.

    gain * (1/d - 1/D) * (p - x_obs) / d^3 inside the activation distance
    D, zero outside. The distance is clamped below at 1e-6 m.
    """
    p = np.asarray(p, dtype=float)
    offset = p - pot.x_obs
    d = max(float(np.linalg.norm(offset)), _D_CLAMP)
    dstar = pot.activation_distance_m
    if d >= dstar:
        return np.zeros_like(offset)
    return pot.gain_nm2 * (1.0 / d - 1.0 / dstar) * offset / d**3


def potential_energy(pot, p):
    """Scalar field 0.5 * gain * (1/d - 1/D)^2 whose negative gradient is
    the repulsive force; zero at and beyond the activation distance."""
    p = np.asarray(p, dtype=float)
    d = max(float(np.linalg.norm(p - pot.x_obs)), _D_CLAMP)
    dstar = pot.activation_distance_m
    if d >= dstar:
        return 0.0
    return 0.5 * pot.gain_nm2 * (1.0 / d - 1.0 / dstar) ** 2


def step_admittance(params, state, f_ext, dt):
    """One semi-implicit Euler step of the admittance dynamics.

    Acceleration is M^-1 (F_e - D xdot + F_rep) where F_rep is the
    repulsive force at the current virtual pose; velocity updates first,
    the pose then integrates the updated velocity. Returns the new state
    and the updated velocity.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_ext = np.asarray(f_ext, dtype=float)
    if f_ext.shape != state.xdot_a.shape:
        raise ValueError("force dimension must match the admittance state")
    force = f_ext - params.damping_ns_per_m * state.xdot_a
    if params.potential is not None:
        force = force + potential_gradient(params.potential, state.x_a)
    xdot = state.xdot_a + (force / params.inertia_kg) * dt
    x = state.x_a + xdot * dt
    new_state = AdmittanceState(x_a=x, xdot_a=xdot)
    return new_state, xdot


def storage_energy(params, state, pot=None):
    """Stored energy: potential at the virtual pose plus kinetic term."""
    kinetic = 0.5 * float(state.xdot_a @ (params.inertia_kg * state.xdot_a))
    if pot is None:
        pot = params.potential
    if pot is None:
        return kinetic
    return kinetic + potential_energy(pot, state.x_a)
