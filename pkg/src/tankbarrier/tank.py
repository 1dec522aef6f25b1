"""Energy tank: charge state, modulation, discrete bookkeeping, passivity row.

The tank budgets the energy the controller may emit through the
interaction port. Stored energy T is the primary state (the charge is
recovered as sqrt(2T)), the reserve floor is a hard lower bound enforced
by the controller QP, and the accumulated interaction integral is kept
exactly so the discrete balance T = T(0) + E_acc holds to the last bit.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TankState",
    "TankDepletedError",
    "init_tank",
    "modulation_vector",
    "tank_step",
    "passivity_row",
    "best_passive_velocity",
]

# Numerical grace below the floor before a contract violation is declared.
_FLOOR_SLOP = 1e-9


class TankDepletedError(RuntimeError):
    """Tank fell below its reserve floor: a controller contract violation."""


@dataclass
class TankState:
    """Stored energy (J), initial energy, accumulated port work, reserve floor."""

    energy_j: float
    initial_energy_j: float
    accumulated_j: float
    floor_j: float

    @property
    def charge(self):
        """Tank charge x_t = sqrt(2 T); well defined while T >= floor > 0."""
        return float(np.sqrt(2.0 * self.energy_j))


def init_tank(initial_energy_j, floor_j):
    """Create a tank with T(0) >= floor > 0 and zero accumulated work."""
    if floor_j <= 0:
        raise ValueError("tank floor must be positive")
    if initial_energy_j < floor_j:
        raise ValueError(
            f"initial tank energy {initial_energy_j} below floor {floor_j}"
        )
    return TankState(
        energy_j=float(initial_energy_j),
        initial_energy_j=float(initial_energy_j),
        accumulated_j=0.0,
        floor_j=float(floor_j),
    )


def modulation_vector(gamma, tank):
    """Port gain A = gamma / x_t reproducing gamma as the port output.

    Faults if the tank is at or below half its floor, where the
    modulation approaches its charge singularity; unreachable while the
    controller enforces the passivity constraint.
    """
    gamma = np.asarray(gamma, dtype=float)
    if tank.energy_j <= 0.5 * tank.floor_j:
        raise TankDepletedError(
            f"tank energy {tank.energy_j} J at/below the modulation guard "
            f"({0.5 * tank.floor_j} J)"
        )
    return gamma / tank.charge


def tank_step(tank, f_ext, xdot_des, dt):
    """Accumulate one step of port work: E_acc += dt * F_e . xdot_des.

    The floor must still hold afterwards; a dip below it (beyond 1e-9
    numerical slop) means the controller broke its contract and raises.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_ext = np.asarray(f_ext, dtype=float)
    xdot_des = np.asarray(xdot_des, dtype=float)
    increment = dt * float(f_ext @ xdot_des)
    accumulated = tank.accumulated_j + increment
    energy = tank.initial_energy_j + accumulated
    if energy < tank.floor_j - _FLOOR_SLOP:
        raise TankDepletedError(
            f"tank energy {energy} J fell below floor {tank.floor_j} J"
        )
    return TankState(
        energy_j=energy,
        initial_energy_j=tank.initial_energy_j,
        accumulated_j=accumulated,
        floor_j=tank.floor_j,
    )


def best_passive_velocity(tank, f_ext, xdot_a, dt):
    """Closest velocity to the admittance reference the tank can afford.

    Standalone tank-only optimization (no barrier rows): minimize
    ||xdot - xdot_a||^2 subject to dt * F_e . xdot >= -(T - floor).
    The feasible set is a half-space, so the answer is xdot_a itself or
    its orthogonal projection onto the budget boundary. The full
    controller QP subsumes this when no task rows are active.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_ext = np.asarray(f_ext, dtype=float)
    xdot_a = np.asarray(xdot_a, dtype=float)
    coeffs = dt * f_ext
    bound = -(tank.energy_j - tank.floor_j)
    slack = float(coeffs @ xdot_a) - bound
    if slack >= 0.0:
        return xdot_a.copy()
    gram = float(coeffs @ coeffs)
    if gram == 0.0:
        # zero force with T < floor cannot happen for a valid tank
        raise TankDepletedError("tank below floor with no interaction force")
    return xdot_a - (slack / gram) * coeffs


def passivity_row(tank, f_ext, J, dt):
    """Linearized tank-floor constraint over joint velocities.

    One control step must not extract more than the margin above the
    floor: dt * (J^T F_e) . qdot >= -(T - floor). Returns (coefficients,
    bound) with the row read as coefficients . qdot >= bound.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_ext = np.asarray(f_ext, dtype=float)
    J = np.asarray(J, dtype=float)
    coefficients = dt * (J.T @ f_ext)
    bound = -(tank.energy_j - tank.floor_j)
    return coefficients, bound
