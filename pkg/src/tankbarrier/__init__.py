"""Passivity-preserving variable admittance control with barrier constraints.

The per-cycle controller tracks a virtual admittance under a hard
energy-tank budget and slacked barrier-task constraints, all inside one
strictly convex QP; a scenario harness and a live WebSocket service
drive it scripted or interactively.
"""

from .admittance import (
    AdmittanceParams,
    AdmittanceState,
    RepulsivePotential,
    potential_energy,
    potential_gradient,
    step_admittance,
    storage_energy,
)
from .barriers import (
    BarrierEval,
    JointLimitTask,
    LinearConstraintRow,
    ObstacleAvoidanceTask,
    PositionGoalTask,
    eval_joint_limit,
    eval_obstacle,
    eval_position_goal,
    identity_alpha,
    lower_to_row,
    scaled_alpha,
)
from .controller import (
    ControlLoop,
    ControllerConfig,
    ControlOutput,
    compute_control,
    desired_joint_admittance,
    weighting_matrix,
)
from .harness import LogRecord, export_log, import_log, run_scenario, summarize
from .kinematics import (
    JointState,
    PlanarArm,
    SpatialArm,
    integrate_joints,
    pseudo_inverse,
)
from .qp import QPProblem, QPSolution, solve, warm_start
from .scenario import Scenario, ScenarioError, load_scenario, validate_scenario
from .tank import (
    TankDepletedError,
    TankState,
    best_passive_velocity,
    init_tank,
    modulation_vector,
    passivity_row,
    tank_step,
)

__version__ = "0.1.0"
