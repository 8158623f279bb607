"""Joint-level muscle fatigue simulator for repetitive push/pull arm tasks.

A planar shoulder+elbow arm tracks a horizontal back-and-forth hand
trajectory against phase-dependent process forces.  Posture-dependent
maximal joint torques decay exponentially with the accumulated ratio of
demanded to available torque, and the simulator reports when the available
torque first falls to the task's demand (the risk crossing).
"""

from .capacity import (
    CapacityCoefficients,
    CapacityRow,
    joint_capacity,
    phase_capacity,
)
from .dynamics import (
    ArmInertialModel,
    LoadSpec,
    SegmentParams,
    derive_anthropometry,
    external_joint_torque,
    inverse_dynamics,
    make_arm_geometry,
    total_joint_torque,
)
from .fatigue import (
    GROUPS,
    CycleProfile,
    CycleSchedule,
    FatigueTrace,
    MuscleGroupState,
    build_cycle_profile,
    cycle_exponent_increments,
    detect_risk_crossing,
    fatigue_at,
    phase_clock,
    simulate,
    simulate_static_mode,
)
from .kinematics import (
    ArmGeometry,
    CartesianState,
    JointState,
    TrajectoryLeg,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    joint_trajectory,
    sample_task_trajectory,
)
from .scenario import (
    RunResult,
    Scenario,
    SweepGrid,
    load_grid,
    load_scenario,
    load_scenario_file,
    run,
    serialize_scenario,
    sweep,
    write_sweep_csv,
    write_trace_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ArmGeometry",
    "ArmInertialModel",
    "CapacityCoefficients",
    "CapacityRow",
    "CartesianState",
    "CycleProfile",
    "CycleSchedule",
    "FatigueTrace",
    "GROUPS",
    "JointState",
    "LoadSpec",
    "MuscleGroupState",
    "RunResult",
    "Scenario",
    "SegmentParams",
    "SweepGrid",
    "TrajectoryLeg",
    "build_cycle_profile",
    "cycle_exponent_increments",
    "derive_anthropometry",
    "detect_risk_crossing",
    "external_joint_torque",
    "fatigue_at",
    "forward_kinematics",
    "inverse_dynamics",
    "inverse_kinematics",
    "jacobian",
    "joint_capacity",
    "joint_trajectory",
    "load_grid",
    "load_scenario",
    "load_scenario_file",
    "make_arm_geometry",
    "phase_capacity",
    "phase_clock",
    "run",
    "sample_task_trajectory",
    "serialize_scenario",
    "simulate",
    "simulate_static_mode",
    "sweep",
    "total_joint_torque",
    "write_sweep_csv",
    "write_trace_csv",
]
