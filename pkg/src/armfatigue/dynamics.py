"""Inertial arm model and inverse dynamics of the planar two-link chain.

The chain is upper arm (shoulder to elbow) plus forearm-hand (elbow to hand)
with an optional point tool mass at the hand.  Equations of motion follow
the standard manipulator form

    Gamma = M(theta) ddtheta + C(theta, dtheta) dtheta + G(theta)

in the generalized coordinates (theta_s, theta_e) of
:mod:`armfatigue.kinematics`.  C is built from Christoffel symbols, so
Mdot - 2C is skew symmetric along any trajectory.

Sign conventions
----------------
* Positive torque drives the coordinate positive: shoulder flexion
  (forward) and elbow flexion.
* ``external_joint_torque`` maps a force vector applied *to the hand* into
  joint torques through the Jacobian transpose: Gamma_ext = J^T f.  The
  equal-magnitude muscle effort needed to hold the posture against that
  force has the same magnitude per joint, so the fatigue pipeline consumes
  |Gamma| regardless of which side of the contact the caller describes.
  Which hand-force vector a task phase feeds this map is a scenario policy
  (``load_convention``), documented in :mod:`armfatigue.fatigue`.

Default segment parameters come from published body-segment regression
fractions of stature and body mass; all of them can be overridden per
scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import OutOfRangeAnthropometry
from .kinematics import ArmGeometry, JointState, jacobian

GRAVITY = 9.81  # [m/s^2]

# Body-segment regression fractions (upper arm, forearm+hand):
#   segment length as a fraction of stature,
#   segment mass as a fraction of body mass,
#   COM distance from the proximal joint as a fraction of segment length,
#   radius of gyration about the COM as a fraction of segment length.
LENGTH_FRACTIONS = (0.186, 0.254)
MASS_FRACTIONS = (0.028, 0.022)
COM_FRACTIONS = (0.436, 0.682)
GYRATION_FRACTIONS = (0.322, 0.468)

STATURE_RANGE = (1.0, 2.5)  # [m]
BODY_MASS_RANGE = (30.0, 200.0)  # [kg]


@dataclass(frozen=True)
class SegmentParams:
    """One rigid segment: mass, COM offset and rotational inertia."""

    mass: float  # [kg]
    com_distance: float  # [m] from the proximal joint
    inertia_com: float  # [kg m^2] about the COM, lateral axis
    length: float  # [m]

    def __post_init__(self):
        if min(self.mass, self.com_distance, self.inertia_com, self.length) <= 0.0:
            raise ValueError("segment parameters must be strictly positive")
        if self.com_distance > self.length:
            raise ValueError("com_distance must not exceed segment length")


@dataclass(frozen=True)
class ArmInertialModel:
    """Inertial parameters of the arm plus a point tool mass at the hand."""

    upper_arm: SegmentParams
    forearm_hand: SegmentParams
    tool_mass: float = 0.0  # [kg]
    gravity: float = GRAVITY  # [m/s^2]

    def __post_init__(self):
        if self.tool_mass < 0.0:
            raise ValueError("tool_mass must be non-negative")

    def with_tool(self, tool_mass: float) -> "ArmInertialModel":
        return replace(self, tool_mass=tool_mass)


@dataclass(frozen=True)
class LoadSpec:
    """Horizontal process-force magnitudes of the task.

    The hand exerts ``push_force`` along +x (away from the body) while
    pushing and ``pull_force`` along -x while pulling.
    """

    push_force: float  # [N]
    pull_force: float  # [N]

    def __post_init__(self):
        if self.push_force < 0.0 or self.pull_force < 0.0:
            raise ValueError("force magnitudes must be non-negative")


def derive_anthropometry(
    stature: float, body_mass: float, tool_mass: float = 0.0
) -> ArmInertialModel:
    """Segment parameters from stature [m] and body mass [kg] regressions."""
    if not (STATURE_RANGE[0] <= stature <= STATURE_RANGE[1]):
        raise OutOfRangeAnthropometry(f"stature {stature} m outside {STATURE_RANGE}")
    if not (BODY_MASS_RANGE[0] <= body_mass <= BODY_MASS_RANGE[1]):
        raise OutOfRangeAnthropometry(f"body mass {body_mass} kg outside {BODY_MASS_RANGE}")

    segments = []
    for i in range(2):
        length = LENGTH_FRACTIONS[i] * stature
        mass = MASS_FRACTIONS[i] * body_mass
        r_gyr = GYRATION_FRACTIONS[i] * length
        segments.append(
            SegmentParams(
                mass=mass,
                com_distance=COM_FRACTIONS[i] * length,
                inertia_com=mass * r_gyr * r_gyr,
                length=length,
            )
        )
    return ArmInertialModel(
        upper_arm=segments[0], forearm_hand=segments[1], tool_mass=tool_mass
    )


def make_arm_geometry(
    model: ArmInertialModel, elbow_branch: str = "elbow_down"
) -> ArmGeometry:
    """Geometry consistent with the model's segment lengths."""
    return ArmGeometry(
        upper_arm_length=model.upper_arm.length,
        forearm_hand_length=model.forearm_hand.length,
        elbow_branch=elbow_branch,
    )


def _check_lengths(model: ArmInertialModel, geom: ArmGeometry) -> None:
    if (
        abs(model.upper_arm.length - geom.upper_arm_length) > 1e-12
        or abs(model.forearm_hand.length - geom.forearm_hand_length) > 1e-12
    ):
        raise ValueError("geometry link lengths disagree with the inertial model")


def _coefficients(model: ArmInertialModel):
    """Constant lumped coefficients of the equations of motion."""
    ua, fh = model.upper_arm, model.forearm_hand
    mt = model.tool_mass
    l1, l2 = ua.length, fh.length
    m11 = ua.mass * ua.com_distance**2 + ua.inertia_com + (fh.mass + mt) * l1 * l1
    m22 = fh.mass * fh.com_distance**2 + fh.inertia_com + mt * l2 * l2
    coupling = (fh.mass * fh.com_distance + mt * l2) * l1
    grav1 = ua.mass * ua.com_distance + (fh.mass + mt) * l1
    grav2 = fh.mass * fh.com_distance + mt * l2
    return m11, m22, coupling, grav1, grav2


def mass_matrix(model: ArmInertialModel, geom: ArmGeometry, theta_e: float) -> np.ndarray:
    """Symmetric positive definite inertia matrix M(theta) [kg m^2]."""
    _check_lengths(model, geom)
    m11, m22, k, _, _ = _coefficients(model)
    sg = geom.branch_sign
    ce = math.cos(theta_e)
    off = sg * (m22 + k * ce)
    return np.array([[m11 + m22 + 2.0 * k * ce, off], [off, m22]])


def coriolis_matrix(
    model: ArmInertialModel,
    geom: ArmGeometry,
    theta_e: float,
    dtheta_s: float,
    dtheta_e: float,
) -> np.ndarray:
    """Christoffel-form C(theta, dtheta) such that Mdot - 2C is skew."""
    _check_lengths(model, geom)
    _, _, k, _, _ = _coefficients(model)
    sg = geom.branch_sign
    h = k * math.sin(theta_e)
    return np.array(
        [
            [-h * dtheta_e, -h * dtheta_s - sg * h * dtheta_e],
            [h * dtheta_s, 0.0],
        ]
    )


def gravity_vector(
    model: ArmInertialModel, geom: ArmGeometry, theta_s: float, theta_e: float
) -> np.ndarray:
    """Static gravity torques G(theta) [N m]."""
    _check_lengths(model, geom)
    _, _, _, g1, g2 = _coefficients(model)
    sg = geom.branch_sign
    a1 = theta_s
    a2 = theta_s + sg * theta_e
    g = model.gravity
    return np.array(
        [g * (g1 * math.sin(a1) + g2 * math.sin(a2)), sg * g * g2 * math.sin(a2)]
    )


def inverse_dynamics(
    model: ArmInertialModel, geom: ArmGeometry, state: JointState
) -> np.ndarray:
    """Body-motion joint torques (shoulder, elbow) [N m] for ``state``."""
    dtheta = np.array([state.dtheta_s, state.dtheta_e])
    ddtheta = np.array([state.ddtheta_s, state.ddtheta_e])
    m = mass_matrix(model, geom, state.theta_e)
    c = coriolis_matrix(model, geom, state.theta_e, state.dtheta_s, state.dtheta_e)
    g = gravity_vector(model, geom, state.theta_s, state.theta_e)
    return m @ ddtheta + c @ dtheta + g


def external_joint_torque(
    geom: ArmGeometry, theta_s: float, theta_e: float, f_hand
) -> np.ndarray:
    """Joint torques Gamma_ext = J^T f for a hand force vector ``f`` [N]."""
    return jacobian(geom, theta_s, theta_e).T @ np.asarray(f_hand, dtype=float)


def total_joint_torque(
    model: ArmInertialModel, geom: ArmGeometry, state: JointState, f_hand
) -> np.ndarray:
    """Demanded joint torque: body-motion torques plus the external load map."""
    return inverse_dynamics(model, geom, state) + external_joint_torque(
        geom, state.theta_s, state.theta_e, f_hand
    )


def mechanical_energy(
    model: ArmInertialModel, geom: ArmGeometry, state: JointState
) -> float:
    """Kinetic plus gravitational potential energy [J] (zero at shoulder height)."""
    _check_lengths(model, geom)
    _, _, _, g1, g2 = _coefficients(model)
    dtheta = np.array([state.dtheta_s, state.dtheta_e])
    m = mass_matrix(model, geom, state.theta_e)
    kinetic = 0.5 * float(dtheta @ m @ dtheta)
    sg = geom.branch_sign
    a1 = state.theta_s
    a2 = state.theta_s + sg * state.theta_e
    potential = -model.gravity * (g1 * math.cos(a1) + g2 * math.cos(a2))
    return kinetic + potential
