"""Planar two-link arm kinematics: shoulder + elbow in the sagittal plane.

Frame and angle conventions
---------------------------
The sagittal plane is spanned by x (forward, away from the body) and z (up).
The shoulder is the fixed origin.  Both joints rotate about the lateral axis.

* ``theta_s`` is the shoulder angle measured from the downward vertical,
  positive forward.  ``theta_s = 0`` is the arm hanging straight down
  (the classical standing configuration); ``theta_s = pi/2`` points the
  upper arm horizontally forward.
* ``theta_e`` is the elbow flexion angle, 0 at full extension, positive in
  flexion, restricted to [0, pi].  The elbow branch of the geometry decides
  on which side of the shoulder-to-hand chord the elbow sits:
  ``elbow_down`` places it below the chord (natural forward-reach posture),
  ``elbow_up`` above.

All angles are radians; conversion to degrees happens only at the strength
table boundary (see :mod:`armfatigue.capacity`).

Trajectory legs are straight task-space segments traversed with a smooth
polynomial blend.  The default ``quintic`` blend has zero velocity *and*
zero acceleration at both endpoints, which keeps the cyclic motion's joint
rates continuous across phase boundaries.  The classical ``cubic`` blend
(zero endpoint velocity only) is available for comparison.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    SingularPostureWarning,
    SingularTrajectory,
    TimeOutOfRange,
    UnreachableTarget,
)

ELBOW_BRANCHES = ("elbow_down", "elbow_up")

# Trajectory endpoints must keep at least this margin from the boundary.
LEG_REACH_MARGIN = 1e-3  # [m]
# Postures within this angle of full extension are flagged as singular.
SINGULAR_TOL = 1e-6  # [rad]


@dataclass(frozen=True)
class ArmGeometry:
    """Link lengths and branch choice of the two-link arm.

    The forearm, wrist and hand are one rigid segment.
    """

    upper_arm_length: float  # [m]
    forearm_hand_length: float  # [m]
    shoulder_origin: tuple[float, float] = (0.0, 0.0)  # fixed at the frame origin
    elbow_branch: str = "elbow_down"

    def __post_init__(self):
        if not (self.upper_arm_length > 0.0 and self.forearm_hand_length > 0.0):
            raise ValueError("link lengths must be strictly positive")
        if self.elbow_branch not in ELBOW_BRANCHES:
            raise ValueError(f"elbow_branch must be one of {ELBOW_BRANCHES}")

    @property
    def reach_min(self) -> float:
        return abs(self.upper_arm_length - self.forearm_hand_length)

    @property
    def reach_max(self) -> float:
        return self.upper_arm_length + self.forearm_hand_length

    @property
    def branch_sign(self) -> float:
        """+1 for elbow_down (forearm angle theta_s + theta_e), -1 for elbow_up."""
        return 1.0 if self.elbow_branch == "elbow_down" else -1.0


@dataclass
class JointState:
    """Joint angles and their first two time derivatives at one instant."""

    theta_s: float  # [rad]
    theta_e: float  # [rad]
    dtheta_s: float = 0.0  # [rad/s]
    dtheta_e: float = 0.0  # [rad/s]
    ddtheta_s: float = 0.0  # [rad/s^2]
    ddtheta_e: float = 0.0  # [rad/s^2]
    t: float = 0.0  # [s]


@dataclass
class CartesianState:
    """Hand position, velocity and acceleration in the sagittal plane."""

    position: np.ndarray  # [m]
    velocity: np.ndarray  # [m/s]
    acceleration: np.ndarray  # [m/s^2]


@dataclass(frozen=True)
class TrajectoryLeg:
    """One straight task-space segment from ``start`` to ``end``."""

    start: tuple[float, float]  # [m]
    end: tuple[float, float]  # [m]
    duration: float  # [s]

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ValueError("leg duration must be strictly positive")


class FkResult(NamedTuple):
    elbow_position: np.ndarray
    hand_position: np.ndarray


class IkResult(NamedTuple):
    theta_s: float
    theta_e: float


def _link_dir(alpha: float) -> np.ndarray:
    # Unit vector at angle alpha from the downward vertical, tilting toward +x.
    return np.array([math.sin(alpha), -math.cos(alpha)])


def forward_kinematics(geom: ArmGeometry, theta_s: float, theta_e: float) -> FkResult:
    """Elbow and hand positions for the given joint angles."""
    a1 = theta_s
    a2 = theta_s + geom.branch_sign * theta_e
    origin = np.asarray(geom.shoulder_origin, dtype=float)
    elbow = origin + geom.upper_arm_length * _link_dir(a1)
    hand = elbow + geom.forearm_hand_length * _link_dir(a2)
    return FkResult(elbow, hand)


def is_reachable(geom: ArmGeometry, p, margin: float = 0.0) -> bool:
    """True when ``p`` lies strictly inside the reachable annulus by ``margin``."""
    r = math.hypot(p[0] - geom.shoulder_origin[0], p[1] - geom.shoulder_origin[1])
    return geom.reach_min + margin < r < geom.reach_max - margin


def inverse_kinematics(geom: ArmGeometry, p) -> IkResult:
    """Joint angles placing the hand at ``p`` on the configured elbow branch.

    Raises :class:`UnreachableTarget` on or outside the annulus boundary
    (the admissible region is the open annulus at float resolution); emits
    a :class:`SingularPostureWarning` within ``SINGULAR_TOL`` of full
    extension.
    """
    l1 = geom.upper_arm_length
    l2 = geom.forearm_hand_length
    px = p[0] - geom.shoulder_origin[0]
    pz = p[1] - geom.shoulder_origin[1]
    r2 = px * px + pz * pz
    r = math.sqrt(r2)
    if not (geom.reach_min < r < geom.reach_max):
        raise UnreachableTarget(
            f"target at radius {r:.6f} m outside "
            f"[{geom.reach_min:.6f}, {geom.reach_max:.6f}] m annulus"
        )

    # Elbow flexion from the law of cosines, 0 at full extension.
    cos_e = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    theta_e = math.acos(min(1.0, max(-1.0, cos_e)))

    # Shoulder angle: bearing of the target from the downward vertical,
    # corrected by the shoulder-side triangle angle on the branch side.
    bearing = math.atan2(px, -pz)
    cos_b = (r2 + l1 * l1 - l2 * l2) / (2.0 * r * l1)
    beta = math.acos(min(1.0, max(-1.0, cos_b)))
    theta_s = bearing - geom.branch_sign * beta

    if theta_e < SINGULAR_TOL:
        warnings.warn(
            "posture within singular tolerance of full extension",
            SingularPostureWarning,
            stacklevel=2,
        )
    return IkResult(theta_s, theta_e)


def jacobian(geom: ArmGeometry, theta_s: float, theta_e: float) -> np.ndarray:
    """2x2 hand Jacobian d(hand position)/d(theta_s, theta_e) [m/rad]."""
    l1 = geom.upper_arm_length
    l2 = geom.forearm_hand_length
    sg = geom.branch_sign
    a1 = theta_s
    a2 = theta_s + sg * theta_e
    return np.array(
        [
            [l1 * math.cos(a1) + l2 * math.cos(a2), sg * l2 * math.cos(a2)],
            [l1 * math.sin(a1) + l2 * math.sin(a2), sg * l2 * math.sin(a2)],
        ]
    )


def jacobian_rate(
    geom: ArmGeometry,
    theta_s: float,
    theta_e: float,
    dtheta_s: float,
    dtheta_e: float,
) -> np.ndarray:
    """Closed-form time derivative of the hand Jacobian."""
    l1 = geom.upper_arm_length
    l2 = geom.forearm_hand_length
    sg = geom.branch_sign
    a1 = theta_s
    a2 = theta_s + sg * theta_e
    da1 = dtheta_s
    da2 = dtheta_s + sg * dtheta_e
    return np.array(
        [
            [
                -l1 * math.sin(a1) * da1 - l2 * math.sin(a2) * da2,
                -sg * l2 * math.sin(a2) * da2,
            ],
            [
                l1 * math.cos(a1) * da1 + l2 * math.cos(a2) * da2,
                sg * l2 * math.cos(a2) * da2,
            ],
        ]
    )


# ---------------------------------------------------------------------------
# task-space trajectory blends
# ---------------------------------------------------------------------------


def _blend_cubic(u: float) -> tuple[float, float, float]:
    # 3u^2 - 2u^3: zero endpoint velocity, nonzero endpoint acceleration.
    p = u * u * (3.0 - 2.0 * u)
    dp = 6.0 * u * (1.0 - u)
    ddp = 6.0 - 12.0 * u
    return p, dp, ddp


def _blend_quintic(u: float) -> tuple[float, float, float]:
    # 10u^3 - 15u^4 + 6u^5: zero endpoint velocity and acceleration.
    p = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    dp = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    ddp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    return p, dp, ddp


BLENDS = {"cubic": _blend_cubic, "quintic": _blend_quintic}
DEFAULT_BLEND = "quintic"


def sample_task_trajectory(
    leg: TrajectoryLeg, t: float, blend: str = DEFAULT_BLEND
) -> CartesianState:
    """Hand position/velocity/acceleration on ``leg`` at time ``t``."""
    if t < 0.0 or t > leg.duration:
        raise TimeOutOfRange(f"t={t} outside [0, {leg.duration}]")
    p0 = np.asarray(leg.start, dtype=float)
    delta = np.asarray(leg.end, dtype=float) - p0
    u = t / leg.duration
    p, dp, ddp = BLENDS[blend](u)
    return CartesianState(
        position=p0 + p * delta,
        velocity=(dp / leg.duration) * delta,
        acceleration=(ddp / (leg.duration * leg.duration)) * delta,
    )


def joint_trajectory(
    geom: ArmGeometry, leg: TrajectoryLeg, dt: float, blend: str = DEFAULT_BLEND
) -> list[JointState]:
    """Joint-space samples of ``leg`` on a grid of step ``dt``.

    Angles come from inverse kinematics; rates from the differential map
    dtheta = J^-1 v and ddtheta = J^-1 (a - Jdot dtheta), with Jdot in
    closed form.  ``dt`` must divide the leg duration.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    n = round(leg.duration / dt)
    if n < 1 or abs(n * dt - leg.duration) > 1e-9:
        raise ValueError(f"dt={dt} does not divide leg duration {leg.duration}")
    for endpoint in (leg.start, leg.end):
        if not is_reachable(geom, endpoint, margin=LEG_REACH_MARGIN):
            raise UnreachableTarget(
                f"leg endpoint {tuple(endpoint)} closer than "
                f"{LEG_REACH_MARGIN} m to the reach boundary"
            )

    states = []
    for j in range(n + 1):
        t = leg.duration if j == n else j * dt
        cart = sample_task_trajectory(leg, t, blend)
        theta_s, theta_e = inverse_kinematics(geom, cart.position)
        if theta_e < SINGULAR_TOL:
            raise SingularTrajectory(
                f"sample at t={t:.4f} s within singular tolerance of full extension"
            )
        jac = jacobian(geom, theta_s, theta_e)
        dtheta = np.linalg.solve(jac, cart.velocity)
        jdot = jacobian_rate(geom, theta_s, theta_e, dtheta[0], dtheta[1])
        ddtheta = np.linalg.solve(jac, cart.acceleration - jdot @ dtheta)
        states.append(
            JointState(
                theta_s=theta_s,
                theta_e=theta_e,
                dtheta_s=float(dtheta[0]),
                dtheta_e=float(dtheta[1]),
                ddtheta_s=float(ddtheta[0]),
                ddtheta_e=float(ddtheta[1]),
                t=t,
            )
        )
    return states
