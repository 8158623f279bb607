"""Posture-dependent maximal voluntary joint torque.

Static strength regression polynomials over the shoulder and elbow angles,
one row per (joint, movement), each scaled by a gender gain.  Inputs are
*degrees*, with 0 matching a straight arm hanging down in the standing
configuration (the same zero as the kinematics module, which works in
radians).  Outputs are N m, clamped at zero from below.

The push phase engages shoulder flexion and elbow extension; the pull
phase the antagonists.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import NonPositiveCapacityWarning

JOINTS = ("shoulder", "elbow")
MOVEMENTS = ("flexion", "extension")
PHASES = ("push", "pull")
GENDERS = ("male", "female")

# phase -> movement engaged at each joint
PHASE_MOVEMENTS = {
    "push": {"shoulder": "flexion", "elbow": "extension"},
    "pull": {"shoulder": "extension", "elbow": "flexion"},
}


@dataclass(frozen=True)
class CapacityRow:
    """Polynomial c0 + ce*theta_e + ce2*theta_e^2 + cs*theta_s, times gain."""

    c0: float
    ce: float
    ce2: float
    cs: float
    gain_male: float
    gain_female: float

    def __post_init__(self):
        if self.gain_male <= 0.0 or self.gain_female <= 0.0:
            raise ValueError("gender gains must be positive")

    def gain(self, gender: str) -> float:
        if gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}")
        return self.gain_male if gender == "male" else self.gain_female


_DEFAULT_ROWS = {
    ("elbow", "flexion"): CapacityRow(336.29, 1.544, -0.0085, -0.5, 0.1913, 0.1005),
    ("elbow", "extension"): CapacityRow(264.153, 0.575, 0.0, -0.425, 0.2126, 0.1153),
    ("shoulder", "flexion"): CapacityRow(227.338, 0.525, 0.0, -0.296, 0.2854, 0.1495),
    ("shoulder", "extension"): CapacityRow(204.562, 0.0, 0.0, 0.099, 0.4957, 0.2485),
}


@dataclass(frozen=True)
class CapacityCoefficients:
    """The four (joint, movement) strength rows."""

    rows: dict

    def __post_init__(self):
        expected = {(j, m) for j in JOINTS for m in MOVEMENTS}
        if set(self.rows) != expected:
            raise ValueError(f"capacity table must have exactly the rows {sorted(expected)}")

    @classmethod
    def default(cls) -> "CapacityCoefficients":
        return cls(rows=dict(_DEFAULT_ROWS))

    def row(self, joint: str, movement: str) -> CapacityRow:
        return self.rows[(joint, movement)]


def joint_capacity(
    coeffs: CapacityCoefficients,
    joint: str,
    movement: str,
    theta_s_deg: float,
    theta_e_deg: float,
    gender: str = "male",
) -> float:
    """Maximal voluntary torque [N m] at the posture, clamped at zero."""
    row = coeffs.row(joint, movement)
    raw = (
        row.c0
        + row.ce * theta_e_deg
        + row.ce2 * theta_e_deg * theta_e_deg
        + row.cs * theta_s_deg
    ) * row.gain(gender)
    if raw <= 0.0:
        warnings.warn(
            f"{joint} {movement} capacity <= 0 at theta_s={theta_s_deg:.1f} deg, "
            f"theta_e={theta_e_deg:.1f} deg; posture outside model validity",
            NonPositiveCapacityWarning,
            stacklevel=2,
        )
        return 0.0
    return raw


def phase_capacity(
    coeffs: CapacityCoefficients,
    phase: str,
    theta_s_deg: float,
    theta_e_deg: float,
    gender: str = "male",
) -> dict:
    """Capacities of the two muscle groups engaged during ``phase``."""
    if phase not in PHASES:
        raise ValueError(f"phase must be one of {PHASES}")
    return {
        joint: joint_capacity(
            coeffs, joint, PHASE_MOVEMENTS[phase][joint], theta_s_deg, theta_e_deg, gender
        )
        for joint in JOINTS
    }
