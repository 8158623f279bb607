"""Fatigue state machine over repetitive push/pull cycles.

Each of the four muscle groups (shoulder flexor/extensor, elbow
flexor/extensor) owns a capacity state that decays exponentially with the
accumulated ratio of demanded joint torque to posture-dependent capacity:

    gamma_cem(t) = gamma_mvc(theta0) * exp(-k * int demand/capacity du)

where theta0 is the posture at that group's first activation and k is the
per-joint fatigue rate (configured per minute, integrated per second).  A
group accumulates only while its phase is active and holds its level while
resting; recovery is not modeled, so capacities never increase.

Because the motion and loads repeat exactly cycle after cycle, the
per-cycle exponent increment of every group is a constant.  One cycle of
quadrature therefore determines the state at any time (fast-forward):

    exponent(t) = completed_cycles * increment + partial(offset in cycle)

Load conventions
----------------
``load_convention`` selects which hand-force vector the task phases feed
into the Jacobian-transpose torque map:

* ``reaction_on_hand`` (default): the reaction the environment applies to
  the hand, i.e. (-push_force, 0) while pushing and (+pull_force, 0) while
  pulling.
* ``hand_on_environment``: the force the hand exerts, same magnitudes with
  opposite signs.  This flips the sign of the external torque share inside
  the net demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .capacity import CapacityCoefficients, joint_capacity
from .dynamics import (
    ArmInertialModel,
    LoadSpec,
    SegmentParams,
    derive_anthropometry,
    make_arm_geometry,
    total_joint_torque,
)
from .errors import NegativeTime, ZeroCapacity
from .kinematics import DEFAULT_BLEND, ArmGeometry, TrajectoryLeg, joint_trajectory

if TYPE_CHECKING:
    from .scenario import Scenario

GROUPS = ("shoulder_flexor", "shoulder_extensor", "elbow_flexor", "elbow_extensor")

GROUP_JOINT = {
    "shoulder_flexor": "shoulder",
    "shoulder_extensor": "shoulder",
    "elbow_flexor": "elbow",
    "elbow_extensor": "elbow",
}
GROUP_MOVEMENT = {
    "shoulder_flexor": "flexion",
    "shoulder_extensor": "extension",
    "elbow_flexor": "flexion",
    "elbow_extensor": "extension",
}
# push engages shoulder flexion + elbow extension, pull the antagonists
GROUP_PHASE = {
    "shoulder_flexor": "push",
    "elbow_extensor": "push",
    "shoulder_extensor": "pull",
    "elbow_flexor": "pull",
}
# sign of the joint coordinate each group drives (+ flexion, - extension)
GROUP_ACTION_SIGN = {
    "shoulder_flexor": 1.0,
    "shoulder_extensor": -1.0,
    "elbow_flexor": 1.0,
    "elbow_extensor": -1.0,
}
JOINT_INDEX = {"shoulder": 0, "elbow": 1}

LOAD_CONVENTIONS = ("reaction_on_hand", "hand_on_environment")

# fraction of a phase whose net torque may oppose the designated group
# before the run is flagged
OPPOSING_SIGN_FLAG_FRACTION = 0.05


@dataclass(frozen=True)
class CycleSchedule:
    """Timing of one push/pull cycle."""

    t_push: float  # [s]
    t_pull: float  # [s]
    t0: float = 0.0  # [s] start of work
    starts_with: str = "push"

    def __post_init__(self):
        if self.t_push <= 0.0 or self.t_pull <= 0.0:
            raise ValueError("phase durations must be strictly positive")
        if self.starts_with not in ("push", "pull"):
            raise ValueError("starts_with must be 'push' or 'pull'")

    @property
    def period(self) -> float:
        return self.t_push + self.t_pull

    @property
    def phase_order(self) -> tuple[str, str]:
        return ("push", "pull") if self.starts_with == "push" else ("pull", "push")

    def phase_duration(self, phase: str) -> float:
        return self.t_push if phase == "push" else self.t_pull


class PhaseInfo(NamedTuple):
    phase: str
    cycle_index: int
    active_time: float  # cumulative time [s] the active pair has worked


def phase_clock(sched: CycleSchedule, t: float) -> PhaseInfo:
    """Phase, completed-cycle count and cumulative active time at ``t``."""
    if t < sched.t0:
        raise NegativeTime(f"t={t} before start of work t0={sched.t0}")
    off = t - sched.t0
    period = sched.period
    cycle = int(math.floor(off / period))
    tau = off - cycle * period
    if tau >= period:  # guard against floating roll-over at cycle boundaries
        cycle += 1
        tau -= period
    first, second = sched.phase_order
    t_first = sched.phase_duration(first)
    t_second = sched.phase_duration(second)
    if tau < t_first:
        # the active pair has worked in every completed cycle plus the
        # current offset; subtracting the other phase's completed time
        return PhaseInfo(first, cycle, off - cycle * t_second)
    return PhaseInfo(second, cycle, off - (cycle + 1) * t_first)


@dataclass
class MuscleGroupState:
    """Snapshot of one group's fatigue state."""

    group: str
    gamma_cem: float  # [N m]
    accumulated_exponent: float  # dimensionless
    active_time: float  # [s]


def exponent_increment(demand, capacity, k_per_min: float, dt: float) -> float:
    """Trapezoidal k * int(demand/capacity) over one active phase.

    ``demand`` and ``capacity`` are series sampled at step ``dt`` covering
    the phase inclusive of both endpoints; ``k_per_min`` is converted to
    per-second internally.
    """
    return float(exponent_partials(demand, capacity, k_per_min, dt)[-1])


def exponent_partials(demand, capacity, k_per_min: float, dt: float) -> np.ndarray:
    """Cumulative trapezoidal exponent along the phase (starts at 0)."""
    demand = np.asarray(demand, dtype=float)
    capacity = np.asarray(capacity, dtype=float)
    if np.any(capacity <= 0.0):
        raise ZeroCapacity("capacity <= 0 on an active sample")
    integrand = (k_per_min / 60.0) * demand / capacity
    steps = 0.5 * dt * (integrand[1:] + integrand[:-1])
    return np.concatenate([[0.0], np.cumsum(steps)])


@dataclass
class CycleProfile:
    """One cycle of the task, precomputed for fast-forward evaluation.

    Trace arrays cover the within-cycle offsets tau = 0 .. period-dt; the
    per-group ``partial`` arrays additionally include the cycle-end point.
    """

    schedule: CycleSchedule
    dt: float
    phase: np.ndarray  # (n,) phase label per trace sample
    tau: np.ndarray  # (n,) within-cycle offsets [s]
    theta_s: np.ndarray  # (n,) [rad]
    theta_e: np.ndarray  # (n,) [rad]
    demand: dict  # joint -> (n,) |net torque| [N m]
    mvc_active: dict  # joint -> (n,) active-group capacity [N m]
    mvc0: dict  # group -> capacity at first activation [N m]
    increments: dict  # group -> per-cycle exponent increment
    partial: dict  # group -> (n+1,) within-cycle exponent, tau = 0 .. period
    opposing_fraction: dict  # group -> fraction of active samples opposing it

    @property
    def n_samples(self) -> int:
        return len(self.tau)

    @property
    def tau_grid(self) -> np.ndarray:
        return np.arange(self.n_samples + 1) * self.dt


def _phase_forces(load: LoadSpec, load_convention: str) -> dict:
    if load_convention not in LOAD_CONVENTIONS:
        raise ValueError(f"load_convention must be one of {LOAD_CONVENTIONS}")
    sign = -1.0 if load_convention == "reaction_on_hand" else 1.0
    return {
        "push": np.array([sign * load.push_force, 0.0]),
        "pull": np.array([-sign * load.pull_force, 0.0]),
    }


def build_cycle_profile(
    model: ArmInertialModel,
    geom: ArmGeometry,
    coeffs: CapacityCoefficients,
    gender: str,
    p0,
    pf,
    schedule: CycleSchedule,
    load: LoadSpec,
    k_shoulder_per_min: float,
    k_elbow_per_min: float,
    dt: float,
    blend: str = DEFAULT_BLEND,
    load_convention: str = "reaction_on_hand",
    mvc_policy=None,
) -> CycleProfile:
    """Sample one cycle and integrate each group's exponent increment.

    ``mvc_policy`` switches the capacity model: ``None`` keeps the
    posture-dependent values (quasi-static), ``"min_over_cycle"`` holds
    each group at its worst-case minimum, and a ``{group: value}`` mapping
    pins fixed values.
    """
    forces = _phase_forces(load, load_convention)
    k_per_min = {"shoulder": k_shoulder_per_min, "elbow": k_elbow_per_min}

    first, second = schedule.phase_order
    leg_points = {first: (p0, pf), second: (pf, p0)}

    # sample both legs: joint states, net torques, per-group capacities
    leg = {}
    for phase in (first, second):
        start, end = leg_points[phase]
        states = joint_trajectory(
            geom, TrajectoryLeg(tuple(start), tuple(end), schedule.phase_duration(phase)), dt, blend
        )
        torque = np.array(
            [total_joint_torque(model, geom, s, forces[phase]) for s in states]
        )
        theta = np.array([(s.theta_s, s.theta_e) for s in states])
        leg[phase] = {"theta": theta, "torque": torque}

    mvc0, increments, partials_leg, opposing = {}, {}, {}, {}
    mvc_leg = {}
    for group in GROUPS:
        phase = GROUP_PHASE[group]
        joint = GROUP_JOINT[group]
        ji = JOINT_INDEX[joint]
        theta = leg[phase]["theta"]
        signed = leg[phase]["torque"][:, ji]
        capacity = np.array(
            [
                joint_capacity(
                    coeffs,
                    joint,
                    GROUP_MOVEMENT[group],
                    math.degrees(th_s),
                    math.degrees(th_e),
                    gender,
                )
                for th_s, th_e in theta
            ]
        )
        if np.any(capacity <= 0.0):
            raise ZeroCapacity(f"{group} capacity <= 0 within its active phase")
        if mvc_policy == "min_over_cycle":
            capacity = np.full_like(capacity, capacity.min())
        elif isinstance(mvc_policy, dict):
            capacity = np.full_like(capacity, float(mvc_policy[group]))
        elif mvc_policy is not None:
            raise ValueError(f"unknown mvc_policy {mvc_policy!r}")

        demand = np.abs(signed)
        partials_leg[group] = exponent_partials(demand, capacity, k_per_min[joint], dt)
        increments[group] = float(partials_leg[group][-1])
        mvc0[group] = float(capacity[0])
        mvc_leg[group] = capacity
        opposing[group] = float(np.mean(signed * GROUP_ACTION_SIGN[group] < 0.0))

    # assemble the within-cycle trace grid (first phase then second, [0, T))
    n_first = round(schedule.phase_duration(first) / dt)
    n_second = round(schedule.phase_duration(second) / dt)
    n = n_first + n_second

    phase_labels = np.array([first] * n_first + [second] * n_second)
    tau = np.arange(n) * dt
    theta_s = np.concatenate(
        [leg[first]["theta"][:n_first, 0], leg[second]["theta"][:n_second, 0]]
    )
    theta_e = np.concatenate(
        [leg[first]["theta"][:n_first, 1], leg[second]["theta"][:n_second, 1]]
    )
    demand_tr = {}
    mvc_tr = {}
    for joint, ji in JOINT_INDEX.items():
        demand_tr[joint] = np.abs(
            np.concatenate(
                [leg[first]["torque"][:n_first, ji], leg[second]["torque"][:n_second, ji]]
            )
        )
        groups_by_phase = {
            ph: next(
                g for g in GROUPS if GROUP_JOINT[g] == joint and GROUP_PHASE[g] == ph
            )
            for ph in ("push", "pull")
        }
        mvc_tr[joint] = np.concatenate(
            [
                mvc_leg[groups_by_phase[first]][:n_first],
                mvc_leg[groups_by_phase[second]][:n_second],
            ]
        )

    # per-group within-cycle exponent over tau = 0 .. period inclusive:
    # flat while resting, accumulating while active
    partial = {}
    for group in GROUPS:
        pre = partials_leg[group]
        if GROUP_PHASE[group] == first:
            partial[group] = np.concatenate(
                [pre[:-1], np.full(n_second + 1, increments[group])]
            )
        else:
            partial[group] = np.concatenate([np.zeros(n_first), pre])

    return CycleProfile(
        schedule=schedule,
        dt=dt,
        phase=phase_labels,
        tau=tau,
        theta_s=theta_s,
        theta_e=theta_e,
        demand=demand_tr,
        mvc_active=mvc_tr,
        mvc0=mvc0,
        increments=increments,
        partial=partial,
        opposing_fraction=opposing,
    )


def cycle_exponent_increments(profile: CycleProfile) -> dict:
    """Per-group exponent increment accumulated by one full cycle."""
    return dict(profile.increments)


def _cycle_and_offset(profile: CycleProfile, t: float) -> tuple[int, float]:
    sched = profile.schedule
    if t < sched.t0:
        raise NegativeTime(f"t={t} before start of work t0={sched.t0}")
    off = t - sched.t0
    cycle = int(math.floor(off / sched.period + 1e-12))
    tau = off - cycle * sched.period
    if tau >= sched.period:
        cycle += 1
        tau -= sched.period
    return cycle, tau


def fatigue_at(profile: CycleProfile, t: float) -> dict:
    """Per-group capacity gamma_cem [N m] at time ``t`` via fast-forward."""
    cycle, tau = _cycle_and_offset(profile, t)
    grid = profile.tau_grid
    out = {}
    for group in GROUPS:
        part = float(np.interp(tau, grid, profile.partial[group]))
        out[group] = profile.mvc0[group] * math.exp(
            -(cycle * profile.increments[group] + part)
        )
    return out


def group_states_at(profile: CycleProfile, t: float) -> dict:
    """Per-group :class:`MuscleGroupState` snapshots at time ``t``."""
    cycle, tau = _cycle_and_offset(profile, t)
    grid = profile.tau_grid
    sched = profile.schedule
    first, _ = sched.phase_order
    t_first = sched.phase_duration(first)
    out = {}
    for group in GROUPS:
        part = float(np.interp(tau, grid, profile.partial[group]))
        exponent = cycle * profile.increments[group] + part
        t_phase = sched.phase_duration(GROUP_PHASE[group])
        if GROUP_PHASE[group] == first:
            active = cycle * t_phase + min(tau, t_first)
        else:
            active = cycle * t_phase + max(0.0, min(tau - t_first, t_phase))
        out[group] = MuscleGroupState(
            group=group,
            gamma_cem=profile.mvc0[group] * math.exp(-exponent),
            accumulated_exponent=exponent,
            active_time=active,
        )
    return out


@dataclass
class FatigueTrace:
    """Time series of the simulation on the sampling grid.

    ``gamma_mvc_*`` carry the active group's capacity,
    ``gamma_cem_*`` the merged per-joint available torque (the active
    group's current capacity), and ``gamma_cem_groups`` the four per-group
    series.
    """

    t_s: np.ndarray
    phase: np.ndarray
    theta_s_rad: np.ndarray
    theta_e_rad: np.ndarray
    gamma_joint_shoulder_nm: np.ndarray
    gamma_joint_elbow_nm: np.ndarray
    gamma_mvc_shoulder_nm: np.ndarray
    gamma_mvc_elbow_nm: np.ndarray
    gamma_cem_shoulder_nm: np.ndarray
    gamma_cem_elbow_nm: np.ndarray
    gamma_cem_groups: dict

    def __len__(self) -> int:
        return len(self.t_s)


def trace_from_profile(profile: CycleProfile, duration: float) -> FatigueTrace:
    """Expand the cycle profile into a trace covering [t0, t0 + duration]."""
    dt = profile.dt
    n_total = round(duration / dt)
    if duration < 0.0 or abs(n_total * dt - duration) > 1e-9:
        raise ValueError(f"duration {duration} is not a multiple of dt {dt}")
    if n_total == 0:
        empty = np.empty(0)
        return FatigueTrace(
            t_s=empty,
            phase=np.empty(0, dtype=profile.phase.dtype),
            theta_s_rad=empty,
            theta_e_rad=empty,
            gamma_joint_shoulder_nm=empty,
            gamma_joint_elbow_nm=empty,
            gamma_mvc_shoulder_nm=empty,
            gamma_mvc_elbow_nm=empty,
            gamma_cem_shoulder_nm=empty,
            gamma_cem_elbow_nm=empty,
            gamma_cem_groups={g: empty.copy() for g in GROUPS},
        )

    n_cycle = profile.n_samples
    i = np.arange(n_total + 1)
    cycles = i // n_cycle
    j = i % n_cycle

    cem_groups = {}
    for group in GROUPS:
        exponent = cycles * profile.increments[group] + profile.partial[group][j]
        cem_groups[group] = profile.mvc0[group] * np.exp(-exponent)

    phase = profile.phase[j]
    push_mask = phase == "push"
    merged = {}
    for joint in JOINT_INDEX:
        push_group = next(
            g for g in GROUPS if GROUP_JOINT[g] == joint and GROUP_PHASE[g] == "push"
        )
        pull_group = next(
            g for g in GROUPS if GROUP_JOINT[g] == joint and GROUP_PHASE[g] == "pull"
        )
        merged[joint] = np.where(
            push_mask, cem_groups[push_group], cem_groups[pull_group]
        )

    return FatigueTrace(
        t_s=profile.schedule.t0 + i * dt,
        phase=phase,
        theta_s_rad=profile.theta_s[j],
        theta_e_rad=profile.theta_e[j],
        gamma_joint_shoulder_nm=profile.demand["shoulder"][j],
        gamma_joint_elbow_nm=profile.demand["elbow"][j],
        gamma_mvc_shoulder_nm=profile.mvc_active["shoulder"][j],
        gamma_mvc_elbow_nm=profile.mvc_active["elbow"][j],
        gamma_cem_shoulder_nm=merged["shoulder"],
        gamma_cem_elbow_nm=merged["elbow"],
        gamma_cem_groups=cem_groups,
    )


def detect_risk_crossing(profile: CycleProfile, horizon: float | None = None) -> dict:
    """First instants where available torque falls to the demanded torque.

    Scans the cycle profile analytically (no dense simulation): for every
    within-cycle sample of a group's active phase, the first cycle index at
    which the group's capacity reaches the demand there follows from the
    exponent in closed form.  Resolution is one dt.

    Returns ``{"shoulder": t|None, "elbow": t|None, "groups": {...}}``,
    times in seconds; ``None`` when no crossing occurs within ``horizon``.
    """
    sched = profile.schedule
    period = sched.period
    group_times = {}
    for group in GROUPS:
        mask = profile.phase == GROUP_PHASE[group]
        demand = profile.demand[GROUP_JOINT[group]][mask]
        part = profile.partial[group][:-1][mask]
        tau = profile.tau[mask]
        valid = demand > 0.0
        if not np.any(valid):
            group_times[group] = None
            continue
        need = np.log(profile.mvc0[group] / demand[valid]) - part[valid]
        inc = profile.increments[group]
        if inc > 0.0:
            cycles = np.maximum(0, np.ceil(need / inc - 1e-12)).astype(int)
        else:
            cycles = np.where(need <= 0.0, 0, np.iinfo(np.int64).max)
        finite = cycles < np.iinfo(np.int64).max
        if not np.any(finite):
            group_times[group] = None
            continue
        times = sched.t0 + cycles[finite] * period + tau[valid][finite]
        best = float(times.min())
        if horizon is not None and best > sched.t0 + horizon:
            group_times[group] = None
        else:
            group_times[group] = best

    result = {"groups": group_times}
    for joint in JOINT_INDEX:
        times = [
            group_times[g]
            for g in GROUPS
            if GROUP_JOINT[g] == joint and group_times[g] is not None
        ]
        result[joint] = min(times) if times else None
    return result


# ---------------------------------------------------------------------------
# scenario-level entry points
# ---------------------------------------------------------------------------


def model_from_scenario(scenario: "Scenario") -> ArmInertialModel:
    """Inertial model from the operator block, with segment overrides applied."""
    op = scenario.operator
    model = derive_anthropometry(
        op.stature_m, op.body_mass_kg, scenario.task.tool_mass_kg
    )
    if op.segments:
        updates = {}
        for name in ("upper_arm", "forearm_hand"):
            override = op.segments.get(name)
            if override:
                updates[name] = replace(getattr(model, name), **override)
        model = replace(model, **updates)
    return model


def profile_from_scenario(scenario: "Scenario", mvc_policy=None) -> CycleProfile:
    """Build the cycle profile the scenario describes."""
    op, task, run = scenario.operator, scenario.task, scenario.run
    model = model_from_scenario(scenario)
    geom = make_arm_geometry(model, run.elbow_branch)
    coeffs = op.capacity_table or CapacityCoefficients.default()
    schedule = CycleSchedule(t_push=task.t_push_s, t_pull=task.t_pull_s)
    load = LoadSpec(push_force=task.push_force_n, pull_force=task.pull_force_n)
    return build_cycle_profile(
        model,
        geom,
        coeffs,
        op.gender,
        task.p0_m,
        task.pf_m,
        schedule,
        load,
        op.k_shoulder_per_min,
        op.k_elbow_per_min,
        run.dt_s,
        blend=run.blend,
        load_convention=run.load_convention,
        mvc_policy=mvc_policy,
    )


def simulate(scenario: "Scenario") -> FatigueTrace:
    """Quasi-static simulation: capacity follows the posture at every sample."""
    profile = profile_from_scenario(scenario)
    return trace_from_profile(profile, scenario.run.duration_s)


def simulate_static_mode(
    scenario: "Scenario", constant_mvc_policy="min_over_cycle"
) -> FatigueTrace:
    """Static-capacity simulation.

    ``constant_mvc_policy`` is either ``"min_over_cycle"`` (worst case) or
    a ``{group: value}`` mapping of fixed capacities [N m].
    """
    profile = profile_from_scenario(scenario, mvc_policy=constant_mvc_policy)
    return trace_from_profile(profile, scenario.run.duration_s)
