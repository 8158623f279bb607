"""Dynamics: anthropometry, Lagrangian structure, gravity and load mapping."""

import math

import numpy as np
import pytest

from armfatigue.dynamics import (
    derive_anthropometry,
    coriolis_matrix,
    external_joint_torque,
    gravity_vector,
    inverse_dynamics,
    make_arm_geometry,
    mass_matrix,
    mechanical_energy,
    total_joint_torque,
)
from armfatigue.errors import OutOfRangeAnthropometry
from armfatigue.kinematics import JointState, TrajectoryLeg, jacobian, joint_trajectory

STATURE = 1.88  # [m]
BODY_MASS = 90.0  # [kg]


@pytest.fixture
def model():
    return derive_anthropometry(STATURE, BODY_MASS, tool_mass=2.0)


@pytest.fixture
def geom(model):
    return make_arm_geometry(model)


def test_anthropometry_regression_values(model):
    assert model.upper_arm.length == pytest.approx(0.34968, abs=1e-12)
    assert model.forearm_hand.length == pytest.approx(0.47752, abs=1e-12)
    assert model.upper_arm.mass == pytest.approx(2.52, abs=1e-12)
    assert model.forearm_hand.mass == pytest.approx(1.98, abs=1e-12)
    assert model.upper_arm.com_distance == pytest.approx(0.436 * 0.34968, abs=1e-12)
    assert model.forearm_hand.com_distance == pytest.approx(0.682 * 0.47752, abs=1e-12)
    for seg, frac in ((model.upper_arm, 0.322), (model.forearm_hand, 0.468)):
        assert seg.inertia_com == pytest.approx(seg.mass * (frac * seg.length) ** 2)
    assert model.tool_mass == 2.0


def test_anthropometry_scales_linearly_in_body_mass():
    base = derive_anthropometry(STATURE, 60.0)
    double = derive_anthropometry(STATURE, 120.0)
    for name in ("upper_arm", "forearm_hand"):
        seg, seg2 = getattr(base, name), getattr(double, name)
        assert seg2.mass == pytest.approx(2.0 * seg.mass)
        assert seg2.inertia_com == pytest.approx(2.0 * seg.inertia_com)
        assert seg2.length == seg.length


def test_anthropometry_range_check():
    with pytest.raises(OutOfRangeAnthropometry):
        derive_anthropometry(0.9, 90.0)
    with pytest.raises(OutOfRangeAnthropometry):
        derive_anthropometry(1.88, 250.0)


def test_zero_gravity_zero_motion_gives_zero_torque(model, geom):
    from dataclasses import replace

    weightless = replace(model, gravity=0.0)
    torque = inverse_dynamics(weightless, geom, JointState(0.8, 1.2))
    np.testing.assert_allclose(torque, [0.0, 0.0], atol=1e-15)


def test_static_horizontal_arm_matches_point_mass_moments(model, geom):
    # independent oracle: sum of point-mass gravity moments about the shoulder
    ua, fh = model.upper_arm, model.forearm_hand
    expected = model.gravity * (
        ua.mass * ua.com_distance
        + fh.mass * (ua.length + fh.com_distance)
        + model.tool_mass * (ua.length + fh.length)
    )
    torque = inverse_dynamics(model, geom, JointState(math.pi / 2.0, 0.0))
    assert torque[0] == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(33.12, abs=5e-3)


def test_static_torque_equals_gravity_vector_on_random_postures(model, geom):
    rng = np.random.default_rng(11)
    for _ in range(200):
        theta_s = rng.uniform(-1.5, 2.5)
        theta_e = rng.uniform(0.0, 3.0)
        static = inverse_dynamics(model, geom, JointState(theta_s, theta_e))
        np.testing.assert_allclose(
            static, gravity_vector(model, geom, theta_s, theta_e), atol=1e-12
        )


def test_mass_matrix_spd_on_random_postures(model):
    rng = np.random.default_rng(5)
    for branch in ("elbow_down", "elbow_up"):
        geom = make_arm_geometry(model, branch)
        for _ in range(1_000):
            m = mass_matrix(model, geom, rng.uniform(0.0, math.pi))
            np.testing.assert_allclose(m, m.T, atol=1e-15)
            assert np.all(np.linalg.eigvalsh(m) > 0.0)


def test_coriolis_skew_symmetry(model, geom):
    # Mdot - 2C must be skew symmetric; Mdot from central differences
    rng = np.random.default_rng(17)
    h = 1e-7
    for _ in range(300):
        theta_e = rng.uniform(0.1, 3.0)
        dtheta = rng.uniform(-2.0, 2.0, size=2)
        mdot = (
            mass_matrix(model, geom, theta_e + h * dtheta[1])
            - mass_matrix(model, geom, theta_e - h * dtheta[1])
        ) / (2.0 * h)
        c = coriolis_matrix(model, geom, theta_e, dtheta[0], dtheta[1])
        n = mdot - 2.0 * c
        np.testing.assert_allclose(n + n.T, np.zeros((2, 2)), atol=1e-6)


def test_energy_rate_identity_along_trajectory(model, geom):
    # with no external force, joint power equals d(E+U)/dt
    dt = 0.001
    leg = TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0)
    states = joint_trajectory(geom, leg, dt)
    torque = np.array([inverse_dynamics(model, geom, s) for s in states])
    dtheta = np.array([(s.dtheta_s, s.dtheta_e) for s in states])
    power = np.sum(torque * dtheta, axis=1)
    energy = np.array([mechanical_energy(model, geom, s) for s in states])
    denergy = (energy[2:] - energy[:-2]) / (2.0 * dt)
    scale = np.max(np.abs(power))
    assert scale > 0.0
    assert np.max(np.abs(denergy - power[1:-1])) / scale < 1e-4


def test_external_torque_zero_force(geom):
    np.testing.assert_allclose(
        external_joint_torque(geom, 0.7, 1.1, (0.0, 0.0)), [0.0, 0.0], atol=1e-15
    )


def test_external_torque_straight_arm_lever_arms(geom):
    l1 = geom.upper_arm_length
    l2 = geom.forearm_hand_length
    fz = 13.0
    torque = external_joint_torque(geom, math.pi / 2.0, 0.0, (0.0, fz))
    np.testing.assert_allclose(torque, [fz * (l1 + l2), fz * l2], atol=1e-12)


def test_external_torque_virtual_work(geom):
    rng = np.random.default_rng(23)
    for _ in range(200):
        theta_s = rng.uniform(-1.0, 2.0)
        theta_e = rng.uniform(0.1, 2.8)
        force = rng.uniform(-30.0, 30.0, size=2)
        dq = rng.uniform(-1.0, 1.0, size=2)
        torque = external_joint_torque(geom, theta_s, theta_e, force)
        j = jacobian(geom, theta_s, theta_e)
        assert torque @ dq == pytest.approx(force @ (j @ dq), abs=1e-12)


def test_total_torque_additive_and_linear_in_force(model, geom):
    state = JointState(0.6, 1.8, 0.3, -0.2, 0.1, 0.4)
    body = inverse_dynamics(model, geom, state)
    np.testing.assert_allclose(
        total_joint_torque(model, geom, state, (0.0, 0.0)), body, atol=1e-15
    )
    push = total_joint_torque(model, geom, state, (20.0, 0.0))
    pull = total_joint_torque(model, geom, state, (-10.0, 0.0))
    delta = external_joint_torque(geom, state.theta_s, state.theta_e, (30.0, 0.0))
    np.testing.assert_allclose(push - pull, delta, atol=1e-12)


def test_geometry_length_mismatch_rejected(model):
    from armfatigue.kinematics import ArmGeometry

    bad = ArmGeometry(0.3, 0.4)
    with pytest.raises(ValueError):
        mass_matrix(model, bad, 1.0)
