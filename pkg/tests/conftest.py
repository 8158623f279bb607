"""Shared scenario fixtures."""

import copy

import pytest

from armfatigue.scenario import Scenario, scenario_from_dict

TASK1 = {
    "operator": {
        "stature_m": 1.88,
        "body_mass_kg": 90.0,
        "gender": "male",
        "k_shoulder_per_min": 0.17,
        "k_elbow_per_min": 0.24,
    },
    "task": {
        "p0_m": [0.4, 0.1],
        "pf_m": [0.6, 0.1],
        "t_push_s": 5.0,
        "t_pull_s": 5.0,
        "push_force_n": 20.0,
        "pull_force_n": 10.0,
        "tool_mass_kg": 2.0,
    },
    "run": {"duration_s": 30.0, "dt_s": 0.01},
}


def make_scenario(base=TASK1, **sections) -> Scenario:
    """Scenario from the task-1 template with per-section overrides."""
    data = copy.deepcopy(base)
    for section, overrides in sections.items():
        data[section].update(overrides)
    return scenario_from_dict(data)


def task2_scenario(**sections) -> Scenario:
    merged = {"task": {"p0_m": [0.3, 0.1], "pf_m": [0.4, 0.1]}}
    for section, overrides in sections.items():
        merged.setdefault(section, {}).update(overrides)
    return make_scenario(**merged)


@pytest.fixture
def task1():
    return make_scenario()


@pytest.fixture
def task2():
    return task2_scenario()
