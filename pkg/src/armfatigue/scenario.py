"""Scenario files, run orchestration, CSV emission and grid sweeps.

Scenario schema (JSON)
----------------------
::

    {
      "operator": {
        "stature_m": 1.88,            required
        "body_mass_kg": 90.0,         required
        "gender": "male",             default "male"
        "k_shoulder_per_min": 0.17,   required
        "k_elbow_per_min": 0.24,      required
        "segments": {...},            optional per-segment overrides
        "capacity_table": {...}       optional strength-table override
      },
      "task": {
        "p0_m": [0.4, 0.1],           required, sagittal [x, z]
        "pf_m": [0.6, 0.1],           required
        "t_push_s": 5.0,              required
        "t_pull_s": 5.0,              required
        "push_force_n": 20.0,         required
        "pull_force_n": 10.0,         required
        "tool_mass_kg": 2.0           default 0.0
      },
      "run": {
        "duration_s": 3600.0,         required
        "dt_s": 0.01,                 default 0.01
        "mode": "quasistatic",        quasistatic | static_min_mvc | static_fixed
        "elbow_branch": "elbow_down", elbow_down | elbow_up
        "blend": "quintic",           quintic | cubic task-space blend
        "load_convention": "reaction_on_hand",
        "fixed_mvc_nm": {...}         required iff mode == static_fixed
      }
    }

Unknown keys are rejected.  ``segments`` may override any of ``mass_kg``,
``com_m``, ``inertia_kgm2`` and ``length_m`` per segment
(``upper_arm`` / ``forearm_hand``); ``capacity_table`` may override any of
the four strength rows with objects of ``c0``, ``theta_e``, ``theta_e_sq``,
``theta_s``, ``gain_male``, ``gain_female``.

Trace CSV columns: t_s, phase, theta_s_rad, theta_e_rad,
gamma_joint_shoulder_nm, gamma_joint_elbow_nm, gamma_mvc_shoulder_nm,
gamma_mvc_elbow_nm, gamma_cem_shoulder_nm, gamma_cem_elbow_nm, and one
gamma_cem column per muscle group.  Floats are written with full
round-trip precision, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from itertools import product
from pathlib import Path

import numpy as np

from . import fatigue
from .capacity import CapacityCoefficients, CapacityRow, GENDERS, JOINTS, MOVEMENTS
from .errors import ParseError, SchemaError, UnreachableTarget, ValidationError
from .fatigue import (
    GROUPS,
    FatigueTrace,
    detect_risk_crossing,
    group_states_at,
    make_arm_geometry,
    profile_from_scenario,
    trace_from_profile,
)
from .kinematics import LEG_REACH_MARGIN, ELBOW_BRANCHES, BLENDS, is_reachable

MODES = ("quasistatic", "static_min_mvc", "static_fixed")

TRACE_COLUMNS = (
    "t_s",
    "phase",
    "theta_s_rad",
    "theta_e_rad",
    "gamma_joint_shoulder_nm",
    "gamma_joint_elbow_nm",
    "gamma_mvc_shoulder_nm",
    "gamma_mvc_elbow_nm",
    "gamma_cem_shoulder_nm",
    "gamma_cem_elbow_nm",
    "gamma_cem_shoulder_flexor_nm",
    "gamma_cem_shoulder_extensor_nm",
    "gamma_cem_elbow_flexor_nm",
    "gamma_cem_elbow_extensor_nm",
)

_SEGMENT_FIELD_MAP = {
    "mass_kg": "mass",
    "com_m": "com_distance",
    "inertia_kgm2": "inertia_com",
    "length_m": "length",
}
_ROW_FIELD_MAP = {
    "c0": "c0",
    "theta_e": "ce",
    "theta_e_sq": "ce2",
    "theta_s": "cs",
    "gain_male": "gain_male",
    "gain_female": "gain_female",
}


@dataclass
class OperatorSpec:
    stature_m: float
    body_mass_kg: float
    k_shoulder_per_min: float
    k_elbow_per_min: float
    gender: str = "male"
    segments: dict | None = None
    capacity_table: CapacityCoefficients | None = None


@dataclass
class TaskSpec:
    p0_m: tuple
    pf_m: tuple
    t_push_s: float
    t_pull_s: float
    push_force_n: float
    pull_force_n: float
    tool_mass_kg: float = 0.0


@dataclass
class RunSpec:
    duration_s: float
    dt_s: float = 0.01
    mode: str = "quasistatic"
    elbow_branch: str = "elbow_down"
    blend: str = "quintic"
    load_convention: str = "reaction_on_hand"
    fixed_mvc_nm: dict | None = None


@dataclass
class Scenario:
    operator: OperatorSpec
    task: TaskSpec
    run: RunSpec


# ---------------------------------------------------------------------------
# loading and validation
# ---------------------------------------------------------------------------


def _require_keys(section: dict, path: str, required: set, optional: set) -> None:
    keys = set(section)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise SchemaError(f"{path}: missing keys {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")


def _number(section: dict, path: str, key: str, default=None) -> float:
    value = section.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError("must be a number", field=f"{path}.{key}")
    return float(value)


def _point(section: dict, path: str, key: str) -> tuple:
    value = section.get(key)
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ValidationError("must be a 2-element [x, z] array", field=f"{path}.{key}")
    return (float(value[0]), float(value[1]))


def _positive(value: float, path: str) -> float:
    if not value > 0.0:
        raise ValidationError("must be strictly positive", field=path)
    return value


def _non_negative(value: float, path: str) -> float:
    if value < 0.0:
        raise ValidationError("must be non-negative", field=path)
    return value


def _choice(section: dict, path: str, key: str, choices, default) -> str:
    value = section.get(key, default)
    if value not in choices:
        raise ValidationError(f"must be one of {tuple(choices)}", field=f"{path}.{key}")
    return value


def _parse_segments(raw, path: str) -> dict | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ValidationError("must be an object", field=path)
    out = {}
    for name, fields in raw.items():
        if name not in ("upper_arm", "forearm_hand"):
            raise SchemaError(f"{path}: unknown segment {name!r}")
        if not isinstance(fields, dict):
            raise ValidationError("must be an object", field=f"{path}.{name}")
        seg = {}
        for key, value in fields.items():
            if key not in _SEGMENT_FIELD_MAP:
                raise SchemaError(f"{path}.{name}: unknown key {key!r}")
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError("must be a number", field=f"{path}.{name}.{key}")
            seg[_SEGMENT_FIELD_MAP[key]] = _positive(float(value), f"{path}.{name}.{key}")
        out[name] = seg
    return out or None


def _parse_capacity_table(raw, path: str) -> CapacityCoefficients | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ValidationError("must be an object", field=path)
    rows = dict(CapacityCoefficients.default().rows)
    valid_names = {f"{j}_{m}": (j, m) for j in JOINTS for m in MOVEMENTS}
    for name, fields in raw.items():
        if name not in valid_names:
            raise SchemaError(f"{path}: unknown row {name!r}")
        if not isinstance(fields, dict):
            raise ValidationError("must be an object", field=f"{path}.{name}")
        updates = {}
        for key, value in fields.items():
            if key not in _ROW_FIELD_MAP:
                raise SchemaError(f"{path}.{name}: unknown key {key!r}")
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError("must be a number", field=f"{path}.{name}.{key}")
            updates[_ROW_FIELD_MAP[key]] = float(value)
        base = rows[valid_names[name]]
        merged = {f: updates.get(f, getattr(base, f)) for f in _ROW_FIELD_MAP.values()}
        try:
            rows[valid_names[name]] = CapacityRow(**merged)
        except ValueError as exc:
            raise ValidationError(str(exc), field=f"{path}.{name}") from exc
    return CapacityCoefficients(rows=rows)


def scenario_from_dict(data: dict) -> Scenario:
    """Validate a parsed scenario document and apply defaults."""
    if not isinstance(data, dict):
        raise SchemaError("scenario document must be a JSON object")
    _require_keys(data, "scenario", {"operator", "task", "run"}, set())
    for section in ("operator", "task", "run"):
        if not isinstance(data[section], dict):
            raise SchemaError(f"{section}: must be an object")

    op_raw = data["operator"]
    _require_keys(
        op_raw,
        "operator",
        {"stature_m", "body_mass_kg", "k_shoulder_per_min", "k_elbow_per_min"},
        {"gender", "segments", "capacity_table"},
    )
    operator = OperatorSpec(
        stature_m=_positive(_number(op_raw, "operator", "stature_m"), "operator.stature_m"),
        body_mass_kg=_positive(
            _number(op_raw, "operator", "body_mass_kg"), "operator.body_mass_kg"
        ),
        k_shoulder_per_min=_non_negative(
            _number(op_raw, "operator", "k_shoulder_per_min"), "operator.k_shoulder_per_min"
        ),
        k_elbow_per_min=_non_negative(
            _number(op_raw, "operator", "k_elbow_per_min"), "operator.k_elbow_per_min"
        ),
        gender=_choice(op_raw, "operator", "gender", GENDERS, "male"),
        segments=_parse_segments(op_raw.get("segments"), "operator.segments"),
        capacity_table=_parse_capacity_table(
            op_raw.get("capacity_table"), "operator.capacity_table"
        ),
    )

    task_raw = data["task"]
    _require_keys(
        task_raw,
        "task",
        {"p0_m", "pf_m", "t_push_s", "t_pull_s", "push_force_n", "pull_force_n"},
        {"tool_mass_kg"},
    )
    task = TaskSpec(
        p0_m=_point(task_raw, "task", "p0_m"),
        pf_m=_point(task_raw, "task", "pf_m"),
        t_push_s=_positive(_number(task_raw, "task", "t_push_s"), "task.t_push_s"),
        t_pull_s=_positive(_number(task_raw, "task", "t_pull_s"), "task.t_pull_s"),
        push_force_n=_non_negative(
            _number(task_raw, "task", "push_force_n"), "task.push_force_n"
        ),
        pull_force_n=_non_negative(
            _number(task_raw, "task", "pull_force_n"), "task.pull_force_n"
        ),
        tool_mass_kg=_non_negative(
            _number(task_raw, "task", "tool_mass_kg", 0.0), "task.tool_mass_kg"
        ),
    )

    run_raw = data["run"]
    _require_keys(
        run_raw,
        "run",
        {"duration_s"},
        {"dt_s", "mode", "elbow_branch", "blend", "load_convention", "fixed_mvc_nm"},
    )
    fixed_raw = run_raw.get("fixed_mvc_nm")
    fixed = None
    if fixed_raw is not None:
        if not isinstance(fixed_raw, dict) or set(fixed_raw) != set(GROUPS):
            raise ValidationError(
                f"must map exactly the groups {GROUPS}", field="run.fixed_mvc_nm"
            )
        fixed = {
            g: _positive(_number(fixed_raw, "run.fixed_mvc_nm", g), f"run.fixed_mvc_nm.{g}")
            for g in GROUPS
        }
    run = RunSpec(
        duration_s=_non_negative(_number(run_raw, "run", "duration_s"), "run.duration_s"),
        dt_s=_positive(_number(run_raw, "run", "dt_s", 0.01), "run.dt_s"),
        mode=_choice(run_raw, "run", "mode", MODES, "quasistatic"),
        elbow_branch=_choice(run_raw, "run", "elbow_branch", ELBOW_BRANCHES, "elbow_down"),
        blend=_choice(run_raw, "run", "blend", tuple(BLENDS), "quintic"),
        load_convention=_choice(
            run_raw, "run", "load_convention", fatigue.LOAD_CONVENTIONS, "reaction_on_hand"
        ),
        fixed_mvc_nm=fixed,
    )
    if run.mode == "static_fixed" and fixed is None:
        raise ValidationError(
            "required when mode is static_fixed", field="run.fixed_mvc_nm"
        )

    scenario = Scenario(operator=operator, task=task, run=run)
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    """Cross-field invariants: reachability, timing grid, duration."""
    try:
        model = fatigue.model_from_scenario(scenario)
    except ValueError as exc:
        raise ValidationError(str(exc), field="operator") from exc
    geom = make_arm_geometry(model, scenario.run.elbow_branch)
    for key, point in (("task.p0_m", scenario.task.p0_m), ("task.pf_m", scenario.task.pf_m)):
        if not is_reachable(geom, point, margin=LEG_REACH_MARGIN):
            raise ValidationError(
                f"endpoint {point} unreachable (annulus "
                f"[{geom.reach_min:.4f}, {geom.reach_max:.4f}] m with "
                f"{LEG_REACH_MARGIN} m margin)",
                field=key,
            )

    dt = scenario.run.dt_s
    for key, value in (
        ("task.t_push_s", scenario.task.t_push_s),
        ("task.t_pull_s", scenario.task.t_pull_s),
        ("run.duration_s", scenario.run.duration_s),
    ):
        steps = round(value / dt)
        if abs(steps * dt - value) > 1e-9:
            raise ValidationError(f"must be a multiple of dt_s={dt}", field=key)

    period = scenario.task.t_push_s + scenario.task.t_pull_s
    if scenario.run.duration_s < period:
        raise ValidationError(
            f"must cover at least one cycle ({period} s)", field="run.duration_s"
        )


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def load_scenario_file(path) -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def scenario_to_dict(scenario: Scenario) -> dict:
    """Plain-dict form of a scenario, loadable by :func:`scenario_from_dict`."""
    op = scenario.operator
    out = {
        "operator": {
            "stature_m": op.stature_m,
            "body_mass_kg": op.body_mass_kg,
            "gender": op.gender,
            "k_shoulder_per_min": op.k_shoulder_per_min,
            "k_elbow_per_min": op.k_elbow_per_min,
        },
        "task": {
            "p0_m": list(scenario.task.p0_m),
            "pf_m": list(scenario.task.pf_m),
            "t_push_s": scenario.task.t_push_s,
            "t_pull_s": scenario.task.t_pull_s,
            "push_force_n": scenario.task.push_force_n,
            "pull_force_n": scenario.task.pull_force_n,
            "tool_mass_kg": scenario.task.tool_mass_kg,
        },
        "run": {
            "duration_s": scenario.run.duration_s,
            "dt_s": scenario.run.dt_s,
            "mode": scenario.run.mode,
            "elbow_branch": scenario.run.elbow_branch,
            "blend": scenario.run.blend,
            "load_convention": scenario.run.load_convention,
        },
    }
    if op.segments:
        reverse = {v: k for k, v in _SEGMENT_FIELD_MAP.items()}
        out["operator"]["segments"] = {
            name: {reverse[f]: v for f, v in fields.items()}
            for name, fields in op.segments.items()
        }
    if op.capacity_table:
        reverse = {v: k for k, v in _ROW_FIELD_MAP.items()}
        out["operator"]["capacity_table"] = {
            f"{j}_{m}": {rk: getattr(row, f) for f, rk in reverse.items()}
            for (j, m), row in op.capacity_table.rows.items()
        }
    if scenario.run.fixed_mvc_nm:
        out["run"]["fixed_mvc_nm"] = dict(scenario.run.fixed_mvc_nm)
    return out


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# run orchestration
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    trace: FatigueTrace
    summary: dict
    profile: fatigue.CycleProfile


def _policy_for_mode(run: RunSpec):
    if run.mode == "quasistatic":
        return None
    if run.mode == "static_min_mvc":
        return "min_over_cycle"
    return dict(run.fixed_mvc_nm)


def run(scenario: Scenario) -> RunResult:
    """Full pipeline: kinematics, dynamics, capacity, fatigue, summary."""
    profile = profile_from_scenario(scenario, mvc_policy=_policy_for_mode(scenario.run))
    duration = scenario.run.duration_s
    trace = trace_from_profile(profile, duration)

    crossings = detect_risk_crossing(profile, horizon=duration)
    end_states = group_states_at(profile, profile.schedule.t0 + duration)
    flagged = sorted(
        g
        for g, frac in profile.opposing_fraction.items()
        if frac > fatigue.OPPOSING_SIGN_FLAG_FRACTION
    )
    summary = {
        "mode": scenario.run.mode,
        "duration_s": duration,
        "dt_s": scenario.run.dt_s,
        "crossing_time_s": {j: crossings[j] for j in ("shoulder", "elbow")},
        "group_crossing_time_s": crossings["groups"],
        "cycle_exponent_increments": dict(profile.increments),
        "initial_capacity_nm": dict(profile.mvc0),
        "final_capacity_nm": {g: end_states[g].gamma_cem for g in GROUPS},
        "final_exponent": {g: end_states[g].accumulated_exponent for g in GROUPS},
        "opposing_sign_fraction": dict(profile.opposing_fraction),
        "opposing_sign_flags": flagged,
    }
    return RunResult(trace=trace, summary=summary, profile=profile)


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(trace: FatigueTrace, destination) -> None:
    """Write the trace as CSV; identical traces produce identical bytes."""
    columns = {
        "t_s": trace.t_s,
        "phase": trace.phase,
        "theta_s_rad": trace.theta_s_rad,
        "theta_e_rad": trace.theta_e_rad,
        "gamma_joint_shoulder_nm": trace.gamma_joint_shoulder_nm,
        "gamma_joint_elbow_nm": trace.gamma_joint_elbow_nm,
        "gamma_mvc_shoulder_nm": trace.gamma_mvc_shoulder_nm,
        "gamma_mvc_elbow_nm": trace.gamma_mvc_elbow_nm,
        "gamma_cem_shoulder_nm": trace.gamma_cem_shoulder_nm,
        "gamma_cem_elbow_nm": trace.gamma_cem_elbow_nm,
        "gamma_cem_shoulder_flexor_nm": trace.gamma_cem_groups["shoulder_flexor"],
        "gamma_cem_shoulder_extensor_nm": trace.gamma_cem_groups["shoulder_extensor"],
        "gamma_cem_elbow_flexor_nm": trace.gamma_cem_groups["elbow_flexor"],
        "gamma_cem_elbow_extensor_nm": trace.gamma_cem_groups["elbow_extensor"],
    }
    lines = [",".join(TRACE_COLUMNS)]
    series = [columns[c] for c in TRACE_COLUMNS]
    for row in zip(*series):
        lines.append(",".join(_format_value(v) for v in row))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def write_summary_json(summary: dict, destination) -> None:
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# grid sweep
# ---------------------------------------------------------------------------

OBJECTIVES = ("max_time_to_risk", "min_total_exponent")

# grid fields sweepable via cartesian product, mapped to scenario paths
_GRID_FIELDS = {
    "p0_m": ("task", "p0_m"),
    "pf_m": ("task", "pf_m"),
    "push_force_n": ("task", "push_force_n"),
    "pull_force_n": ("task", "pull_force_n"),
    "t_push_s": ("task", "t_push_s"),
    "t_pull_s": ("task", "t_pull_s"),
}


@dataclass
class SweepGrid:
    """Task-configuration candidates and the ranking objective.

    Either ``cells`` lists explicit override mappings (scenario paths like
    ``"task.p0_m"`` to values), or per-field candidate lists are combined
    by cartesian product.
    """

    objective: str
    cells: list = field(default_factory=list)

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"must be one of {OBJECTIVES}", field="objective")
        if not self.cells:
            raise ValidationError("grid has no cells", field="cells")


def load_grid(text: str) -> SweepGrid:
    """Parse a sweep-grid JSON document into explicit cells."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("grid document must be a JSON object")
    _require_keys(
        data, "grid", {"objective"}, {"cells"} | set(_GRID_FIELDS)
    )
    objective = data["objective"]

    explicit = data.get("cells")
    field_lists = {k: data[k] for k in _GRID_FIELDS if k in data}
    if explicit is not None and field_lists:
        raise SchemaError("grid: give either 'cells' or per-field lists, not both")

    if explicit is not None:
        if not isinstance(explicit, list) or not explicit:
            raise ValidationError("must be a non-empty array", field="cells")
        cells = []
        for i, cell in enumerate(explicit):
            if not isinstance(cell, dict):
                raise ValidationError("must be an object", field=f"cells[{i}]")
            for key in cell:
                parts = key.split(".")
                if len(parts) != 2 or parts[1] not in _GRID_FIELDS:
                    raise SchemaError(f"cells[{i}]: unknown override {key!r}")
            cells.append(dict(cell))
        return SweepGrid(objective=objective, cells=cells)

    if not field_lists:
        raise SchemaError("grid: needs 'cells' or at least one per-field list")
    for key, values in field_lists.items():
        if not isinstance(values, list) or not values:
            raise ValidationError("must be a non-empty array", field=key)
    names = sorted(field_lists)
    cells = []
    for combo in product(*(field_lists[n] for n in names)):
        cells.append(
            {f"{_GRID_FIELDS[n][0]}.{n}": v for n, v in zip(names, combo)}
        )
    return SweepGrid(objective=objective, cells=cells)


def load_grid_file(path) -> SweepGrid:
    return load_grid(Path(path).read_text(encoding="utf-8"))


def _apply_overrides(base: Scenario, overrides: dict) -> Scenario:
    data = scenario_to_dict(base)
    for key, value in overrides.items():
        section, name = key.split(".")
        data[section][name] = value
    return scenario_from_dict(data)


@dataclass
class SweepCellResult:
    index: int
    overrides: dict
    status: str  # "ok" | "failed"
    objective_value: float | None = None
    crossing_time_s: dict | None = None
    group_crossing_time_s: dict | None = None
    increments: dict | None = None
    error: str | None = None


def sweep(base: Scenario, grid: SweepGrid) -> list:
    """Evaluate every grid cell and rank by the objective.

    Cells are independent; failures are recorded per cell and do not stop
    the sweep.  The returned list is ranked best-first, with failed cells
    last; ties and ordering are resolved by cell index, never by
    evaluation order.
    """
    results = []
    for index, overrides in enumerate(grid.cells):
        try:
            scenario = _apply_overrides(base, overrides)
            profile = profile_from_scenario(
                scenario, mvc_policy=_policy_for_mode(scenario.run)
            )
            crossings = detect_risk_crossing(profile, horizon=scenario.run.duration_s)
            total_exponent = float(sum(profile.increments.values()))
            if grid.objective == "max_time_to_risk":
                joint_times = [
                    crossings[j] for j in ("shoulder", "elbow") if crossings[j] is not None
                ]
                value = min(joint_times) if joint_times else math.inf
            else:
                value = total_exponent
            results.append(
                SweepCellResult(
                    index=index,
                    overrides=dict(overrides),
                    status="ok",
                    objective_value=value,
                    crossing_time_s={j: crossings[j] for j in ("shoulder", "elbow")},
                    group_crossing_time_s=dict(crossings["groups"]),
                    increments=dict(profile.increments),
                )
            )
        except Exception as exc:  # record and continue; cell errors are isolated
            results.append(
                SweepCellResult(
                    index=index,
                    overrides=dict(overrides),
                    status="failed",
                    error=f"{type(exc).__name__}: {exc}",
                )
            )

    def sort_key(cell: SweepCellResult):
        if cell.status != "ok":
            return (1, 0.0, cell.index)
        if grid.objective == "max_time_to_risk":
            return (0, -cell.objective_value, cell.index)
        return (0, cell.objective_value, cell.index)

    return sorted(results, key=sort_key)


def write_sweep_csv(results: list, destination) -> None:
    header = [
        "rank",
        "cell_index",
        "status",
        "objective_value",
        "overrides",
        "crossing_shoulder_s",
        "crossing_elbow_s",
        "error",
    ]
    lines = [",".join(header)]
    for rank, cell in enumerate(results):
        overrides = json.dumps(cell.overrides, sort_keys=True).replace('"', "'")
        crossings = cell.crossing_time_s or {}
        row = [
            str(rank),
            str(cell.index),
            cell.status,
            "" if cell.objective_value is None else _format_value(cell.objective_value),
            f'"{overrides}"',
            "" if crossings.get("shoulder") is None else _format_value(crossings["shoulder"]),
            "" if crossings.get("elbow") is None else _format_value(crossings["elbow"]),
            "" if cell.error is None else f'"{cell.error}"',
        ]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")
