"""Report figures rendered to files alongside the trace CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fatigue import GROUPS, FatigueTrace

# keep full-horizon line plots below this many points per series
_MAX_POINTS = 20_000

_JOINT_SERIES = {
    "shoulder": ("gamma_joint_shoulder_nm", "gamma_cem_shoulder_nm", "gamma_mvc_shoulder_nm"),
    "elbow": ("gamma_joint_elbow_nm", "gamma_cem_elbow_nm", "gamma_mvc_elbow_nm"),
}


def _decimate(*arrays):
    n = len(arrays[0])
    step = max(1, n // _MAX_POINTS)
    return [a[::step] for a in arrays]


def _first_cycle_slice(trace: FatigueTrace) -> slice:
    phase = trace.phase
    if len(phase) == 0:
        return slice(0, 0)
    first = phase[0]
    changed = np.flatnonzero(phase != first)
    if changed.size == 0:
        return slice(0, len(phase))
    back = np.flatnonzero(phase[changed[0]:] == first)
    if back.size == 0:
        return slice(0, len(phase))
    return slice(0, changed[0] + back[0] + 1)


def figure_capacity_vs_demand(trace: FatigueTrace, path) -> Path:
    """Full-horizon available torque versus demanded torque, per joint."""
    fig, axes = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
    for ax, joint in zip(axes, ("shoulder", "elbow")):
        dem_col, cem_col, _ = _JOINT_SERIES[joint]
        t, dem, cem = _decimate(
            trace.t_s / 60.0, getattr(trace, dem_col), getattr(trace, cem_col)
        )
        ax.plot(t, cem, lw=0.8, label="available torque")
        ax.plot(t, dem, lw=0.8, label="demanded torque")
        ax.set_ylabel(f"{joint} torque [N m]")
        ax.legend(loc="upper right", fontsize=8)
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("time [min]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def figure_cycle_torques(trace: FatigueTrace, path) -> Path:
    """Demanded joint torques over the first cycle."""
    sl = _first_cycle_slice(trace)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(trace.t_s[sl], trace.gamma_joint_shoulder_nm[sl], label="shoulder")
    ax.plot(trace.t_s[sl], trace.gamma_joint_elbow_nm[sl], label="elbow")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("demanded torque [N m]")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def figure_cycle_capacity(trace: FatigueTrace, path) -> Path:
    """Active-group maximal torque over the first cycle (jump at phase change)."""
    sl = _first_cycle_slice(trace)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(trace.t_s[sl], trace.gamma_mvc_shoulder_nm[sl], label="shoulder")
    ax.plot(trace.t_s[sl], trace.gamma_mvc_elbow_nm[sl], label="elbow")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("maximal voluntary torque [N m]")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def figure_group_capacities(trace: FatigueTrace, path) -> Path:
    """Per-group capacity decay over the full horizon."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for group in GROUPS:
        t, cem = _decimate(trace.t_s / 60.0, trace.gamma_cem_groups[group])
        ax.plot(t, cem, lw=0.9, label=group.replace("_", " "))
    ax.set_xlabel("time [min]")
    ax.set_ylabel("group capacity [N m]")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_report(trace: FatigueTrace, outdir, stem: str = "trace") -> list:
    """Render the full figure set into ``outdir``; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if len(trace) == 0:
        return []
    return [
        figure_capacity_vs_demand(trace, outdir / f"{stem}_capacity_vs_demand.png"),
        figure_cycle_torques(trace, outdir / f"{stem}_cycle_torques.png"),
        figure_cycle_capacity(trace, outdir / f"{stem}_cycle_capacity.png"),
        figure_group_capacities(trace, outdir / f"{stem}_group_capacities.png"),
    ]
