"""Run artifacts: delimited trajectories, monitor curves, summaries, figures.

CSV cells use shortest-round-trip float formatting, so identical runs
produce byte-identical files. Figures are rendered headlessly to PNG next
to the delimited output.
"""

from __future__ import annotations

import json
import pathlib

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "write_trajectory_csv",
    "write_monitor_csv",
    "write_summary_json",
    "render_state_figure",
    "render_series_figure",
    "jsonable",
]


def _fmt(value):
    return format(float(value), ".17g")


def write_trajectory_csv(path, traj):
    """Rows (t, node, coord_0..coord_{m-1}) for every sample and node."""
    path = pathlib.Path(path)
    m = traj.m
    header = "t,node," + ",".join(f"coord_{c}" for c in range(m))
    lines = [header]
    for t, X in zip(traj.times, traj.states):
        for i in range(traj.n):
            lines.append(_fmt(t) + f",{i}," + ",".join(_fmt(v) for v in X[i]))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_monitor_csv(path, times, series):
    """One monitor as (t, value) rows, or (t, value_0..value_{k-1}) if vector."""
    path = pathlib.Path(path)
    series = np.asarray(series)
    if series.ndim == 1:
        header = "t,value"
        rows = (f"{_fmt(t)},{_fmt(v)}" for t, v in zip(times, series))
    else:
        header = "t," + ",".join(f"value_{c}" for c in range(series.shape[1]))
        rows = (
            _fmt(t) + "," + ",".join(_fmt(v) for v in vec)
            for t, vec in zip(times, series)
        )
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


def jsonable(value):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def write_summary_json(path, payload):
    path = pathlib.Path(path)
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def render_state_figure(path, traj, title="node states"):
    """One subplot per coordinate, one curve per node."""
    path = pathlib.Path(path)
    m, n = traj.m, traj.n
    fig, axes = plt.subplots(m, 1, sharex=True, figsize=(7.0, 2.2 * m), squeeze=False)
    for c in range(m):
        ax = axes[c][0]
        for i in range(n):
            ax.plot(traj.times, traj.states[:, i, c], label=f"node {i}")
        ax.set_ylabel(f"coord {c}")
        ax.grid(True, alpha=0.3)
    axes[-1][0].set_xlabel("t")
    axes[0][0].set_title(title)
    axes[0][0].legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_series_figure(path, title, curves, logy=None):
    """Plot labeled (times, values) curves; vector series get one curve per column.

    ``logy`` of None picks a log axis when all values are positive and the
    dynamic range is wide.
    """
    path = pathlib.Path(path)
    flat = []
    for label, times, values in curves:
        values = np.asarray(values)
        if values.ndim == 1:
            flat.append((label, times, values))
        else:
            for c in range(values.shape[1]):
                flat.append((f"{label}[{c}]", times, values[:, c]))
    if logy is None:
        lows = [v.min() for _, _, v in flat if v.size]
        highs = [v.max() for _, _, v in flat if v.size]
        logy = bool(lows and min(lows) > 0 and max(highs) / min(lows) > 1e2)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for label, times, values in flat:
        ax.plot(times, values, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(flat) <= 12:
        ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
