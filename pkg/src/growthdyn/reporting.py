"""Deterministic text rendering of trajectories and reports.

Every float is printed with 17 significant digits, enough to round-trip a
double exactly, so repeated runs with the same inputs produce identical
bytes. JSON rendering is a small recursive emitter because the standard
encoder does not expose float formatting; non-finite floats become null
in JSON and 'nan'/'inf' in CSV.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .solvers import Trajectory

__all__ = ["fmt17", "json17_dumps", "trajectory_csv", "plot_csv", "sanitize"]


def fmt17(x: float) -> str:
    """A float with 17 significant digits."""
    return format(float(x), ".17g")


def sanitize(obj):
    """Recursively convert numpy containers and map non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [sanitize(obj.real), sanitize(obj.imag)]
    return obj


def json17_dumps(obj, indent: int = 2) -> str:
    """Serialise to JSON with 17-significant-digit floats and stable layout."""
    out = []
    _emit(sanitize(obj), out, indent, 0)
    out.append("\n")
    return "".join(out)


def _emit(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    closing = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt17(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad)
            out.append(json.dumps(str(k)))
            out.append(": ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory with the fixed header t,p_1,...,p_N,mean_fitness,energy,sum_drift."""
    n = traj.n
    header = "t," + ",".join(f"p_{i + 1}" for i in range(n)) + ",mean_fitness,energy,sum_drift"
    lines = [header]
    for row in range(traj.times.shape[0]):
        cells = [fmt17(traj.times[row])]
        cells.extend(fmt17(v) for v in traj.states[row])
        cells.append(fmt17(traj.mean_fitness[row]))
        cells.append(fmt17(traj.energy[row]))
        cells.append(fmt17(traj.sum_drift[row]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def plot_csv(traj: Trajectory) -> str:
    """Plot-ready columns only: t and the coordinates."""
    n = traj.n
    header = "t," + ",".join(f"p_{i + 1}" for i in range(n))
    lines = [header]
    for row in range(traj.times.shape[0]):
        cells = [fmt17(traj.times[row])]
        cells.extend(fmt17(v) for v in traj.states[row])
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
