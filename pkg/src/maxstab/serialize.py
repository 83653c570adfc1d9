"""Lossless text formats for simulated paths.

CSV values are written with 17 significant digits, which pins every
binary64 number exactly, so parsing a written file recovers the original
floats bit for bit.  JSON documents rely on the shortest exact decimal
representation for the same guarantee.
"""

from __future__ import annotations

import json

import numpy as np

from .continuous import CadlagPath, path_value
from .maxar import Direction, DiscretePath, MaxARParams

__all__ = [
    "format_float",
    "discrete_csv_text",
    "parse_discrete_csv",
    "discrete_json_text",
    "parse_discrete_json",
    "continuous_csv_text",
    "parse_continuous_csv",
    "continuous_json_text",
    "parse_continuous_json",
]

DISCRETE_CSV_HEADER = "t,value"
CONTINUOUS_CSV_HEADER = "time,value,is_event"


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _seed_field(seed):
    return None if seed is None else [int(seed[0]), int(seed[1])]


def _parse_seed(field):
    if field is None:
        return None
    return (int(field[0]), int(field[1]))


def discrete_csv_text(path: DiscretePath) -> str:
    lines = [DISCRETE_CSV_HEADER]
    for t, v in zip(path.times, path.values):
        lines.append(f"{int(t)},{format_float(v)}")
    return "\n".join(lines) + "\n"


def parse_discrete_csv(text: str):
    """Parse the discrete CSV format into (start_index, values).

    The header must match exactly and the indices must be consecutive
    integers; malformed input raises ValueError naming the offending line.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != DISCRETE_CSV_HEADER:
        raise ValueError(
            f"line 1: expected header {DISCRETE_CSV_HEADER!r}")
    if len(lines) < 2:
        raise ValueError("no data rows")
    indices = []
    values = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {i}: expected two comma-separated fields")
        try:
            indices.append(int(parts[0]))
            values.append(float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"line {i}: {exc}") from exc
    start = indices[0]
    if indices != list(range(start, start + len(indices))):
        raise ValueError("indices must be consecutive integers")
    return start, np.asarray(values, dtype=np.float64)


def discrete_json_text(path: DiscretePath) -> str:
    doc = {
        "kind": "discrete-path",
        "a": float(path.params.a),
        "direction": path.params.direction.value,
        "start_index": int(path.start_index),
        "seed": _seed_field(path.seed),
        "values": [float(v) for v in path.values],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_discrete_json(text: str) -> DiscretePath:
    doc = json.loads(text)
    if doc.get("kind") != "discrete-path":
        raise ValueError("field 'kind': expected 'discrete-path'")
    params = MaxARParams(float(doc["a"]), Direction(doc["direction"]))
    return DiscretePath(int(doc["start_index"]),
                        np.asarray(doc["values"], dtype=np.float64),
                        params, _parse_seed(doc.get("seed")))


def continuous_csv_text(path: CadlagPath) -> str:
    """Rows time,value,is_event: the anchor row, one row per event, and a
    closing row with the left-limit value at the window end."""
    t0, t1 = path.window
    lines = [CONTINUOUS_CSV_HEADER,
             f"{format_float(t0)},{format_float(path.anchor_value)},0"]
    for tt, vv in path.events:
        lines.append(f"{format_float(tt)},{format_float(vv)},1")
    lines.append(f"{format_float(t1)},{format_float(path_value(path, t1))},0")
    return "\n".join(lines) + "\n"


def parse_continuous_csv(text: str):
    """Parse the continuous CSV format into (times, values, is_event)
    arrays; the decay rate is not stored in CSV, so rebuilding a full path
    object requires the JSON format instead."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CONTINUOUS_CSV_HEADER:
        raise ValueError(
            f"line 1: expected header {CONTINUOUS_CSV_HEADER!r}")
    if len(lines) < 3:
        raise ValueError("need at least the anchor and closing rows")
    times, values, flags = [], [], []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ValueError(f"line {i}: expected three comma-separated fields")
        try:
            times.append(float(parts[0]))
            values.append(float(parts[1]))
            flag = int(parts[2])
        except ValueError as exc:
            raise ValueError(f"line {i}: {exc}") from exc
        if flag not in (0, 1):
            raise ValueError(f"line {i}: is_event must be 0 or 1")
        flags.append(flag)
    times = np.asarray(times, dtype=np.float64)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    if flags[0] != 0 or flags[-1] != 0:
        raise ValueError("first and last rows must be the anchor and close "
                         "markers (is_event=0)")
    return times, np.asarray(values, dtype=np.float64), np.asarray(flags)


def continuous_json_text(path: CadlagPath) -> str:
    doc = {
        "kind": "continuous-path",
        "a": float(path.a),
        "direction": path.direction.value,
        "window": [float(path.window[0]), float(path.window[1])],
        "anchor_value": float(path.anchor_value),
        "seed": _seed_field(path.seed),
        "events": [[float(t), float(v)] for t, v in path.events],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_continuous_json(text: str) -> CadlagPath:
    doc = json.loads(text)
    if doc.get("kind") != "continuous-path":
        raise ValueError("field 'kind': expected 'continuous-path'")
    return CadlagPath(
        float(doc["a"]), Direction(doc["direction"]),
        (float(doc["window"][0]), float(doc["window"][1])),
        float(doc["anchor_value"]),
        tuple((float(t), float(v)) for t, v in doc["events"]),
        _parse_seed(doc.get("seed")))
