"""CSV/JSON serialization for sweep and trajectory results.

CSV files carry a ``#``-prefixed metadata header (one ``key = value`` pair
per line, enough to re-run the exact experiment) followed by an RFC-4180
style table.  JSON files carry the same content as ``{"meta": ..., "data":
...}``.  Formatting is fixed (repr-exact floats, fixed column order), so
identical inputs serialize byte-identically.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

import numpy as np


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _meta_lines(meta: Mapping) -> list[str]:
    lines = []
    for key in meta:
        lines.append(f"# {key} = {_fmt(meta[key])}")
    return lines


def write_csv(path, meta: Mapping, columns: list[str],
              rows: Iterable[Iterable]) -> None:
    lines = _meta_lines(meta)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, meta: Mapping, data: Mapping) -> None:
    payload = {"meta": _jsonable(meta), "data": _jsonable(data)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse a file written by `write_csv`; values stay as strings."""
    meta: dict = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if not columns:
                columns = line.split(",")
                continue
            rows.append(line.split(","))
    return meta, columns, rows
