"""Flat-file formats: CSV with `# key=value` metadata headers, JSON manifests.

Floats are written with repr (shortest round-trip), so re-ingesting a file
reproduces the original values bit for bit.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {k}={_fmt(v)}" for k, v in meta.items()]


def write_table(path, columns: dict[str, np.ndarray], meta: dict) -> None:
    """CSV with metadata comment lines, a header row, and repr-exact floats."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("all columns must have the same length")
    lines = _meta_lines(meta)
    lines.append(",".join(names))
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[dict, dict[str, np.ndarray]]:
    meta: dict = {}
    rows: list[str] = []
    header: list[str] | None = None
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        rows.append(line)
    if header is None:
        raise ValueError(f"{path}: no header row found")
    raw = [r.split(",") for r in rows]
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in raw]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return meta, cols


def write_points(path, points: np.ndarray, meta: dict) -> None:
    """One coordinate per line after the metadata comments (no header row)."""
    lines = _meta_lines(meta)
    lines.extend(repr(float(p)) for p in np.asarray(points).tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def read_points(path) -> tuple[dict, np.ndarray]:
    meta: dict = {}
    vals: list[float] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        vals.append(float(line))
    return meta, np.asarray(vals)


def write_manifest(
    path, command: str, parameters: dict, master_seed: int, output_files: list[str],
    tool_version: str,
) -> None:
    doc = {
        "command": command,
        "parameters": {k: (_fmt(v) if isinstance(v, (np.floating, np.integer)) else v)
                       for k, v in parameters.items()},
        "master_seed": int(master_seed),
        "tool_version": tool_version,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "output_files": [str(f) for f in output_files],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def manifest_path(out_path) -> Path:
    p = Path(out_path)
    return p.with_suffix(p.suffix + ".manifest.json") if p.suffix != ".csv" \
        else p.with_name(p.stem + ".manifest.json")


def eprint(*args) -> None:
    print(*args, file=sys.stderr)
