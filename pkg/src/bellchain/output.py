"""Delimited/JSON writers and the run manifest.

Every data file is written with full double precision (17 significant
digits) and a versioned schema line, and is accompanied by a separate
manifest JSON recording the fully resolved configuration, the convention
actually used, wall-clock time and the per-check summary.  Re-running a
command with the manifest's configuration reproduces the data files
byte for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SCHEMA_PREFIX = "bellchain"

CURVE_COLUMNS = [
    "t",
    "tJ",
    "tJ_over_N",
    "i_ch",
    "gnn_abs2",
    "g1n_abs2",
    "re_gnn",
    "violation_flag",
]
SWEEP_COLUMNS = ["n_sites", "mu_over_j"] + CURVE_COLUMNS
CONJECTURE_COLUMNS = ["n_sites", "max_abs_deviation", "within_tolerance"]


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: Path, schema: str, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(f"# {SCHEMA_PREFIX}-csv-schema: {schema}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])


def write_json_rows(path: Path, schema: str, rows: list[dict], manifest: dict) -> None:
    payload = {"schema": f"{SCHEMA_PREFIX}.{schema}", "manifest": manifest, "rows": rows}
    write_json(path, payload)


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write("\n")


def manifest_path(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")


def build_manifest(
    subcommand: str,
    config: dict,
    version: str,
    convention_used: str | None,
    wall_clock_s: float,
    checks: dict,
    data_files: list[str],
    extra: dict | None = None,
) -> dict:
    manifest = {
        "schema": f"{SCHEMA_PREFIX}.manifest/v1",
        "subcommand": subcommand,
        "config": config,
        "toolkit_version": version,
        "convention_used": convention_used,
        "wall_clock_s": wall_clock_s,
        "checks": checks,
        "data_files": data_files,
    }
    if extra:
        manifest.update(extra)
    return manifest
