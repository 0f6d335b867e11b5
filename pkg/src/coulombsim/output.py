"""CSV/JSON emission with manifest sidecars.

Every emitted number is finite; undefined entries (censored, SNR with zero
spread, zero-sigma normalizations) become empty CSV fields / JSON nulls.
Float formatting uses shortest round-trip repr, so identical results give
byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .ensemble import MomentSeries

_MANIFEST_LINE = "# manifest: manifest.json\n"

SERIES_COLUMNS = (
    "t",
    "mean_z1", "std_z1", "mean_p1", "std_p1",
    "mean_z2", "std_z2", "mean_p2", "std_p2",
    "se_mean_z1", "se_std_z1", "se_mean_p1", "se_std_p1",
    "se_mean_z2", "se_std_z2", "se_mean_p2", "se_std_p2",
    "snr_p2", "se_snr_p2", "snr_p2_lo", "snr_p2_hi", "n_alive",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if not math.isfinite(v):
        return ""
    return repr(v)


def _series_rows(series: MomentSeries):
    for i in range(series.times.size):
        row = [series.times[i]]
        for v in range(4):
            row.extend((series.mean[i, v], series.std[i, v]))
        for v in range(4):
            row.extend((series.se_mean[i, v], series.se_std[i, v]))
        row.extend((series.snr_p2[i], series.se_snr[i],
                    series.snr_lo[i], series.snr_hi[i],
                    int(series.n_alive[i])))
        yield row


def write_series_csv(path, series: MomentSeries):
    with open(path, "w") as fh:
        fh.write(_MANIFEST_LINE)
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for row in _series_rows(series):
            fh.write(",".join(_fmt(x) for x in row) + "\n")


NORMALIZED_COLUMNS = ("t", "mean_z1_norm", "std_z1_norm", "mean_p1_norm",
                      "std_p1_norm", "mean_z2_norm", "std_z2_norm",
                      "mean_p2_norm", "std_p2_norm", "snr_p2")


def write_normalized_csv(path, series: MomentSeries):
    """Series rescaled by the configured initial spread of each variable."""
    sigma0 = series.initial_sigma
    with open(path, "w") as fh:
        fh.write(_MANIFEST_LINE)
        fh.write(",".join(NORMALIZED_COLUMNS) + "\n")
        for i in range(series.times.size):
            row = [series.times[i]]
            for v in range(4):
                if sigma0[v] > 0:
                    row.extend((series.mean[i, v] / sigma0[v],
                                series.std[i, v] / sigma0[v]))
                else:
                    row.extend((math.nan, math.nan))
            row.append(series.snr_p2[i])
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_raw_csv(path, series: MomentSeries):
    if series.raw_trajectories is None:
        raise ValueError("series holds no raw trajectories")
    with open(path, "w") as fh:
        fh.write(_MANIFEST_LINE)
        fh.write("traj,t,z1,p1,z2,p2\n")
        raw = series.raw_trajectories
        for k in range(raw.shape[0]):
            for i in range(series.times.size):
                row = [int(k), series.times[i], raw[k, i, 0], raw[k, i, 1],
                       raw[k, i, 2], raw[k, i, 3]]
                fh.write(",".join(_fmt(x) for x in row) + "\n")


SWEEP_COLUMNS = ("param", "value", "crossed", "t_star", "p_at", "sigma_at",
                 "snr_at", "censored_fraction", "status")


def write_sweep_csv(path, rows: list[dict]):
    with open(path, "w") as fh:
        fh.write(_MANIFEST_LINE)
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(
                str(row[c]) if c in ("param", "status")
                else _fmt(row[c]) for c in SWEEP_COLUMNS) + "\n")


ORACLE_COLUMNS = ("t", "mean_p2", "snr", "status")


def write_oracle_csv(path, rows: list[dict]):
    with open(path, "w") as fh:
        fh.write(_MANIFEST_LINE)
        fh.write(",".join(ORACLE_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(
                str(row[c]) if c == "status" else _fmt(row[c])
                for c in ORACLE_COLUMNS) + "\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def series_to_dict(series: MomentSeries) -> dict:
    """Column dict matching the CSV schema (undefined entries become None)."""
    rows = list(_series_rows(series))
    return {name: [_jsonable(row[j]) for row in rows]
            for j, name in enumerate(SERIES_COLUMNS)}


def write_series_json(path, series: MomentSeries):
    payload = {"columns": series_to_dict(series), "manifest": "manifest.json"}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def write_sweep_json(path, rows: list[dict]):
    payload = {"rows": [_jsonable(r) for r in rows],
               "manifest": "manifest.json"}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def write_manifest(path, manifest: dict):
    with open(path, "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_manifest(resolved: dict, metadata: dict, wall_clock_s: float,
                   code_version: str) -> dict:
    return {
        "config": resolved,
        "run": metadata,
        "wall_clock_s": wall_clock_s,
        "code_version": code_version,
    }


def ensure_outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
