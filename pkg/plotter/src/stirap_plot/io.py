"""Readers for the pulse-design tool's CSV and JSON contracts.

Everything plotted must originate in an input file; these readers parse
and validate but never compute any dynamics.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ["t", "theta", "X", "Y", "Z", "pop1", "pop2", "pop3"]
SWEEP_COLUMNS = ["method", "gamma", "duration", "efficiency", "spring_cost", "valid"]
CONTOUR_COLUMNS = ["t1", "t2", "efficiency", "valid"]


class PlotDataError(ValueError):
    """Bad or missing plot input data."""


class MissingColumnError(PlotDataError):
    pass


class HeaderMismatchError(PlotDataError):
    pass


def _read_rows(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotDataError(f"{path}: empty file")
        rows = list(reader)
    if not rows:
        raise PlotDataError(f"{path}: no data rows")
    return list(reader.fieldnames), rows


def read_trajectory(path) -> dict[str, np.ndarray]:
    """Load a spin-trajectory CSV into column arrays."""
    header, rows = _read_rows(path)
    missing = [c for c in TRAJECTORY_COLUMNS if c not in header]
    if missing:
        raise MissingColumnError(f"{path}: missing columns {missing}")
    return {
        c: np.array([float(r[c]) for r in rows]) for c in TRAJECTORY_COLUMNS
    }


def read_sweep(path) -> list[dict]:
    """Load sweep records; efficiency is None for invalid rows."""
    header, rows = _read_rows(path)
    if header != SWEEP_COLUMNS:
        raise HeaderMismatchError(
            f"{path}: header {header} does not match {SWEEP_COLUMNS}"
        )
    out = []
    for r in rows:
        valid = r["valid"] == "ok"
        out.append(
            {
                "method": r["method"],
                "gamma": float(r["gamma"]),
                "duration": float(r["duration"]),
                "efficiency": float(r["efficiency"]) if valid else None,
                "valid": r["valid"],
            }
        )
    return out


def read_overlay(path) -> list[dict]:
    """External baseline series: needs duration and efficiency columns."""
    header, rows = _read_rows(path)
    missing = [c for c in ("duration", "efficiency") if c not in header]
    if missing:
        raise MissingColumnError(f"{path}: missing columns {missing}")
    return [
        {"duration": float(r["duration"]), "efficiency": float(r["efficiency"])}
        for r in rows
    ]


def read_contour(path) -> list[dict]:
    header, rows = _read_rows(path)
    if header != CONTOUR_COLUMNS:
        raise HeaderMismatchError(
            f"{path}: header {header} does not match {CONTOUR_COLUMNS}"
        )
    out = []
    for r in rows:
        valid = r["valid"] == "ok"
        out.append(
            {
                "t1": float(r["t1"]),
                "t2": float(r["t2"]),
                "efficiency": float(r["efficiency"]) if valid else None,
                "valid": r["valid"],
            }
        )
    return out


def read_sequence(path) -> dict:
    """Load a solve JSON: either a kick sequence or polynomial coefficients."""
    data = json.loads(Path(path).read_text())
    if "kind" not in data and "degree" not in data:
        raise PlotDataError(
            f"{path}: neither a pulse-sequence nor a polynomial-control JSON"
        )
    return data


def impulse_schedule(sequence: dict) -> list[tuple[float, float]]:
    """(time, magnitude) pairs declared by a pulse-sequence JSON.

    Kick instants follow from the sequence structure: the first and last
    kicks sit at the endpoints, and the optimal variant adds kicks at the
    declared switch times.  Polynomial JSONs declare no kicks.
    """
    if "kind" not in sequence:
        return []
    duration = float(sequence["duration"])
    if sequence["kind"] == "suboptimal":
        return [(0.0, float(sequence["v1"])), (duration, float(sequence["v2"]))]
    return [
        (0.0, float(sequence["v1"])),
        (float(sequence["t1"]), float(sequence["v2"])),
        (float(sequence["t2"]), float(sequence["v3"])),
        (duration, float(sequence["v4"])),
    ]
