"""Loading and validation of a run directory's artifacts.

Reads only the documented file schemas (report.json, points.csv,
snapshots.csv, events.jsonl, common_path.csv); never recomputes physics.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

SUPPORTED_SCHEMA = 1


class SchemaMismatch(Exception):
    """report.json carries an unsupported schema version."""


class MissingArtifact(Exception):
    """A file required for the requested rendering is absent."""


@dataclass
class Snapshots:
    times: np.ndarray        # (S,) distinct snapshot times
    particles: np.ndarray    # (rows,)
    t: np.ndarray            # (rows,)
    x: np.ndarray            # (rows, d)
    v: np.ndarray            # (rows, d)
    d: int

    def at_time(self, t: float):
        mask = self.t == t
        return self.x[mask], self.v[mask]


@dataclass
class RunArtifacts:
    run_dir: Path
    report: dict
    points: Optional[np.ndarray] = None          # columns N, mean, se
    snapshots: Optional[Snapshots] = None
    events: list = field(default_factory=list)

    @property
    def experiment(self) -> str:
        return self.report.get("experiment", "unknown")

    @property
    def criteria(self) -> list:
        return self.report.get("criteria", [])


def _read_points(path: Path) -> np.ndarray:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"N", "mean", "se"}:
        raise MissingArtifact(f"{path} does not match the N,mean,se schema")
    return np.array([[float(r["N"]), float(r["mean"]), float(r["se"])]
                     for r in rows])


def _read_snapshots(path: Path) -> Snapshots:
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["t", "particle"]:
            raise MissingArtifact(f"{path} does not match the snapshot schema")
        d = sum(1 for h in header if h.startswith("x"))
        data = np.array([[float(c) for c in row] for row in reader])
    if data.size == 0:
        raise MissingArtifact(f"{path} holds no snapshot rows")
    return Snapshots(times=np.unique(data[:, 0]), particles=data[:, 1],
                     t=data[:, 0], x=data[:, 2:2 + d], v=data[:, 2 + d:2 + 2 * d],
                     d=d)


def _read_events(path: Path) -> list:
    events = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return events


def load_run(run_dir: str | Path) -> RunArtifacts:
    """Parse whatever documented artifacts the run directory holds.

    report.json is mandatory and its schema version must match; the other
    files are optional (experiments write different subsets).
    """
    run_dir = Path(run_dir)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        raise MissingArtifact(f"{run_dir} has no report.json")
    with open(report_path) as fh:
        report = json.load(fh)
    version = report.get("schema_version")
    if version != SUPPORTED_SCHEMA:
        raise SchemaMismatch(
            f"report schema {version!r} unsupported (expected {SUPPORTED_SCHEMA})")
    art = RunArtifacts(run_dir=run_dir, report=report)
    points_path = run_dir / "points.csv"
    if points_path.exists():
        art.points = _read_points(points_path)
    snap_path = run_dir / "snapshots.csv"
    if snap_path.exists():
        art.snapshots = _read_snapshots(snap_path)
    events_path = run_dir / "events.jsonl"
    if events_path.exists():
        art.events = _read_events(events_path)
    return art
