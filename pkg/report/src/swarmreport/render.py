"""Render figures and a markdown summary from a run directory.

All numbers shown come straight from report.json (single source of truth);
nothing is recomputed. Numeric text is formatted with json.dumps so the
summary matches the report digit for digit. Output filenames are fixed:
scaling.png, boundary.png, trajectory.png, velocity.png, summary.md.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import MissingArtifact, RunArtifacts, SchemaMismatch, load_run

FIGSIZE = (7.0, 5.0)
DPI = 120


def _fmt(value) -> str:
    """Format a report value exactly as json.dump wrote it."""
    return json.dumps(value)


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_scaling(art: RunArtifacts, out_dir: Path) -> Path:
    if art.points is None:
        raise MissingArtifact("scaling figure needs points.csv")
    results = art.report.get("results", {})
    slope = results.get("slope")
    block = results.get("scaling") or results.get("coupling") or {}
    n, mean, se = art.points[:, 0], art.points[:, 1], art.points[:, 2]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.errorbar(n, mean, yerr=se, fmt="o", capsize=4, label="measured")
    if slope is not None and "intercept" in block:
        grid = np.geomspace(n.min(), n.max(), 64)
        ax.plot(grid, np.exp(block["intercept"]) * grid ** slope, "--",
                label=f"fit: slope {_fmt(slope)}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("mean")
    ax.set_title(f"{art.experiment}: decay vs system size")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, out_dir / "scaling.png")


def render_boundary(art: RunArtifacts, out_dir: Path) -> Path:
    results = art.report.get("results", {})
    observables = results.get("observables")
    if not observables:
        raise MissingArtifact("boundary figure needs boundary results in report.json")
    names = [o["name"] for o in observables]
    deltas = observables[0]["deltas"]
    width = 0.8 / (1 + len(deltas))
    xs = np.arange(len(names))
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.bar(xs, [o["jump_sum"] for o in observables], width,
           label="jump sum", color="black")
    for j, delta in enumerate(deltas):
        ax.bar(xs + (j + 1) * width, [o["fluxes"][j] for o in observables],
               width, label=f"layer flux, delta={delta}")
    ax.set_xticks(xs + 0.4)
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("boundary functional")
    ax.set_title("reflection jump sum vs thin-layer flux")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_dir / "boundary.png")


def render_trajectory(art: RunArtifacts, out_dir: Path, max_particles: int = 12) -> Path:
    if art.snapshots is None:
        raise MissingArtifact("trajectory figure needs snapshots.csv")
    snaps = art.snapshots
    if snaps.d != 2:
        raise MissingArtifact("trajectory figure is drawn for d = 2 runs")
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    shown = np.unique(snaps.particles)[:max_particles]
    for pid in shown:
        mask = snaps.particles == pid
        order = np.argsort(snaps.t[mask])
        path = snaps.x[mask][order]
        ax.plot(path[:, 0], path[:, 1], lw=0.8, alpha=0.8)
        ax.plot(path[-1, 0], path[-1, 1], "o", ms=3)
    hits = np.array([ev["x"] for ev in art.events
                     if ev["particle"] in set(int(p) for p in shown)])
    if hits.size:
        ax.plot(hits[:, 0], hits[:, 1], "rx", ms=5, label="reflections")
        ax.legend(loc="upper right")
    domain = art.report.get("config", {}).get("sim", {}).get("domain", {})
    theta = np.linspace(0, 2 * np.pi, 256)
    if domain.get("kind") == "ball":
        r = domain["radius"]
        ax.plot(r * np.cos(theta), r * np.sin(theta), "k-", lw=1.2)
    elif domain.get("kind") == "annulus":
        for r in (domain["r_in"], domain["r_out"]):
            ax.plot(r * np.cos(theta), r * np.sin(theta), "k-", lw=1.2)
    ax.set_aspect("equal")
    ax.set_xlabel("x0")
    ax.set_ylabel("x1")
    ax.set_title(f"trajectories ({len(shown)} of {int(snaps.particles.max()) + 1} particles)")
    return _save(fig, out_dir / "trajectory.png")


def render_velocity(art: RunArtifacts, out_dir: Path) -> Path:
    if art.snapshots is None:
        raise MissingArtifact("velocity figure needs snapshots.csv")
    snaps = art.snapshots
    x, v = snaps.at_time(float(snaps.times[-1]))
    speeds = np.linalg.norm(v, axis=1)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.hist(speeds, bins=max(8, min(40, len(speeds) // 8 + 1)),
            color="steelblue", edgecolor="black", alpha=0.8)
    ax.set_xlabel("|v| at final time")
    ax.set_ylabel("count")
    ax.set_title("terminal speed distribution")
    return _save(fig, out_dir / "velocity.png")


def write_summary(art: RunArtifacts, out_dir: Path, figures: list) -> Path:
    lines = [f"# Run summary: {art.experiment}", ""]
    lines.append(f"- schema version: {art.report.get('schema_version')}")
    lines.append(f"- run directory: `{art.run_dir.name}`")
    results = art.report.get("results", {})
    if "slope" in results:
        lines.append(f"- fitted log-log slope: {_fmt(results['slope'])}")
    if art.events:
        lines.append(f"- reflection events: {len(art.events)}")
    if "n_events" in results:
        lines.append(f"- reflection events: {_fmt(results['n_events'])}")
    lines.append("")
    crits = art.criteria
    if crits:
        lines.append("## Criteria")
        lines.append("")
        lines.append("| criterion | status | value | threshold |")
        lines.append("|---|---|---|---|")
        for c in crits:
            status = "pass" if c.get("passed") else "FAIL"
            lines.append(f"| {c.get('name')} | {status} | {_fmt(c.get('value'))} "
                         f"| {_fmt(c.get('threshold'))} |")
        lines.append("")
    if "symmetry" in results:
        lines.append("## Specular symmetry functionals")
        lines.append("")
        lines.append("| observable | jump sum | layer flux | se |")
        lines.append("|---|---|---|---|")
        for sym in results["symmetry"]:
            lines.append(f"| {sym['name']} | {_fmt(sym['jump_sum'])} "
                         f"| {_fmt(sym['flux'])} | {_fmt(sym['se'])} |")
        lines.append("")
    if figures:
        lines.append("## Figures")
        lines.append("")
        for f in figures:
            lines.append(f"- ![{f.stem}]({f.name})")
        lines.append("")
    path = out_dir / "summary.md"
    path.write_text("\n".join(lines))
    return path


def render(run_dir: str | Path, out_dir: str | Path | None = None) -> dict:
    """Render every figure the run's artifacts support, plus summary.md.

    Returns {name: path}. Pure function of the run directory contents.
    """
    art = load_run(run_dir)
    out = Path(out_dir) if out_dir is not None else Path(run_dir)
    out.mkdir(parents=True, exist_ok=True)
    figures = []
    results = art.report.get("results", {})
    if art.points is not None and "slope" in results:
        figures.append(render_scaling(art, out))
    if "observables" in results:
        figures.append(render_boundary(art, out))
    if art.snapshots is not None and art.snapshots.d == 2:
        figures.append(render_trajectory(art, out))
        figures.append(render_velocity(art, out))
    summary = write_summary(art, out, figures)
    written = {f.stem: f for f in figures}
    written["summary"] = summary
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swarmreport", description="Render figures from a run directory")
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render figures and summary.md")
    rend.add_argument("run_dir")
    rend.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    try:
        written = render(args.run_dir, args.out)
    except (SchemaMismatch, MissingArtifact) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for name, path in sorted(written.items()):
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
