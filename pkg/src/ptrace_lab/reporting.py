"""Rendering of kappa curves and sweep outcomes to figures and tables.

Everything lands in files: PNG figures next to CSV tables, paths returned
to the caller. The Agg backend keeps this usable in batch jobs.
"""

from __future__ import annotations

import csv
import json
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .inequalities import NormSpec
from .kappa import KappaQuery, kappa_value


def kappa_curve(
    out_dir: str,
    p: float = 2.0,
    d: int = 2,
    r: int | None = None,
    c_max: float = 2.5,
    points: int = 26,
    budget: int = 8,
    seed: int = 0,
) -> dict:
    """Tabulate and plot kappa(c) for a Schatten norm on d (x) d."""
    os.makedirs(out_dir, exist_ok=True)
    r_cap = d * d if r is None else int(r)
    rows = []
    for c in np.linspace(0.0, c_max, points):
        q = KappaQuery(spec=NormSpec.schatten(p), c=float(c), n=2, dims=(d, d), r=r_cap)
        res = kappa_value(q, budget=budget, seed=seed)
        rows.append((float(c), float(res.value), res.branch))
    csv_path = os.path.join(out_dir, "kappa-curve.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "kappa", "branch"])
        writer.writerows(rows)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot([r_[0] for r_ in rows], [r_[1] for r_ in rows], marker="o", markersize=3)
    ax.set_xlabel("c")
    ax.set_ylabel("kappa(c)")
    ax.set_title(f"template constant, schatten p = {p:g}, d = {d}")
    ax.grid(True, alpha=0.3)
    png_path = os.path.join(out_dir, "kappa-curve.png")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": csv_path, "png": png_path}


def sweep_report(out_dir: str, jsonl_path: str) -> dict:
    """Summarize a sweep's JSON-lines output: slack histogram per checker
    plus a CSV table of counts, failures, and worst slack."""
    os.makedirs(out_dir, exist_ok=True)
    slacks: dict[str, list[float]] = defaultdict(list)
    failures: dict[str, int] = defaultdict(int)
    with open(jsonl_path, "r") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                continue
            if "name" not in obj or "slack" not in obj:
                continue
            slacks[obj["name"]].append(float(obj["slack"]))
            if not obj.get("verdict", True):
                failures[obj["name"]] += 1
    csv_path = os.path.join(out_dir, "sweep-summary.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "count", "failures", "min_slack", "median_slack"])
        for name in sorted(slacks):
            vals = np.asarray(slacks[name])
            writer.writerow(
                [
                    name,
                    vals.size,
                    failures.get(name, 0),
                    f"{vals.min():.6e}",
                    f"{np.median(vals):.6e}",
                ]
            )
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    names = sorted(slacks)
    for name in names:
        vals = np.asarray(slacks[name])
        # slacks span decades; a symlog histogram keeps tails visible
        ax.hist(vals, bins=40, alpha=0.5, label=name)
    ax.set_xlabel("slack (rhs - lhs)")
    ax.set_ylabel("instances")
    ax.set_title("inequality slack distribution")
    if names:
        ax.legend(fontsize=7)
    png_path = os.path.join(out_dir, "sweep-slack.png")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": csv_path, "png": png_path}
