"""Experiment reports: a delimited CSV table plus a rendered figure, written
side by side so every CLI experiment leaves both a machine-readable record and
a picture of the measurement."""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _paths(path: str):
    stem, ext = os.path.splitext(path)
    if ext.lower() not in (".csv", ".txt", ".tsv"):
        stem = path
        ext = ".csv"
    return stem + ext, stem + ".png"


def write_report(path: str, rows: list[dict], *, title: str = "",
                 kind: str = "generic") -> tuple[str, str]:
    """Write rows as CSV and render the companion figure; returns the pair of
    file paths."""
    csv_path, png_path = _paths(path)
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    os.makedirs(os.path.dirname(os.path.abspath(csv_path)), exist_ok=True)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    _render(png_path, rows, title, kind)
    return csv_path, png_path


def _cell(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v)
    return v


def _render(png_path: str, rows: list[dict], title: str, kind: str):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = [str(r.get("label", r.get("protocol", i))) for i, r in enumerate(rows)]
    if kind == "soundness":
        rates = [r.get("rate", 0.0) for r in rows]
        highs = [r.get("wilson_high", 0.0) for r in rows]
        envs = [r.get("envelope", 0.0) for r in rows]
        xs = range(len(rows))
        ax.bar(xs, rates, width=0.35, label="measured rate", color="#3465a4")
        ax.bar([x + 0.36 for x in xs], envs, width=0.35, label="envelope",
               color="#cc6666", alpha=0.7)
        ax.scatter(xs, highs, marker="_", color="black", s=200,
                   label="wilson upper (3-sigma)")
        ax.set_ylabel("acceptance rate")
    elif kind == "zk":
        floors = [r.get("noise_floor", 0.0) for r in rows]
        ests = [r.get("estimate", 0.0) for r in rows]
        ctrls = [r.get("control_estimate") or 0.0 for r in rows]
        xs = range(len(rows))
        ax.bar(xs, floors, width=0.25, label="noise floor", color="#999999")
        ax.bar([x + 0.26 for x in xs], ests, width=0.25, label="real vs simulated",
               color="#3465a4")
        ax.bar([x + 0.52 for x in xs], ctrls, width=0.25, label="broken simulator",
               color="#cc6666")
        ax.set_ylabel("total-variation estimate")
    elif kind == "completeness":
        rates = [r.get("accept_rate", 0.0) for r in rows]
        ax.bar(range(len(rows)), rates, color="#4e9a06")
        ax.set_ylim(0, 1.05)
        ax.axhline(1.0, color="black", linewidth=0.6, linestyle="--")
        ax.set_ylabel("accept rate")
    else:
        numeric = [k for k in rows[0] if isinstance(rows[0][k], (int, float))
                   and not isinstance(rows[0][k], bool)] if rows else []
        width = 0.8 / max(1, len(numeric))
        for j, key in enumerate(numeric[:5]):
            ax.bar([x + j * width for x in range(len(rows))],
                   [float(r.get(key) or 0) for r in rows], width=width, label=key)
        ax.set_ylabel("value")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_title(title)
    if kind != "completeness":
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
