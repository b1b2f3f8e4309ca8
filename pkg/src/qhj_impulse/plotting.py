"""Static figures for the CLI, plus a standalone script that redraws them.

Figures are rendered with the Agg backend so no display is needed. The
emitted script only needs matplotlib and the CSV it sits next to.
"""

from __future__ import annotations

import os

ENSEMBLE_SCRIPT = '''"""Redraw the ensemble summary: trajectory mean +- 3 stderr against Copenhagen E1."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {csv_name!r})
OUT_PATH = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, {png_name!r})

with open(CSV_PATH, newline="", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))
eps = [float(r["epsilon"]) for r in rows]
mean = [float(r["mean_e1"]) for r in rows]
band = [3.0 * float(r["stderr_e1"]) for r in rows]
orig = [float(r["copenhagen_e1_original"]) for r in rows]
errata = [float(r["copenhagen_e1_errata"]) for r in rows]

fig, ax = plt.subplots(figsize=(6, 4))
ax.errorbar(eps, mean, yerr=band, fmt="o", capsize=4, label="trajectory <E1> +- 3 stderr")
ax.plot(eps, orig, "s--", label="Copenhagen E1 (original)")
ax.plot(eps, errata, "^:", label="Copenhagen E1 (errata)")
ax.axhline(0.0, color="0.6", lw=0.8)
ax.set_xlabel("band width epsilon")
ax.set_ylabel("E1")
ax.legend()
fig.tight_layout()
fig.savefig(OUT_PATH, dpi=120)
print(OUT_PATH)
'''

TRAJECTORY_SCRIPT = '''"""Redraw x(t) from a sampled trajectory CSV."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {csv_name!r})
OUT_PATH = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, {png_name!r})

with open(CSV_PATH, newline="", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))
fig, ax = plt.subplots(figsize=(6, 4))
for sheet, marker in (("+x", "o-"), ("-x", "s-")):
    pts = [(float(r["t"]), float(r["x"])) for r in rows if r["direction"] == sheet]
    if pts:
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker, ms=3, label=sheet + " sheet")
ax.set_xlabel("t")
ax.set_ylabel("x")
ax.legend()
fig.tight_layout()
fig.savefig(OUT_PATH, dpi=120)
print(OUT_PATH)
'''

_SCRIPTS = {"ensemble": ENSEMBLE_SCRIPT, "trajectory": TRAJECTORY_SCRIPT}


def companion_paths(csv_path: str) -> tuple[str, str]:
    """(script, png) paths that sit next to ``csv_path``."""
    stem, _ = os.path.splitext(csv_path)
    return stem + "_plot.py", stem + ".png"


def write_plot_script(kind: str, csv_path: str) -> str:
    if kind not in _SCRIPTS:
        raise ValueError(f"unknown plot kind {kind!r}")
    script_path, png_path = companion_paths(csv_path)
    text = _SCRIPTS[kind].format(csv_name=os.path.basename(csv_path), png_name=os.path.basename(png_path))
    with open(script_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return script_path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_ensemble(rows: list[dict], png_path: str) -> str:
    plt = _pyplot()
    eps = [r["epsilon"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(eps, [r["mean_e1"] for r in rows], yerr=[3.0 * r["stderr_e1"] for r in rows], fmt="o", capsize=4,
                label="trajectory <E1> +- 3 stderr")
    ax.plot(eps, [r["copenhagen_e1_original"] for r in rows], "s--", label="Copenhagen E1 (original)")
    ax.plot(eps, [r["copenhagen_e1_errata"] for r in rows], "^:", label="Copenhagen E1 (errata)")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("band width epsilon")
    ax.set_ylabel("E1")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path


def render_trajectory(rows: list[dict], png_path: str) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for sheet, marker in (("+x", "o-"), ("-x", "s-")):
        pts = [(r["t"], r["x"]) for r in rows if r["direction"] == sheet]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker, ms=3, label=sheet + " sheet")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    if rows:
        ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path
