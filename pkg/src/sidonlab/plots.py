"""Figures rendered next to the data files they describe.

Each function reads an artifact back rather than taking in-memory arrays, so
a figure can always be regenerated from the files alone.  PNGs sit alongside
the CSV/JSON outputs and are deliberately left out of checksum manifests.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import make_set
from .repfunc import count_nondecreasing

_DPI = 130


def _load_csv(path: Path) -> np.ndarray:
    # first line is the manifest digest comment; header follows it
    with open(path) as f:
        skip = 1 if f.readline().startswith("#") else 0
    return np.genfromtxt(
        path, delimiter=",", names=True, skip_header=skip, dtype=None, encoding=None
    )


def plot_profile(csv_path: Path, png_path: Path) -> Path:
    data = _load_csv(csv_path)
    n = data["n"]
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    ax.plot(n, data["R"], lw=0.7, label="all tuples")
    ax.plot(n, data["r"], lw=0.7, label="distinct terms")
    ax.plot(n, data["Rstar"], lw=0.7, label="repeated terms")
    ax.set_xlabel("n")
    ax.set_ylabel("representation count")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_rstar(csv_path: Path, png_path: Path) -> Path:
    data = _load_csv(csv_path)
    n = data["n"]
    v = data["r_star"]
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    ax.scatter(n[v > 0], v[v > 0], s=3)
    ax.set_xlabel("n")
    ax.set_ylabel("max disjoint representations")
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_decay(csv_path: Path, json_path: Path, png_path: Path) -> Path:
    data = _load_csv(csv_path)
    meta = json.loads(Path(json_path).read_text())
    x = data["center"]
    y = data["freq"]
    keep = y > 0
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    ax.loglog(x[keep], y[keep], "o", ms=4, label="event frequency")
    slope = meta["slope"]
    th_num, th_den = meta["theoretical"]
    th = th_num / th_den
    if keep.any():
        x0, y0 = x[keep][0], y[keep][0]
        xs = np.array([x[keep][0], x[keep][-1]])
        ax.loglog(xs, y0 * (xs / x0) ** slope, "-", lw=1, label=f"fit {slope:.3f}")
        ax.loglog(xs, y0 * (xs / x0) ** th, "--", lw=1, label=f"exact {th:.3f}")
    ax.set_xlabel("n (geometric bin center)")
    ax.set_ylabel("frequency")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_growth(csv_path: Path, json_path: Path, png_path: Path) -> Path:
    data = _load_csv(csv_path)
    meta = json.loads(Path(json_path).read_text())
    x = data["center"]
    y = data["mean_count"]
    keep = y > 0
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    ax.loglog(x[keep], y[keep], "o", ms=4, label="mean count")
    slope = meta["slope"]
    ref = meta["reference"][0] / meta["reference"][1]
    if keep.any():
        x0, y0 = x[keep][0], y[keep][0]
        xs = np.array([x[keep][0], x[keep][-1]])
        ax.loglog(xs, y0 * (xs / x0) ** slope, "-", lw=1, label=f"fit {slope:.3f}")
        ax.loglog(xs, y0 * (xs / x0) ** ref, "--", lw=1, label=f"exact {ref:.3f}")
    ax.set_xlabel("n (geometric bin center)")
    ax.set_ylabel("mean representation count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_repair(report_path: Path, png_path: Path) -> Path:
    d = json.loads(Path(report_path).read_text())
    N = d["params"]["N"]
    h = d["params"]["h"]
    A = d["A"]
    B = d["B"] or []
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), height_ratios=[1, 2])
    ax1.eventplot([A, B], lineoffsets=[1, 0], linelengths=0.7, colors=["0.6", "C0"])
    for k, m in sorted(d["thresholds"].items()):
        if m:
            ax1.axvline(m, color="C3", lw=0.8)
            ax1.text(m, 1.55, f"k={k}", fontsize=7, color="C3", ha="center")
    ax1.set_yticks([0, 1], ["survivor", "sampled"])
    ax1.set_xlim(0, N)
    ax1.set_xlabel("n")
    if B:
        Bset = make_set(B, N)
        counts = count_nondecreasing(Bset, 2 * h + 1, N)
        ax2.plot(np.arange(N + 1), counts, lw=0.6)
        ws = (d.get("basis") or {}).get("window_start")
        if ws:
            ax2.axvline(ws, color="C2", lw=1, label=f"window start {ws}")
            ax2.legend(fontsize=8)
    ax2.set_xlabel("n")
    ax2.set_ylabel(f"order-{2 * h + 1} count on survivor")
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_bounds(csv_path: Path, png_path: Path) -> Path:
    data = _load_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(data["k"], data["value"], "o-", ms=5)
    ax.axhline(-1, color="C3", lw=1, ls="--", label="summability line")
    ax.set_xlabel("order k")
    ax.set_ylabel("tail exponent")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def plot_sample(jsonl_path: Path, png_path: Path) -> Path:
    sets = [json.loads(line) for line in Path(jsonl_path).read_text().splitlines() if line]
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    for els in sets[:20]:
        if els:
            ax.step(els, np.arange(1, len(els) + 1), lw=0.7, alpha=0.7)
    ax.set_xlabel("n")
    ax.set_ylabel("elements up to n")
    ax.set_xscale("log")
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(png_path, dpi=_DPI)
    plt.close(fig)
    return png_path


def render_outputs(operation: str, out_dir: str | Path) -> list[Path]:
    """Render the standard figure(s) for whatever artifacts an operation left."""
    out = Path(out_dir)
    made = []
    if operation == "sample" and (out / "sets.jsonl").exists():
        made.append(plot_sample(out / "sets.jsonl", out / "sets.png"))
    elif operation == "profile" and (out / "profile.csv").exists():
        made.append(plot_profile(out / "profile.csv", out / "profile.png"))
    elif operation == "rstar" and (out / "rstar.csv").exists():
        made.append(plot_rstar(out / "rstar.csv", out / "rstar.png"))
    elif operation == "repair" and (out / "report.json").exists():
        made.append(plot_repair(out / "report.json", out / "report.png"))
    elif operation == "bounds_table" and (out / "bounds.csv").exists():
        made.append(plot_bounds(out / "bounds.csv", out / "bounds.png"))
    elif operation == "decay" and (out / "decay.csv").exists():
        made.append(plot_decay(out / "decay.csv", out / "decay.json", out / "decay.png"))
    elif operation == "growth" and (out / "growth.csv").exists():
        made.append(plot_growth(out / "growth.csv", out / "growth.json", out / "growth.png"))
    return made
