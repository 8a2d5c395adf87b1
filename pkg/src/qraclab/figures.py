"""File renderers for scan, sweep and shot reports.

Pure matplotlib-to-file helpers used by the command line next to the
CSV/JSON writers; nothing here opens a display, the Agg backend is
forced at import.  Each function writes one PNG and returns its path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .oiscan import ScanReport
from .perturb import SweepReport
from .shots import ShotReport

DPI = 150
_META = {"Software": "qraclab"}


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=DPI, metadata=_META, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_scan(report: ScanReport, path: str) -> str:
    """Per-subset 3 -> 1 values with one horizontal line per cluster."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ys = [v for _, v in report.entries]
    ax.plot(range(len(ys)), ys, "o", ms=4, color="tab:blue", alpha=0.7)
    for c in report.clusters:
        ax.axhline(c.value, color="tab:red", lw=0.8, ls="--")
        ax.annotate(f"{c.value:.6f} ({len(c.members)} subsets)",
                    (0.99, c.value), xycoords=("axes fraction", "data"),
                    ha="right", va="bottom", fontsize=8)
    ax.set_xlabel("subset index (ordered)")
    ax.set_ylabel("success probability")
    ax.set_title(f"3 -> 1 values over basis triplets, d={report.dim}: "
                 f"{report.n_clusters} cluster(s)")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_sweep(report: SweepReport, path: str) -> str:
    """One curve per subset over the delta grid, reference lines for the
    unperturbed extremes."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for curve in report.curves:
        ax.plot(report.delta_grid, curve.values, lw=0.6, alpha=0.5)
    ax.axhline(report.p_plus, color="red", ls="--", lw=1.2,
               label=f"top unperturbed value {report.p_plus:.6f}")
    if report.p_minus != report.p_plus:
        ax.axhline(report.p_minus, color="blue", ls="-", lw=1.2,
                   label=f"bottom unperturbed value {report.p_minus:.6f}")
    ax.plot([report.best_delta], [report.best_value], "k*", ms=10,
            label=f"best {report.best_value:.6f} at delta={report.best_delta:g}")
    ax.set_xlabel("delta")
    ax.set_ylabel("success probability")
    ax.set_title(f"perturbed bases, d={report.dim}, n={report.n}: "
                 f"surpass={report.surpass}")
    ax.legend(fontsize=8, loc="best")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_shots(report: ShotReport, path: str) -> str:
    """Trial estimates with mean +- sd bars against the exact values."""
    fig, ax = plt.subplots(figsize=(5, 4))
    for x, (name, ests, mean, sd, exact) in enumerate((
            ("plus", report.plus_estimates, report.plus_mean,
             report.plus_sd, report.plus_exact),
            ("minus", report.minus_estimates, report.minus_mean,
             report.minus_sd, report.minus_exact))):
        ax.plot([x] * len(ests), ests, "o", ms=4, alpha=0.5, color="gray")
        ax.errorbar([x], [mean], yerr=[sd], fmt="s", ms=7, capsize=6,
                    color="tab:blue")
        ax.plot([x - 0.2, x + 0.2], [exact, exact], color="tab:red", lw=1.5)
    ax.set_xticks([0, 1], ["top cluster", "bottom cluster"])
    ax.set_ylabel("estimated success probability")
    gap = report.sigma_gap
    ax.set_title(f"d={report.dim}, {report.shots} shots x {report.trials} "
                 f"trials: gap {gap:.2f} sigma" if gap == gap else "")
    ax.grid(alpha=0.3, axis="y")
    return _save(fig, path)
