"""Optional PNG renderings of reports (the CSV files remain the contract)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .reports import CltReport, SweepReport, TableReport  # noqa: E402


def plot_sweep(report: SweepReport, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in report.metrics:
        ax.plot(report.axis, report.series(name), marker="o", label=name)
    if report.axis_name == "n":
        ax.set_xscale("log", base=2)
    ax.set_xlabel(report.axis_name)
    ax.legend(fontsize="small")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def plot_clt(report: CltReport, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = [str(f) for f in report.subset]
    ax.bar(labels, report.ks_statistics, color="tab:blue")
    ax.axhline(report.ks_critical, color="tab:red", linestyle="--", label="critical value")
    ax.set_xlabel("function")
    ax.set_ylabel("KS statistic")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def plot_table(report: TableReport, x: str, ys: list[str], path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = report.column(x)
    for y in ys:
        ax.plot(xs, report.column(y), marker="o", label=y)
    ax.set_xlabel(x)
    ax.legend(fontsize="small")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def render(report, path, x: str | None = None, ys: list[str] | None = None) -> Path | None:
    """Draw whatever kind of report this is; tables need ``x`` and ``ys``."""
    if isinstance(report, SweepReport):
        return plot_sweep(report, path)
    if isinstance(report, CltReport):
        return plot_clt(report, path)
    if isinstance(report, TableReport) and x and ys:
        return plot_table(report, x, ys, path)
    return None
