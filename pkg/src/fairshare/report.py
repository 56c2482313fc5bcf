"""Benchmark report serialization: CSV, JSON mirror, and rendered figures.

The CSV holds one row per (rule, n) cell with full-precision floats; the
JSON mirror echoes the config (seed included) for provenance.  Figures are
rendered headlessly next to the delimited output: mean percent error per
passenger count, and mean per-instance runtime on a log scale.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .eval_harness import ExperimentReport

CSV_COLUMNS = ("rule", "n", "percent", "mae", "mse", "rmse", "max_error", "mean_seconds")


def write_report_csv(report: ExperimentReport, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([row.rule, row.n] + [repr(getattr(row, c)) for c in CSV_COLUMNS[2:]])
    return path


def write_report_json(report: ExperimentReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def summary_table(report: ExperimentReport) -> str:
    """Fixed-width text table of the report for terminal output."""
    header = f"{'rule':<10} {'n':>2} {'percent':>9} {'mae':>10} {'rmse':>10} {'max':>10} {'mean_s':>10}"
    lines = [header, "-" * len(header)]
    for r in report.rows:
        pct = "nan" if math.isnan(r.percent) else f"{100 * r.percent:.2f}%"
        lines.append(
            f"{r.rule:<10} {r.n:>2} {pct:>9} {r.mae:>10.4f} {r.rmse:>10.4f} {r.max_error:>10.4f} {r.mean_seconds:>10.6f}"
        )
    return "\n".join(lines)


def render_figures(report: ExperimentReport, outdir: str | Path) -> list[Path]:
    """Render percent-error and runtime figures as PNG files in ``outdir``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rules = list(dict.fromkeys(r.rule for r in report.rows))
    counts = sorted({r.n for r in report.rows})
    written = []

    def series(rule: str, attr: str) -> list[float]:
        return [getattr(report.row(rule, n), attr) for n in counts]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for rule in rules:
        ax.plot(counts, [100 * p for p in series(rule, "percent")], marker="o", label=rule)
    ax.set_xlabel("passengers")
    ax.set_ylabel("mean percent error (%)")
    ax.set_title("Deviation from exact Shapley payments")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    target = outdir / "percent_error.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    written.append(target)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for rule in rules:
        ax.plot(counts, series(rule, "mean_seconds"), marker="o", label=rule)
    ax.set_yscale("log")
    ax.set_xlabel("passengers")
    ax.set_ylabel("mean seconds per instance")
    ax.set_title("Per-instance allocation runtime")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    target = outdir / "runtime.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    written.append(target)
    return written
