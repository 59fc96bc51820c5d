"""Render the five simulator figures from their CSV files.

Pure CSV-to-image transforms: nothing is simulated or recomputed here.
Each figure reads one CSV produced by the ``iabandit`` CLI (schemas are
part of that tool's external contract), draws one series per policy with
shaded 2-stderr bands where a ``stderr`` column is present, and writes one
image. Output is deterministic for identical input.

Usage: ``render_figs <csv-dir> <out-dir> [--fig N]``
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """The CSV does not carry the columns the figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    number: int
    csv_name: str
    x: str
    y: str
    xlabel: str
    ylabel: str
    title: str
    output: str
    style: str = "line"  # line | marker | cdf
    xlim: tuple | None = None


FIGURES = {
    1: FigureSpec(
        number=1, csv_name="regret_vs_n.csv", x="slot", y="mean_regret",
        xlabel="Time slot n", ylabel="Average cumulative regret",
        title="Regret vs time slots", output="fig1_regret_vs_slots.png",
    ),
    2: FigureSpec(
        number=2, csv_name="regret_vs_p.csv", x="states", y="mean_regret",
        xlabel="Antenna states P per receiver", ylabel="Average regret at the horizon",
        title="Average regret vs number of antenna states", output="fig2_regret_vs_states.png",
        style="marker",
    ),
    3: FigureSpec(
        number=3, csv_name="sumrate_vs_power.csv", x="power_db", y="mean_sum_rate",
        xlabel="Transmit power (dB)", ylabel="Sum rate (bits/channel use)",
        title="Sum rate vs power, sum-rate reward", output="fig3_sumrate_vs_power.png",
    ),
    4: FigureSpec(
        number=4, csv_name="chordal_cdf.csv", x="distance", y="cdf",
        xlabel="Total chordal distance", ylabel="Empirical CDF",
        title="CDF of total chordal distance", output="fig4_chordal_cdf.png",
        style="cdf", xlim=(0.0, 3.0),
    ),
    5: FigureSpec(
        number=5, csv_name="distributed_vs_combinational.csv", x="power_db", y="mean_sum_rate",
        xlabel="Transmit power (dB)", ylabel="Sum rate (bits/channel use)",
        title="Sum rate vs power, combinational vs distributed",
        output="fig5_distributed_vs_combinational.png",
    ),
}

_SERIES_ORDER = ["oracle", "klucb", "klucb_distributed", "ucb1", "random", "conventional"]
_COLORS = {
    "oracle": "#000000",
    "klucb": "#d62728",
    "klucb_distributed": "#ff7f0e",
    "ucb1": "#1f77b4",
    "random": "#2ca02c",
    "conventional": "#7f7f7f",
}


def _read_series(path: Path, spec: FigureSpec) -> "OrderedDict[str, dict]":
    """Group the CSV rows by policy; validates the schema."""
    if not path.exists():
        raise SchemaError(f"{path} not found")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in (spec.x, "policy", spec.y):
            if column not in header:
                raise SchemaError(f"{path.name}: missing column '{column}'")
        has_stderr = "stderr" in header
        series: "OrderedDict[str, dict]" = OrderedDict()
        for row in reader:
            entry = series.setdefault(row["policy"], {"x": [], "y": [], "stderr": []})
            entry["x"].append(float(row[spec.x]))
            entry["y"].append(float(row[spec.y]))
            if has_stderr:
                entry["stderr"].append(float(row["stderr"]))
    if not series:
        raise SchemaError(f"{path.name}: no data rows")
    for entry in series.values():
        order = np.argsort(entry["x"], kind="stable")
        for key in ("x", "y", "stderr"):
            if entry[key]:
                entry[key] = np.asarray(entry[key])[order]
    return series


def render_figure(fig_no: int, csv_dir: Path, out_dir: Path) -> dict:
    """Draw one figure; returns metadata used by callers and tests."""
    spec = FIGURES[fig_no]
    series = _read_series(Path(csv_dir) / spec.csv_name, spec)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    ordered = sorted(
        series.items(),
        key=lambda kv: _SERIES_ORDER.index(kv[0]) if kv[0] in _SERIES_ORDER else len(_SERIES_ORDER),
    )
    for label, entry in ordered:
        color = _COLORS.get(label)
        x, y = entry["x"], entry["y"]
        if spec.style == "marker":
            err = 2 * entry["stderr"] if len(entry["stderr"]) else None
            ax.errorbar(x, y, yerr=err, marker="o", capsize=3.0, label=label, color=color)
        else:
            ax.plot(x, y, label=label, color=color, drawstyle="steps-post" if spec.style == "cdf" else "default")
            if len(entry["stderr"]):
                band = 2 * entry["stderr"]
                ax.fill_between(x, y - band, y + band, alpha=0.15, color=color, linewidth=0)
    if spec.style == "cdf":
        ax.set_ylim(0.0, 1.02)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    out_path = Path(out_dir) / spec.output
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=130, metadata={"Software": None})
    plt.close(fig)
    return {
        "figure": fig_no,
        "output": str(out_path),
        "n_series": len(series),
        "labels": list(series.keys()),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Regenerate the five simulator figures from CSV outputs.",
    )
    parser.add_argument("csv_dir", help="directory holding the experiment CSV files")
    parser.add_argument("out_dir", help="directory for the rendered images")
    parser.add_argument("--fig", type=int, choices=sorted(FIGURES), default=None,
                        help="render a single figure instead of all five")
    args = parser.parse_args(argv)

    numbers = [args.fig] if args.fig else sorted(FIGURES)
    rendered = []
    for n in numbers:
        try:
            info = render_figure(n, Path(args.csv_dir), Path(args.out_dir))
        except SchemaError as exc:
            print(f"error: figure {n}: {exc}", file=sys.stderr)
            return 1
        rendered.append(info)
        print(f"figure {n}: {info['output']} ({info['n_series']} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
