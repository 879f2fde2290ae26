"""Matplotlib rendering of usage series for the report path of the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates
import matplotlib.pyplot as plt

from .analytics import UsageSeries


def render_usage_chart(
    series_list: Sequence[UsageSeries],
    out_path: str | Path,
    facet: bool = False,
    title: str = "",
) -> Path:
    """Draw usage-over-time lines, one per (gram, instance) pair.

    Facet mode lays out a grid with one row per gram and one column per
    instance; otherwise all lines share a single axis.
    """
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if facet:
        grams = sorted({s.gram for s in series_list})
        instances = sorted({s.instance_slug for s in series_list})
        fig, axes = plt.subplots(
            len(grams),
            len(instances),
            figsize=(4.2 * max(len(instances), 1), 2.8 * max(len(grams), 1)),
            squeeze=False,
            sharex=True,
        )
        by_key = {(s.gram, s.instance_slug): s for s in series_list}
        for row, gram in enumerate(grams):
            for col, slug in enumerate(instances):
                ax = axes[row][col]
                series = by_key.get((gram, slug))
                if series and series.points:
                    ax.plot(
                        [p.date for p in series.points],
                        [p.percent for p in series.points],
                        linewidth=1.2,
                    )
                if row == 0:
                    ax.set_title(slug, fontsize=9)
                if col == 0:
                    ax.set_ylabel(f"{gram}\nusage (%)", fontsize=8)
                ax.tick_params(labelsize=7)
                ax.xaxis.set_major_formatter(mdates.DateFormatter("%Y-%m"))
    else:
        fig, ax = plt.subplots(figsize=(8, 4.5))
        for series in series_list:
            if not series.points:
                continue
            ax.plot(
                [p.date for p in series.points],
                [p.percent for p in series.points],
                linewidth=1.4,
                label=f"{series.gram} — {series.instance_slug}",
            )
        ax.set_ylabel("usage (% of day's n-grams)")
        ax.set_xlabel("session date")
        if series_list:
            ax.legend(fontsize=8)
        ax.xaxis.set_major_formatter(mdates.DateFormatter("%Y-%m-%d"))
        fig.autofmt_xdate()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
