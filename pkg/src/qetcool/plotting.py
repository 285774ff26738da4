"""Raster figures of sweep charts via matplotlib (Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import Chart  # noqa: E402


def render_png(chart: Chart, path: str, dpi: int = 120) -> None:
    fig, ax = plt.subplots(figsize=(8, 6))
    for s in chart.series:
        ax.plot(s.x, s.y, "--" if s.dashed else "-", marker="." if len(s.x) < 30 else None, label=s.label)
    ax.set_xlabel(chart.xlabel)
    ax.set_ylabel(chart.ylabel)
    ax.set_title(chart.title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    plt.close(fig)
