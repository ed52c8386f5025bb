"""Optional figure rendering for experiment reports.

The delimited report file is canonical; figures are a convenience rendered
next to it when requested.  All rendering uses the Agg backend so it works
headless.
"""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import ExperimentReport


def render_report(rep: ExperimentReport, out_path: str) -> list[str]:
    """Render figures for a report next to `out_path` (the data file).
    Returns the figure paths written."""
    stem, _ = os.path.splitext(out_path)
    written = []

    numeric = defaultdict(list)
    for rec in rep.records:
        try:
            numeric[rec["metric"]].append((rec.get("trial", 0), float(rec["value"])))
        except (TypeError, ValueError):
            continue
    if not numeric:
        return written

    fig, axes = plt.subplots(1, len(numeric), figsize=(5 * len(numeric), 4),
                             squeeze=False)
    for ax, (metric, pts) in zip(axes[0], sorted(numeric.items())):
        vals = [v for _, v in pts]
        if len(set(vals)) > 8 and len(vals) > 20:
            ax.hist(vals, bins=30, color="#4878a8")
        else:
            ax.plot([t for t, _ in pts], vals, ".", color="#4878a8")
            ax.set_xlabel("trial")
        ax.set_title(metric)
        ax.grid(alpha=0.3)
    fig.suptitle(rep.config.experiment)
    fig.tight_layout()
    path = f"{stem}.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
