"""SVG curve emission from metrics files; byte-deterministic for fixed inputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import read_metrics  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "csmarl"

__all__ = ["emit_plots", "AllRowsMalformed"]

_CURVES = [
    ("reward_leader", "ret1", "leader episodic return"),
    ("reward_follower", "ret2", "follower episodic return"),
    ("reward_total", None, "total episodic return"),
    ("collision_rate", "collision_rate", "collision rate"),
    ("lambda", None, "Lagrange multipliers"),
]


class AllRowsMalformed(RuntimeError):
    """Metrics files contained data rows but none parsed."""


def emit_plots(metrics_paths, out_dir):
    """Write the five standard curves as SVG; overlays files with a legend.

    Malformed rows are skipped with a warning; if the inputs contain data
    rows but none parse, raises AllRowsMalformed.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = []
    total_rows = 0
    total_data_lines = 0
    for path in metrics_paths:
        rows, data_lines = read_metrics(path)
        series.append((Path(path).stem, rows))
        total_rows += len(rows)
        total_data_lines += data_lines
    if total_data_lines > 0 and total_rows == 0:
        raise AllRowsMalformed("no parsable rows in any metrics file")

    written = []
    for name, column, title in _CURVES:
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, rows in series:
            steps = [r["step"] for r in rows]
            if column is not None:
                ax.plot(steps, [r[column] for r in rows], marker=".", label=label)
            elif name == "reward_total":
                ax.plot(steps, [r["ret1"] + r["ret2"] for r in rows], marker=".", label=label)
            else:
                ax.plot(steps, [r["lambda1"] for r in rows], marker=".", label=f"{label} λ1")
                ax.plot(steps, [r["lambda2"] for r in rows], marker=".", label=f"{label} λ2")
        ax.set_xlabel("environment steps")
        ax.set_title(title)
        if series:
            ax.legend(fontsize=7)
        path = out_dir / f"{name}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
