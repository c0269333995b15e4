"""Metrics rows and the versioned CSV schema.

The CSV holds only run-reproducible quantities so that identical
(config, seed) runs produce byte-identical files; wall-clock time lives in
the in-memory row and the console log, not in the file.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

SCHEMA_HEADER = "# csmarl-metrics v1"

_COLUMNS = [
    "step", "ret1", "ret2", "disc_ret1", "disc_ret2", "cost1", "cost2",
    "collision_rate", "leader_first_rate", "follower_first_rate", "no_finish_rate",
    "lambda1", "lambda2", "loss_q1", "loss_q2", "loss_g1", "loss_g2",
]

__all__ = ["MetricsRow", "SCHEMA_HEADER", "write_metrics", "read_metrics"]


@dataclass
class MetricsRow:
    step: int
    ret1: float
    ret2: float
    disc_ret1: float
    disc_ret2: float
    cost1: float
    cost2: float
    collision_rate: float
    leader_first_rate: float
    follower_first_rate: float
    no_finish_rate: float
    lambda1: float = 0.0
    lambda2: float = 0.0
    loss_q1: float = 0.0
    loss_q2: float = 0.0
    loss_g1: float = 0.0
    loss_g2: float = 0.0
    wall_clock: float = 0.0

    def csv_line(self) -> str:
        vals = [getattr(self, c) for c in _COLUMNS]
        return ",".join(str(int(v)) if c == "step" else f"{v:.6f}"
                        for c, v in zip(_COLUMNS, vals))


def write_metrics(path, rows, comments=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA_HEADER + "\n")
        fh.write(",".join(_COLUMNS) + "\n")
        for row in rows:
            fh.write(row.csv_line() + "\n")
        for comment in comments:
            fh.write(f"# {comment}\n")


def read_metrics(path):
    """Parse a metrics CSV into dict rows, skipping malformed lines.

    Returns (rows, data_line_count); callers can detect the all-malformed
    case by rows == [] with data_line_count > 0.
    """
    rows = []
    data_lines = 0
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    lines = [ln for ln in lines if not ln.startswith("#")]
    if not lines:
        return rows, data_lines
    header = lines[0].split(",")
    for ln in lines[1:]:
        data_lines += 1
        parts = ln.split(",")
        if len(parts) != len(header):
            print(f"warning: skipping malformed metrics row in {path}: {ln!r}", file=sys.stderr)
            continue
        try:
            rows.append({k: float(v) for k, v in zip(header, parts)})
        except ValueError:
            print(f"warning: skipping malformed metrics row in {path}: {ln!r}", file=sys.stderr)
    return rows, data_lines
