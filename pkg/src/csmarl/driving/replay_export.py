"""Episode replay export: one CSV row per (step, agent) for visualization."""

from __future__ import annotations

import csv

__all__ = ["ReplayRecorder"]

_FIELDS = ["step", "agent", "x", "y", "heading", "speed", "action", "r", "c", "events"]


class ReplayRecorder:
    """Collects per-step vehicle rows during a rollout and writes them as CSV."""

    def __init__(self):
        self.rows = []

    def record(self, step: int, state, actions, outcome) -> None:
        rewards = (outcome.r1, outcome.r2)
        costs = (outcome.c1, outcome.c2)
        events = (
            self._events(outcome.collision1, outcome.off_road1, outcome.finished1),
            self._events(outcome.collision2, outcome.off_road2, outcome.finished2),
        )
        for agent in (0, 1):
            v = state.vehicles[agent]
            self.rows.append({
                "step": step, "agent": agent,
                "x": f"{v.x:.4f}", "y": f"{v.y:.4f}",
                "heading": f"{v.heading:.5f}", "speed": f"{v.speed:.4f}",
                "action": self._fmt_action(actions[agent]),
                "r": f"{rewards[agent]:.4f}", "c": f"{costs[agent]:.4f}",
                "events": events[agent],
            })

    @staticmethod
    def _fmt_action(action) -> str:
        try:
            return f"{float(action):.4f}"
        except TypeError:
            return ";".join(f"{float(a):.4f}" for a in action)

    @staticmethod
    def _events(collision, off_road, finished) -> str:
        flags = []
        if collision:
            flags.append("collision")
        if off_road:
            flags.append("off_road")
        if finished:
            flags.append("finished")
        return "|".join(flags)

    def write(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=_FIELDS)
            writer.writeheader()
            writer.writerows(self.rows)
