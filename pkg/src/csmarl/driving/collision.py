"""Oriented-rectangle overlap via the separating-axis test."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Footprint", "rectangles_overlap"]


@dataclass(frozen=True)
class Footprint:
    """Axis-aligned-in-body-frame rectangle: center, heading, size."""

    x: float
    y: float
    heading: float
    length: float
    width: float

    def corners(self):
        c, s = math.cos(self.heading), math.sin(self.heading)
        hl, hw = 0.5 * self.length, 0.5 * self.width
        return [
            (self.x + c * dx - s * dy, self.y + s * dx + c * dy)
            for dx, dy in ((hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw))
        ]


def _separated_on_axis(axis, corners_a, corners_b) -> bool:
    ax, ay = axis
    proj_a = [ax * x + ay * y for x, y in corners_a]
    proj_b = [ax * x + ay * y for x, y in corners_b]
    return max(proj_a) < min(proj_b) or max(proj_b) < min(proj_a)


def rectangles_overlap(a: Footprint, b: Footprint) -> bool:
    """True iff the two oriented rectangles intersect (touching counts)."""
    ca, cb = a.corners(), b.corners()
    for heading in (a.heading, b.heading):
        c, s = math.cos(heading), math.sin(heading)
        if _separated_on_axis((c, s), ca, cb) or _separated_on_axis((-s, c), ca, cb):
            return False
    return True
