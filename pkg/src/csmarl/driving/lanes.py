"""Lane centerline geometry: straight and arc segments chained into paths.

A path answers three queries used everywhere else: point/heading at a
longitudinal position, and the projection of a world point onto the path
(progress, signed lateral offset with left-of-travel positive, and the
distance to the projected point for disambiguation between segments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .vehicle import wrap_angle

__all__ = ["StraightSegment", "ArcSegment", "Path"]


@dataclass(frozen=True)
class StraightSegment:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def heading(self) -> float:
        return math.atan2(self.y1 - self.y0, self.x1 - self.x0)

    def point_at(self, s: float):
        f = s / self.length
        return self.x0 + f * (self.x1 - self.x0), self.y0 + f * (self.y1 - self.y0)

    def heading_at(self, s: float) -> float:
        return self.heading

    def project(self, x: float, y: float):
        h = self.heading
        dx, dy = x - self.x0, y - self.y0
        s = min(max(dx * math.cos(h) + dy * math.sin(h), 0.0), self.length)
        px, py = self.point_at(s)
        lat = -(x - px) * math.sin(h) + (y - py) * math.cos(h)
        dist = math.hypot(x - px, y - py)
        return s, lat, dist


@dataclass(frozen=True)
class ArcSegment:
    """Circular arc from angle0 to angle1; angle1 < angle0 runs clockwise."""

    cx: float
    cy: float
    radius: float
    angle0: float
    angle1: float

    @property
    def direction(self) -> float:
        return 1.0 if self.angle1 >= self.angle0 else -1.0

    @property
    def sweep(self) -> float:
        return abs(self.angle1 - self.angle0)

    @property
    def length(self) -> float:
        return self.radius * self.sweep

    def _angle_at(self, s: float) -> float:
        return self.angle0 + self.direction * s / self.radius

    def point_at(self, s: float):
        a = self._angle_at(s)
        return self.cx + self.radius * math.cos(a), self.cy + self.radius * math.sin(a)

    def heading_at(self, s: float) -> float:
        return wrap_angle(self._angle_at(s) + self.direction * math.pi / 2.0)

    def project(self, x: float, y: float):
        ang = math.atan2(y - self.cy, x - self.cx)
        rel = self.direction * (ang - self.angle0)
        rel = rel % (2.0 * math.pi)
        # Points "behind" the start wrap to large rel; snap to nearer endpoint.
        if rel > self.sweep:
            rel = self.sweep if (rel - self.sweep) < (2.0 * math.pi - rel) / 2.0 else 0.0
        s = rel * self.radius
        px, py = self.point_at(s)
        r = math.hypot(x - self.cx, y - self.cy)
        lat = self.direction * (self.radius - r)
        dist = math.hypot(x - px, y - py)
        return s, lat, dist


class Path:
    """Ordered chain of segments with cumulative longitudinal coordinates."""

    def __init__(self, segments, closed: bool = False):
        if not segments:
            raise ValueError("path needs at least one segment")
        self.segments = list(segments)
        self.closed = closed
        self.offsets = []
        total = 0.0
        for seg in self.segments:
            self.offsets.append(total)
            total += seg.length
        self.length = total

    def _locate(self, s: float):
        if self.closed:
            s = s % self.length
        s = min(max(s, 0.0), self.length)
        for seg, off in zip(reversed(self.segments), reversed(self.offsets)):
            if s >= off:
                return seg, min(s - off, seg.length)
        return self.segments[0], 0.0

    def point_at(self, s: float):
        seg, local = self._locate(s)
        return seg.point_at(local)

    def heading_at(self, s: float) -> float:
        seg, local = self._locate(s)
        return seg.heading_at(local)

    def project(self, x: float, y: float):
        """(progress, signed lateral offset, distance to projected point)."""
        best = None
        for seg, off in zip(self.segments, self.offsets):
            s, lat, dist = seg.project(x, y)
            if best is None or dist < best[2]:
                best = (off + s, lat, dist)
        return best
