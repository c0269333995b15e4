"""Kinematic bicycle vehicle state and integration step."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = ["VehicleState", "bicycle_step", "wrap_angle"]


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]; exact for inputs already in range."""
    if -math.pi < a <= math.pi:
        return a
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class VehicleState:
    """Pose, speed and collision footprint of one vehicle.

    lane_index and progress locate the vehicle on its route (current target
    lane and longitudinal position along that lane's path, in meters).
    """

    x: float
    y: float
    heading: float
    speed: float
    length: float = 5.0
    width: float = 2.0
    lane_index: int = 0
    progress: float = 0.0


def bicycle_step(v: VehicleState, accel: float, steer: float, dt: float,
                 v_max: float = 15.0, steer_max: float = 0.5) -> VehicleState:
    """Explicit-Euler kinematic bicycle step with equal axle split.

    Position and heading advance with the pre-update speed; the steering
    input is clamped to the physical range and speed is clamped to [0, v_max]
    afterwards.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steer = min(max(steer, -steer_max), steer_max)
    slip = math.atan(0.5 * math.tan(steer))
    x = v.x + v.speed * dt * math.cos(v.heading + slip)
    y = v.y + v.speed * dt * math.sin(v.heading + slip)
    heading = wrap_angle(v.heading + (v.speed / (v.length / 2.0)) * math.sin(slip) * dt)
    speed = min(max(v.speed + accel * dt, 0.0), v_max)
    return replace(v, x=x, y=y, heading=heading, speed=speed)
