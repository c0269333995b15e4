"""Two-vehicle driving scenarios: merge, roundabout, intersection, racetrack.

Each scenario is a ScenarioSpec built from the versioned config: per-agent
lane paths (ordered left to right), nominal poses, finish thresholds, static
obstacles and the reward/cost constants. Scenario stepping is functional —
it returns a new state plus a StepOutcome and never touches the input.

Reward contract: +2 per step while the agent's own speed sits in the speed
band; +10 to the first finisher and +5 to the second. The racetrack replaces
finish bonuses with a lane-centering term that falls to zero at the lane
edge and pays nothing off-road. A collision costs the colliding agent 5 on
that step (the only cost source) and ends the episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collision import Footprint, rectangles_overlap
from .config import default_scenario_config
from .lanes import ArcSegment, Path, StraightSegment
from .vehicle import VehicleState, bicycle_step, wrap_angle

__all__ = [
    "DISCRETE_ACTIONS",
    "SCENARIO_KINDS",
    "SteppedAfterDone",
    "AgentLayout",
    "ScenarioSpec",
    "ScenarioState",
    "StepOutcome",
    "build_spec",
    "reset",
    "scenario_step",
    "observe",
    "apply_discrete_action",
    "lane_keep_steer",
]

DISCRETE_ACTIONS = ("LANE_LEFT", "IDLE", "LANE_RIGHT", "FASTER", "SLOWER")
SCENARIO_KINDS = ("merge", "roundabout", "intersection", "racetrack")


class SteppedAfterDone(RuntimeError):
    """scenario_step was called on a finished episode (harness bug)."""


@dataclass
class AgentLayout:
    """One agent's route options and nominal start."""

    lane_paths: list
    enterable: list
    start_lane: int
    nominal_progress: float
    nominal_speed: float
    finish_progress: list  # per lane, None where finishing is impossible
    conflict_xy: tuple | None


@dataclass
class ScenarioSpec:
    kind: str
    control_mode: str  # "discrete" | "throttle" | "steer"
    dt: float
    horizon: int
    v_max: float
    steer_max: float
    accel_delta: float
    accel_max: float
    k_lat: float
    k_head: float
    speed_band: tuple
    speed_reward: float
    finish_first: float
    finish_second: float
    collision_cost: float
    position_noise: float
    speed_noise: float
    vehicle_length: float
    vehicle_width: float
    lane_width: float
    agents: list
    obstacles: list
    fixed_speed: float | None = None


@dataclass
class ScenarioState:
    spec: ScenarioSpec
    vehicles: list
    lane_idx: list
    steps: int = 0
    finished: list = field(default_factory=lambda: [False, False])
    arrival_rank: list = field(default_factory=lambda: [None, None])
    done: bool = False

    def clone(self) -> "ScenarioState":
        return ScenarioState(
            spec=self.spec, vehicles=list(self.vehicles), lane_idx=list(self.lane_idx),
            steps=self.steps, finished=list(self.finished),
            arrival_rank=list(self.arrival_rank), done=self.done,
        )


@dataclass
class StepOutcome:
    obs1: np.ndarray
    obs2: np.ndarray
    global_state: np.ndarray
    r1: float
    r2: float
    c1: float
    c2: float
    done: bool
    collision1: bool = False
    collision2: bool = False
    off_road1: bool = False
    off_road2: bool = False
    finished1: bool = False
    finished2: bool = False


# --- geometry builders ---


def _build_merge(cc: dict, mc: dict) -> ScenarioSpec:
    x0, x1 = mc["road_start"], mc["road_end"]
    left = Path([StraightSegment(x0, mc["main_lane_y"][0], x1, mc["main_lane_y"][0])])
    right = Path([StraightSegment(x0, mc["main_lane_y"][1], x1, mc["main_lane_y"][1])])
    ramp = Path([StraightSegment(mc["ramp_start_x"], mc["ramp_y"], mc["ramp_obstacle_x"], mc["ramp_y"])])
    finish_main = mc["finish_x"] - x0
    agents = [
        AgentLayout([left, right, ramp], [True, True, False], 1,
                    mc["leader_x0"] - x0, mc["v0"],
                    [finish_main, finish_main, None], (mc["ramp_obstacle_x"], 0.0)),
        AgentLayout([left, right, ramp], [True, True, False], 2,
                    mc["follower_x0"] - mc["ramp_start_x"], mc["v0"],
                    [finish_main, finish_main, None], (mc["ramp_obstacle_x"], 0.0)),
    ]
    obstacle = Footprint(mc["ramp_obstacle_x"] + 2.0, mc["ramp_y"], 0.0, 4.0, cc["lane_width"] * 0.75)
    return _spec("merge", "discrete", cc, mc, agents, [obstacle])


def _build_roundabout(cc: dict, rc: dict) -> ScenarioSpec:
    r_out, r_in = rc["outer_radius"], rc["inner_radius"]
    west, north = math.pi, math.pi / 2.0
    exit_len = rc["exit_length"]

    # Leader inserts at the west point via a tangential entry; follower is
    # already circulating clockwise on the ring.
    entry = StraightSegment(-r_out, -rc["entry_length"], -r_out, 0.0)
    leader_outer = Path([entry, ArcSegment(0, 0, r_out, west, north),
                         StraightSegment(0.0, r_out, exit_len, r_out)])
    leader_inner = Path([ArcSegment(0, 0, r_in, west, north),
                         StraightSegment(0.0, r_in, exit_len, r_in)])
    follower_start_angle = math.radians(262.0)
    follower_outer = Path([ArcSegment(0, 0, r_out, follower_start_angle, north),
                           StraightSegment(0.0, r_out, exit_len, r_out)])
    follower_inner = Path([ArcSegment(0, 0, r_in, follower_start_angle, north),
                           StraightSegment(0.0, r_in, exit_len, r_in)])

    fin = rc["finish_exit_distance"]
    conflict = (-r_out, 0.0)
    d = rc["conflict_distance"]
    leader_s0 = rc["entry_length"] - d
    follower_s0 = (follower_start_angle - west) * r_out - d
    agents = [
        AgentLayout([leader_outer, leader_inner], [True, True], 0, leader_s0, rc["v0"],
                    [leader_outer.length - exit_len + fin, leader_inner.length - exit_len + fin],
                    conflict),
        AgentLayout([follower_outer, follower_inner], [True, True], 0, follower_s0, rc["v0"],
                    [follower_outer.length - exit_len + fin, follower_inner.length - exit_len + fin],
                    conflict),
    ]
    return _spec("roundabout", "discrete", cc, rc, agents, [])


def _build_intersection(cc: dict, ic: dict) -> ScenarioSpec:
    arm, over = ic["arm_length"], ic["overshoot"]
    south_north = Path([StraightSegment(0.0, -arm, 0.0, over)])
    west_east = Path([StraightSegment(-arm, 0.0, over, 0.0)])
    agents = [
        AgentLayout([south_north], [True], 0, arm - ic["start_distance"], ic["v0"],
                    [arm + ic["finish_distance"]], (0.0, 0.0)),
        AgentLayout([west_east], [True], 0, arm - ic["start_distance"], ic["v0"],
                    [arm + ic["finish_distance"]], (0.0, 0.0)),
    ]
    return _spec("intersection", "throttle", cc, ic, agents, [])


def _racetrack_loop(straight: float, radius: float, offset: float) -> Path:
    # Stadium centerline at y in {0, 2*radius_c}; lanes at signed left offset.
    r = radius - offset
    y_low, y_high = offset, 2.0 * radius - offset
    return Path([
        StraightSegment(0.0, y_low, straight, y_low),
        ArcSegment(straight, radius, r, -math.pi / 2.0, math.pi / 2.0),
        StraightSegment(straight, y_high, 0.0, y_high),
        ArcSegment(0.0, radius, r, math.pi / 2.0, 3.0 * math.pi / 2.0),
    ], closed=True)


def _build_racetrack(cc: dict, tc: dict) -> ScenarioSpec:
    inner = _racetrack_loop(tc["straight_length"], tc["turn_radius"], tc["lane_offset"])
    outer = _racetrack_loop(tc["straight_length"], tc["turn_radius"], -tc["lane_offset"])
    agents = [
        AgentLayout([inner, outer], [True, True], 0, tc["start_x"], tc["fixed_speed"],
                    [None, None], None),
        AgentLayout([inner, outer], [True, True], 1, tc["start_x"], tc["fixed_speed"],
                    [None, None], None),
    ]
    spec = _spec("racetrack", "steer", cc, tc, agents, [])
    spec.fixed_speed = tc["fixed_speed"]
    spec.speed_noise = 0.0
    return spec


def _spec(kind, mode, cc, sc, agents, obstacles) -> ScenarioSpec:
    return ScenarioSpec(
        kind=kind, control_mode=mode, dt=cc["dt"], horizon=sc["horizon"],
        v_max=cc["v_max"], steer_max=cc["steer_max"],
        accel_delta=cc["accel_delta"], accel_max=cc["accel_max"],
        k_lat=cc["k_lat"], k_head=cc["k_head"],
        speed_band=tuple(cc["speed_band"]), speed_reward=cc["speed_reward"],
        finish_first=cc["finish_first_bonus"], finish_second=cc["finish_second_bonus"],
        collision_cost=cc["collision_cost"],
        position_noise=cc["position_noise"], speed_noise=cc["speed_noise"],
        vehicle_length=cc["vehicle_length"], vehicle_width=cc["vehicle_width"],
        lane_width=cc["lane_width"], agents=agents, obstacles=obstacles,
    )


_BUILDERS = {
    "merge": _build_merge,
    "roundabout": _build_roundabout,
    "intersection": _build_intersection,
    "racetrack": _build_racetrack,
}


def build_spec(kind: str, config: dict | None = None) -> ScenarioSpec:
    if kind not in _BUILDERS:
        raise ValueError(f"unknown scenario kind {kind!r}")
    config = config or default_scenario_config()
    return _BUILDERS[kind](config["common"], config[kind])


def reset(kind: str, seed: int, config: dict | None = None) -> ScenarioState:
    """Nominal poses plus uniform longitudinal/speed noise, fully seeded."""
    spec = build_spec(kind, config)
    rng = np.random.default_rng(seed)
    vehicles = []
    lane_idx = []
    for agent in spec.agents:
        s0 = agent.nominal_progress + rng.uniform(-spec.position_noise, spec.position_noise)
        v0 = agent.nominal_speed + (
            rng.uniform(-spec.speed_noise, spec.speed_noise) if spec.speed_noise > 0 else 0.0)
        path = agent.lane_paths[agent.start_lane]
        x, y = path.point_at(s0)
        vehicles.append(VehicleState(
            x=x, y=y, heading=path.heading_at(s0), speed=max(v0, 0.0),
            length=spec.vehicle_length, width=spec.vehicle_width,
            lane_index=agent.start_lane, progress=s0,
        ))
        lane_idx.append(agent.start_lane)
    return ScenarioState(spec=spec, vehicles=vehicles, lane_idx=lane_idx)


def lane_keep_steer(scn: ScenarioState, agent: int) -> float:
    """Proportional steering toward the agent's target lane centerline."""
    spec = scn.spec
    v = scn.vehicles[agent]
    path = spec.agents[agent].lane_paths[scn.lane_idx[agent]]
    s, lat, _ = path.project(v.x, v.y)
    head_err = wrap_angle(v.heading - path.heading_at(s))
    steer = -spec.k_lat * lat - spec.k_head * head_err
    return min(max(steer, -spec.steer_max), spec.steer_max)


def apply_discrete_action(scn: ScenarioState, agent: int, action) -> tuple:
    """Resolve a meta-action into (accel, steer); lane moves retarget the controller.

    Invalid lane changes (beyond the edge or into a non-enterable lane)
    degrade to IDLE steering; the target lane update mutates the given state.
    """
    spec = scn.spec
    if isinstance(action, str):
        action = DISCRETE_ACTIONS.index(action)
    name = DISCRETE_ACTIONS[action]
    accel = 0.0
    if name == "FASTER":
        accel = spec.accel_delta
    elif name == "SLOWER":
        accel = -spec.accel_delta
    elif name in ("LANE_LEFT", "LANE_RIGHT"):
        layout = spec.agents[agent]
        target = scn.lane_idx[agent] + (-1 if name == "LANE_LEFT" else 1)
        if 0 <= target < len(layout.lane_paths) and layout.enterable[target]:
            scn.lane_idx[agent] = target
    return accel, lane_keep_steer(scn, agent)


def _resolve_controls(scn: ScenarioState, controls):
    resolved = []
    for agent, control in enumerate(controls):
        if isinstance(control, (int, np.integer, str)):
            resolved.append(apply_discrete_action(scn, agent, control))
        else:
            accel, steer = control
            resolved.append((float(accel), float(steer)))
    return resolved


def _nearest_lane_offset(spec: ScenarioSpec, scn: ScenarioState, agent: int) -> float:
    return min(
        abs(path.project(scn.vehicles[agent].x, scn.vehicles[agent].y)[1])
        for path in spec.agents[agent].lane_paths
    )


def _footprint(v: VehicleState) -> Footprint:
    return Footprint(v.x, v.y, v.heading, v.length, v.width)


def scenario_step(scn: ScenarioState, controls) -> tuple:
    """Advance both vehicles one dt; returns (new state, StepOutcome)."""
    if scn.done:
        raise SteppedAfterDone("episode already terminated")
    spec = scn.spec
    new = scn.clone()
    resolved = _resolve_controls(new, controls)

    for agent, (accel, steer) in enumerate(resolved):
        if spec.fixed_speed is not None:
            accel = 0.0
        v = bicycle_step(new.vehicles[agent], accel, steer, spec.dt,
                         v_max=spec.v_max, steer_max=spec.steer_max)
        path = spec.agents[agent].lane_paths[new.lane_idx[agent]]
        s, _, _ = path.project(v.x, v.y)
        new.vehicles[agent] = VehicleState(
            x=v.x, y=v.y, heading=v.heading, speed=v.speed,
            length=v.length, width=v.width,
            lane_index=new.lane_idx[agent], progress=s,
        )

    # Events: vehicle-vehicle and vehicle-obstacle collisions, road departure.
    fp = [_footprint(v) for v in new.vehicles]
    crash = rectangles_overlap(fp[0], fp[1])
    collision = [crash, crash]
    for agent in (0, 1):
        for obs in spec.obstacles:
            if rectangles_overlap(fp[agent], obs):
                collision[agent] = True
    off_road = [
        _nearest_lane_offset(spec, new, agent) > spec.lane_width / 2.0 + 0.05
        for agent in (0, 1)
    ]

    # Finish bookkeeping (latched; simultaneous arrivals both rank first).
    already_finished = any(new.finished)
    bonuses = [0.0, 0.0]
    for agent in (0, 1):
        layout = spec.agents[agent]
        threshold = layout.finish_progress[new.lane_idx[agent]]
        if threshold is not None and not new.finished[agent] \
                and new.vehicles[agent].progress >= threshold:
            new.finished[agent] = True
            new.arrival_rank[agent] = 1 if already_finished else 0
            bonuses[agent] = spec.finish_second if already_finished else spec.finish_first

    rewards = [0.0, 0.0]
    costs = [0.0, 0.0]
    lo, hi = spec.speed_band
    for agent in (0, 1):
        speed = new.vehicles[agent].speed
        band = spec.speed_reward if lo <= speed <= hi else 0.0
        if spec.kind == "racetrack":
            if off_road[agent]:
                rewards[agent] = 0.0
            else:
                lat = _nearest_lane_offset(spec, new, agent)
                centering = max(0.0, 1.0 - lat / (spec.lane_width / 2.0))
                rewards[agent] = band + centering
        else:
            rewards[agent] = band + bonuses[agent]
        if collision[agent]:
            costs[agent] = spec.collision_cost

    new.steps += 1
    new.done = (
        new.steps >= spec.horizon
        or all(new.finished)
        or any(collision)
    )

    obs1, obs2, global_state = observe(new)
    outcome = StepOutcome(
        obs1=obs1, obs2=obs2, global_state=global_state,
        r1=rewards[0], r2=rewards[1], c1=costs[0], c2=costs[1],
        done=new.done,
        collision1=collision[0], collision2=collision[1],
        off_road1=off_road[0], off_road2=off_road[1],
        finished1=new.finished[0], finished2=new.finished[1],
    )
    return new, outcome


def _landmarks(spec: ScenarioSpec, scn: ScenarioState, agent: int) -> list:
    v = scn.vehicles[agent]
    layout = spec.agents[agent]
    lane_frac = scn.lane_idx[agent] / max(len(layout.lane_paths) - 1, 1)
    if spec.kind == "racetrack":
        path = layout.lane_paths[scn.lane_idx[agent]]
        s = v.progress
        seg, local = path._locate(s)
        seg2, _ = path._locate(s + 10.0)
        curv_now = getattr(seg, "direction", 0.0) / seg.radius if isinstance(seg, ArcSegment) else 0.0
        curv_ahead = getattr(seg2, "direction", 0.0) / seg2.radius if isinstance(seg2, ArcSegment) else 0.0
        return [curv_now * 15.0, curv_ahead * 15.0, lane_frac]
    finish = layout.finish_progress[scn.lane_idx[agent]]
    d_finish = ((finish - v.progress) / 100.0) if finish is not None else 1.0
    cx, cy = layout.conflict_xy
    d_conflict = math.hypot(cx - v.x, cy - v.y) / 100.0
    return [d_finish, d_conflict, lane_frac]


def _own_features(spec: ScenarioSpec, scn: ScenarioState, agent: int) -> list:
    v = scn.vehicles[agent]
    path = spec.agents[agent].lane_paths[scn.lane_idx[agent]]
    s, lat, _ = path.project(v.x, v.y)
    h_err = wrap_angle(v.heading - path.heading_at(s))
    return [
        v.x / 100.0, v.y / 100.0, math.cos(v.heading), math.sin(v.heading),
        v.speed / 15.0, lat / 4.0, math.cos(h_err), math.sin(h_err), s / 100.0,
    ]


def observe(scn: ScenarioState):
    """(obs1, obs2, global_state): local route-frame views plus a shared state.

    Local observation: own pose/speed/lane-frame features, the other
    vehicle's relative pose and speed, then scenario landmarks. All features
    are scaled to roughly [-1, 1]; lengths are constant per scenario.
    """
    spec = scn.spec
    obs = []
    for agent in (0, 1):
        me = scn.vehicles[agent]
        other = scn.vehicles[1 - agent]
        dh = wrap_angle(other.heading - me.heading)
        rel = [
            (other.x - me.x) / 50.0, (other.y - me.y) / 50.0,
            (other.speed - me.speed) / 15.0, math.cos(dh), math.sin(dh),
        ]
        obs.append(np.array(
            _own_features(spec, scn, agent) + rel + _landmarks(spec, scn, agent)))
    g = []
    for agent in (0, 1):
        v = scn.vehicles[agent]
        g += [v.x / 100.0, v.y / 100.0, math.cos(v.heading), math.sin(v.heading), v.speed / 15.0]
    g += _landmarks(spec, scn, 0) + _landmarks(spec, scn, 1)
    return obs[0], obs[1], np.array(g)
