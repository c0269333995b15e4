import dataclasses
import math

import numpy as np
import pytest

from csmarl.driving import (
    DISCRETE_ACTIONS,
    SCENARIO_KINDS,
    DrivingEnv,
    Footprint,
    ReplayRecorder,
    SteppedAfterDone,
    VehicleState,
    apply_discrete_action,
    bicycle_step,
    observe,
    rectangles_overlap,
    reset,
    scenario_step,
)

IDLE = DISCRETE_ACTIONS.index("IDLE")
FASTER = DISCRETE_ACTIONS.index("FASTER")
LANE_LEFT = DISCRETE_ACTIONS.index("LANE_LEFT")


class TestBicycle:
    def test_straight_line_displacement_exact(self):
        v = VehicleState(x=0.0, y=0.0, heading=0.0, speed=10.0)
        out = bicycle_step(v, accel=0.0, steer=0.0, dt=0.1)
        assert out.x == pytest.approx(1.0, abs=1e-12)
        assert out.y == 0.0 and out.heading == 0.0 and out.speed == 10.0

    def test_zero_speed_is_stationary(self):
        v = VehicleState(x=3.0, y=-2.0, heading=0.7, speed=0.0)
        out = bicycle_step(v, accel=0.0, steer=0.4, dt=0.1)
        assert (out.x, out.y, out.heading) == (3.0, -2.0, 0.7)

    def test_speed_clamps_at_zero(self):
        v = VehicleState(x=0, y=0, heading=0, speed=1.0)
        out = bicycle_step(v, accel=-20.0, steer=0.0, dt=0.1)
        assert out.speed == 0.0

    def test_speed_clamps_at_vmax(self):
        v = VehicleState(x=0, y=0, heading=0, speed=14.5)
        out = bicycle_step(v, accel=20.0, steer=0.0, dt=0.1, v_max=15.0)
        assert out.speed == 15.0

    def test_steer_input_clamped(self):
        v = VehicleState(x=0, y=0, heading=0, speed=10.0)
        a = bicycle_step(v, 0.0, 5.0, 0.1, steer_max=0.5)
        b = bicycle_step(v, 0.0, 0.5, 0.1, steer_max=0.5)
        assert a == b

    def test_positive_steer_turns_left(self):
        v = VehicleState(x=0, y=0, heading=0.0, speed=10.0)
        out = bicycle_step(v, 0.0, 0.3, 0.1)
        assert out.heading > 0 and out.y > 0

    def test_heading_wraps(self):
        v = VehicleState(x=0, y=0, heading=math.pi - 1e-3, speed=10.0)
        out = bicycle_step(v, 0.0, 0.5, 0.1)
        assert -math.pi < out.heading <= math.pi


class TestCollision:
    def test_overlap_detected(self):
        a = Footprint(0, 0, 0, 5, 2)
        b = Footprint(3, 0, 0, 5, 2)
        assert rectangles_overlap(a, b)

    def test_separated(self):
        a = Footprint(0, 0, 0, 5, 2)
        b = Footprint(10, 0, 0, 5, 2)
        assert not rectangles_overlap(a, b)

    def test_rotation_matters(self):
        # Laterally adjacent: only overlaps when one rotates into the gap.
        a = Footprint(0, 0, 0, 5, 2)
        b = Footprint(0, 2.5, 0, 5, 2)
        assert not rectangles_overlap(a, b)
        c = Footprint(0, 2.5, math.pi / 4, 5, 2)
        assert rectangles_overlap(a, c)

    def test_diagonal_near_miss(self):
        a = Footprint(0, 0, math.pi / 4, 5, 2)
        b = Footprint(4.0, -4.0, -math.pi / 4, 5, 2)
        assert not rectangles_overlap(a, b)


class TestDiscreteActions:
    def test_idle_on_centered_lane(self):
        scn = reset("merge", 0)
        v = scn.vehicles[0]
        scn.vehicles[0] = dataclasses.replace(v, y=0.0, heading=0.0)
        accel, steer = apply_discrete_action(scn, 0, "IDLE")
        assert accel == 0.0 and steer == pytest.approx(0.0, abs=1e-9)

    def test_faster_uses_config_delta(self):
        scn = reset("merge", 0)
        accel, _ = apply_discrete_action(scn, 0, "FASTER")
        assert accel == 2.0

    def test_lane_left_at_leftmost_degrades_to_idle(self):
        scn = reset("merge", 1)
        scn.lane_idx[0] = 0
        _, steer_idle = apply_discrete_action(scn, 0, "IDLE")
        _, steer_left = apply_discrete_action(scn, 0, "LANE_LEFT")
        assert scn.lane_idx[0] == 0
        assert steer_left == steer_idle

    def test_ramp_not_enterable_from_main(self):
        scn = reset("merge", 2)
        assert scn.lane_idx[0] == 1
        apply_discrete_action(scn, 0, "LANE_RIGHT")
        assert scn.lane_idx[0] == 1

    def test_lane_left_changes_target(self):
        scn = reset("merge", 3)
        apply_discrete_action(scn, 1, "LANE_LEFT")
        assert scn.lane_idx[1] == 1


class TestScenarioStep:
    def test_speed_band_reward(self):
        scn = reset("merge", 0)
        scn.vehicles[0] = dataclasses.replace(scn.vehicles[0], speed=10.0)
        _, out = scenario_step(scn, (IDLE, IDLE))
        assert out.r1 == 2.0 and out.c1 == 0.0

    def test_out_of_band_speed_no_reward(self):
        scn = reset("merge", 0)
        scn.vehicles[0] = dataclasses.replace(scn.vehicles[0], speed=14.0)
        _, out = scenario_step(scn, (IDLE, IDLE))
        assert out.r1 == 0.0

    def test_overlapping_vehicles_cost_and_done(self):
        scn = reset("merge", 0)
        scn.vehicles[1] = dataclasses.replace(
            scn.vehicles[0], y=scn.vehicles[0].y + 1.0)
        _, out = scenario_step(scn, (IDLE, IDLE))
        assert out.c1 == 5.0 and out.c2 == 5.0
        assert out.collision1 and out.collision2 and out.done

    def test_finish_bonuses_first_then_second(self):
        scn = reset("merge", 0)
        spec = scn.spec
        finish = spec.agents[0].finish_progress[1]
        path = spec.agents[0].lane_paths[1]
        x0, y0 = path.point_at(finish - 0.5)
        scn.vehicles[0] = dataclasses.replace(
            scn.vehicles[0], x=x0, y=y0, speed=10.0, progress=finish - 0.5)
        scn.lane_idx[1] = 1
        x1, y1 = path.point_at(finish - 6.0)
        scn.vehicles[1] = dataclasses.replace(
            scn.vehicles[1], x=x1, y=y0, heading=0.0, speed=10.0, progress=finish - 6.0)
        scn, out = scenario_step(scn, (IDLE, IDLE))
        assert out.r1 == 12.0 and out.finished1 and not out.finished2
        for _ in range(8):
            scn, out = scenario_step(scn, (IDLE, IDLE))
            if out.finished2:
                break
        assert out.finished2 and out.r2 == 7.0
        assert out.done  # both finished

    def test_stepping_after_done_raises(self):
        scn = reset("merge", 0)
        scn.done = True
        with pytest.raises(SteppedAfterDone):
            scenario_step(scn, (IDLE, IDLE))

    def test_input_state_not_mutated(self):
        scn = reset("merge", 5)
        before = (scn.vehicles[0], scn.steps, tuple(scn.lane_idx))
        scenario_step(scn, (FASTER, LANE_LEFT))
        assert (scn.vehicles[0], scn.steps, tuple(scn.lane_idx)) == before


class TestReset:
    def test_same_seed_bit_identical(self):
        a = reset("roundabout", 123)
        b = reset("roundabout", 123)
        assert a.vehicles == b.vehicles and a.lane_idx == b.lane_idx

    def test_merge_idle_rollout_collides(self):
        scn = reset("merge", 7)
        out = None
        for _ in range(scn.spec.horizon):
            scn, out = scenario_step(scn, (IDLE, IDLE))
            if out.done:
                break
        assert out.collision1 or out.collision2

    def test_noise_bounds(self):
        for seed in range(200):
            scn = reset("merge", seed)
            spec = scn.spec
            for agent in (0, 1):
                s = scn.vehicles[agent].progress
                assert abs(s - spec.agents[agent].nominal_progress) <= spec.position_noise + 1e-9
                assert abs(scn.vehicles[agent].speed - spec.agents[agent].nominal_speed) <= spec.speed_noise + 1e-9

    def test_racetrack_fixed_speed(self):
        scn = reset("racetrack", 11)
        assert scn.vehicles[0].speed == 10.0
        scn2, _ = scenario_step(scn, ((5.0, 0.0), (0.0, 0.0)))
        assert scn2.vehicles[0].speed == 10.0  # accel ignored

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            reset("desert", 0)


class TestObserve:
    def test_identical_states_zero_relative_features(self):
        scn = reset("merge", 0)
        scn.vehicles[1] = dataclasses.replace(
            scn.vehicles[0], lane_index=scn.vehicles[1].lane_index)
        scn.lane_idx[1] = scn.lane_idx[0]
        obs1, obs2, _ = observe(scn)
        np.testing.assert_allclose(obs1[9:12], 0.0, atol=1e-12)
        np.testing.assert_allclose(obs2[9:12], 0.0, atol=1e-12)

    def test_lengths_constant_across_episode(self):
        scn = reset("roundabout", 3)
        obs1, obs2, g = observe(scn)
        dims = (len(obs1), len(obs2), len(g))
        for _ in range(30):
            scn, out = scenario_step(scn, (IDLE, IDLE))
            assert (len(out.obs1), len(out.obs2), len(out.global_state)) == dims
            if out.done:
                break

    def test_relative_features_negate_under_swap(self):
        scn = reset("intersection", 4)
        obs1, obs2, _ = observe(scn)
        np.testing.assert_allclose(obs1[9:12], -obs2[9:12], atol=1e-12)
        assert obs1[12] == pytest.approx(obs2[12])   # cos of relative heading
        assert obs1[13] == pytest.approx(-obs2[13])  # sin negates


class TestInvariants:
    @pytest.mark.parametrize("kind", SCENARIO_KINDS)
    def test_cost_collision_equivalence_and_reward_band(self, kind):
        rng = np.random.default_rng(17)
        env = DrivingEnv(kind)
        total_cost = 0.0
        collision_steps = 0
        for episode in range(10):
            env.reset(100 + episode)
            done = False
            while not done:
                if env.discrete:
                    actions = (int(rng.integers(5)), int(rng.integers(5)))
                else:
                    actions = (rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
                out = env.step(actions)
                total_cost += out.c1 + out.c2
                collision_steps += int(out.collision1) + int(out.collision2)
                if kind == "racetrack":
                    assert 0.0 <= out.r1 <= 3.0
                else:
                    base1 = out.r1 if out.r1 < 5.0 else out.r1 - (10.0 if out.r1 >= 10.0 else 5.0)
                    assert 0.0 <= base1 <= 2.0
                done = out.done
        assert total_cost == pytest.approx(5.0 * collision_steps)

    @pytest.mark.parametrize("kind", SCENARIO_KINDS)
    def test_trajectory_determinism(self, kind):
        def rollout():
            env = DrivingEnv(kind)
            env.reset(55)
            rng = np.random.default_rng(9)
            track = []
            done = False
            while not done:
                if env.discrete:
                    actions = (int(rng.integers(5)), int(rng.integers(5)))
                else:
                    actions = (rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
                out = env.step(actions)
                track.append((env.state.vehicles[0], env.state.vehicles[1], out.r1, out.c2))
                done = out.done
            return track

        assert rollout() == rollout()

    @pytest.mark.parametrize("kind", SCENARIO_KINDS)
    def test_horizon_bound(self, kind):
        env = DrivingEnv(kind)
        for episode in range(3):
            env.reset(200 + episode)
            steps = 0
            done = False
            while not done:
                actions = (IDLE, IDLE) if env.discrete else (np.zeros(1), np.zeros(1))
                out = env.step(actions)
                steps += 1
                done = out.done
            assert steps <= env.spec.horizon

    def test_zero_control_physics(self):
        scn = reset("intersection", 2)
        v0 = scn.vehicles[0]
        scn2, _ = scenario_step(scn, ((0.0, 0.0), (0.0, 0.0)))
        v1 = scn2.vehicles[0]
        assert v1.speed == v0.speed and v1.heading == v0.heading
        moved = math.hypot(v1.x - v0.x, v1.y - v0.y)
        assert moved == pytest.approx(v0.speed * scn.spec.dt, abs=1e-12)


class TestReplayExport:
    def test_csv_rows_written(self, tmp_path):
        env = DrivingEnv("merge")
        env.reset(0)
        rec = ReplayRecorder()
        for step in range(5):
            out = env.step((IDLE, IDLE))
            rec.record(step, env.state, (IDLE, IDLE), out)
        path = tmp_path / "replay.csv"
        rec.write(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "step,agent,x,y,heading,speed,action,r,c,events"
        assert len(lines) == 1 + 10
