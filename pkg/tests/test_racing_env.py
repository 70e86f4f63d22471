import math

import numpy as np
import pytest

from cheq.envs.racing import (N_LOOKAHEAD, RaceCarState, RacingEnv, observe,
                              racing_step)
from cheq.envs.track import Track, generate_track
from cheq.envs.vehicle import VehicleParams


def straight_segment_track(length=400.0, width=5.0):
    """A long thin 'stadium' loop whose +x leg is effectively straight."""
    n = 200
    half = length / 2
    right = np.stack([np.linspace(-half, half, n), np.full(n, 0.0)], axis=1)
    # connect back far away so the straight leg is locally isolated
    arc1 = np.stack([half + 60 * np.sin(np.linspace(0, np.pi, 80)),
                     60 - 60 * np.cos(np.linspace(0, np.pi, 80))], axis=1)
    left = np.stack([np.linspace(half, -half, n), np.full(n, 120.0)], axis=1)
    arc2 = np.stack([-half - 60 * np.sin(np.linspace(0, np.pi, 80)),
                     60 + 60 * np.cos(np.linspace(0, np.pi, 80))], axis=1)
    pts = np.vstack([right, arc1[1:-1], left, arc2[1:-1]])
    return Track(pts, width)


@pytest.fixture(scope="module")
def track():
    return straight_segment_track()


@pytest.fixture(scope="module")
def veh():
    return VehicleParams.default()


def state_on_straight(track, s=50.0, v=10.0):
    pos = track.sample(s)
    return RaceCarState(float(pos[0]), float(pos[1]), 0.0, v, 0.0, 0.0, 0.0,
                        float(s))


class TestStep:
    def test_rest_is_fixed_point_with_zero_reward(self, track, veh):
        st = state_on_straight(track, v=0.0)
        res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
        assert res.reward == 0.0
        assert res.next_state.vx == 0.0 and res.next_state.vy == 0.0
        assert res.next_state.x == st.x and res.next_state.y == st.y
        assert not res.terminated

    def test_reward_is_speed_projection(self, track, veh):
        st = state_on_straight(track, v=10.0)
        res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
        # drag slows the car slightly within the step; projection uses the
        # end-of-step velocity
        assert res.reward == pytest.approx(0.01 * res.next_state.vx, rel=1e-6)
        assert res.reward == pytest.approx(0.1, rel=0.02)
        assert not res.info["collision"]

    def test_failure_when_com_leaves_track(self, track, veh):
        st = state_on_straight(track, v=10.0)
        st = RaceCarState(st.x, st.y + 5.5, st.psi, st.vx, 0.0, 0.0, 0.0, st.s)
        res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
        assert res.failure and res.terminated
        assert res.reward == pytest.approx(-1.0 + 0.01 * res.info["speed_proj"])

    def test_collision_without_failure(self, track, veh):
        # CoM just inside, body corner pokes out
        st = state_on_straight(track, v=5.0)
        st = RaceCarState(st.x, st.y + 4.5, st.psi, st.vx, 0.0, 0.0, 0.0, st.s)
        res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
        assert res.info["collision"] and not res.failure
        assert res.reward == pytest.approx(-0.2 + 0.01 * res.info["speed_proj"])

    def test_positive_steer_turns_right(self, track, veh):
        st = state_on_straight(track, v=8.0)
        res = racing_step(st, (0.0, 0.0, 1.0), track, veh)
        for _ in range(10):
            res = racing_step(res.next_state, (0.0, 0.0, 1.0), track, veh)
        # heading along +x, right turn means y decreases
        assert res.next_state.y < st.y

    def test_energy_non_increasing_coasting(self, track, veh):
        st = state_on_straight(track, v=12.0)
        ke = 0.5 * veh.mass * (st.vx ** 2 + st.vy ** 2)
        for _ in range(50):
            res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
            st = res.next_state
            ke_next = 0.5 * veh.mass * (st.vx ** 2 + st.vy ** 2)
            assert ke_next <= ke + 1e-9
            ke = ke_next

    def test_nonfinite_state_rejected(self, track, veh):
        st = state_on_straight(track)
        bad = RaceCarState(math.nan, st.y, st.psi, st.vx, 0, 0, 0, st.s)
        with pytest.raises(ValueError):
            racing_step(bad, (0, 0, 0), track, veh)

    def test_termination_iff_com_outside(self, track, veh, rng):
        for _ in range(40):
            off = float(rng.uniform(-7, 7))
            st = state_on_straight(track, v=3.0)
            st = RaceCarState(st.x, st.y + off, st.psi, st.vx, 0.0, 0.0, 0.0, st.s)
            res = racing_step(st, (0.0, 0.0, 0.0), track, veh)
            ns = res.next_state
            _, dist, _, _ = track.nearest((ns.x, ns.y), s_hint=ns.s)
            outside = dist > float(track.width_at(ns.s))
            assert res.failure == outside


class TestObservation:
    def test_straight_centerline_geometry(self, track):
        st = state_on_straight(track, s=50.0, v=7.0)
        obs = observe(st, track)
        assert obs.shape == (4 + 2 * N_LOOKAHEAD,)
        xs = obs[4::2]
        ys = obs[5::2]
        np.testing.assert_allclose(xs, 3.0 * np.arange(1, 21), atol=1e-6)
        np.testing.assert_allclose(ys, 0.0, atol=1e-6)
        assert obs[0] == 7.0

    def test_world_rotation_invariance(self, rng):
        t = generate_track(5)
        s = float(rng.uniform(0, t.length))
        pos = t.sample(s)
        tan = t.tangent(s)
        psi = math.atan2(tan[1], tan[0])
        st = RaceCarState(float(pos[0]), float(pos[1]), psi, 6.0, 0.4, 0.1,
                          0.02, s)
        base = observe(st, t)
        rho = 0.7  # rotate the whole world
        c, sn = math.cos(rho), math.sin(rho)
        rot = np.array([[c, -sn], [sn, c]])
        pts = t.points @ rot.T
        t2 = Track(pts, t.half_width)
        p2 = rot @ np.array([st.x, st.y])
        st2 = RaceCarState(float(p2[0]), float(p2[1]), psi + rho, 6.0, 0.4,
                           0.1, 0.02, s)
        # arclength is preserved by rotation
        np.testing.assert_allclose(observe(st2, t2), base, atol=1e-6)

    def test_wraparound_no_discontinuity(self):
        t = generate_track(8)
        s = t.length - 10.0  # lookahead crosses the start line
        pos = t.sample(s)
        tan = t.tangent(s)
        st = RaceCarState(float(pos[0]), float(pos[1]),
                          math.atan2(tan[1], tan[0]), 5.0, 0.0, 0.0, 0.0, s)
        obs = observe(st, t)
        pts = obs[4:].reshape(20, 2)
        gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        np.testing.assert_allclose(gaps, 3.0, atol=0.5)


class TestEnv:
    def test_friction_circle_holds_during_rollout(self, rng):
        t = generate_track(1)
        env = RacingEnv(t, max_steps=300)
        env.reset(rng)
        # tire_forces caps by construction; drive hard and watch stability
        for _ in range(300):
            a = np.array([1.0, 0.0, float(rng.uniform(-1, 1))])
            res = env.step(a)
            st = env.state
            assert all(np.isfinite([st.x, st.y, st.psi, st.vx, st.vy,
                                    st.omega, st.beta]))
            if res.terminated:
                break

    def test_spawn_modes(self, rng):
        t = generate_track(1)
        env = RacingEnv(t)
        env.eval_reset()
        assert env.state.s == 0.0
        env.reset(rng)
        assert 0.0 <= env.state.s < t.length

    def test_observation_length_always_44(self, rng):
        t = generate_track(1)
        env = RacingEnv(t, max_steps=100)
        obs = env.reset(rng)
        assert obs.shape == (44,)
        for _ in range(60):
            res = env.step(np.array([0.5, 0.0, 0.1]))
            assert env.observe().shape == (44,)
            if res.terminated:
                break
