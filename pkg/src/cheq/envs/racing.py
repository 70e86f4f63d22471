"""Racing environment: dynamic single-track model on a closed course.

Conventions
-----------
World pose is (x, y, psi) with psi the usual counterclockwise angle of the
heading. Body-frame quantities use x forward and y to the RIGHT, so the
lateral velocity v_y, yaw rate omega and steering angle beta are all
positive for rightward motion/turns. A positive steering action therefore
steers right; the crosstrack error used by the prior is positive when the
car sits left of the centerline.

Actions are (throttle in [0,1], brake in [0,1], steer in [-1,1]) where the
steer component is the setpoint fraction of the mechanical steering limit;
the actual steering angle tracks it through a rate limiter.

Reward per step: -1 * fail - 0.2 * collision + 0.01 * (track tangent . world
velocity). Leaving the track with the center of mass fails and terminates;
touching the boundary with a body corner is the non-terminal collision case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import StepResult
from .track import Track
from .vehicle import VehicleParams, tire_forces

N_LOOKAHEAD = 20
LOOKAHEAD_SPACING = 3.0  # m, samples at s+3, s+6, ..., s+60


@dataclass
class RaceCarState:
    x: float
    y: float
    psi: float      # heading, CCW world angle
    vx: float       # body forward velocity
    vy: float       # body lateral velocity, right-positive
    omega: float    # yaw rate, clockwise-positive
    beta: float     # steering angle, right-positive
    s: float        # track progress arclength


def _axle_forces(state: RaceCarState, throttle: float, brake: float,
                 p: VehicleParams):
    """Per-axle Dugoff forces in the body frame plus resistances.

    Longitudinal demand is turned into a pseudo slip ratio through the
    linear slip stiffness; brake demand follows the direction of motion so
    a standing car stays put.
    """
    vx_eff = max(abs(state.vx), p.v_slip_floor)
    move_dir = min(max(state.vx / p.v_slip_floor, -1.0), 1.0)

    f_brake = brake * p.brake_force_max
    dem_f = throttle * p.drive_force_max - move_dir * p.brake_bias_front * f_brake
    dem_r = -move_dir * (1.0 - p.brake_bias_front) * f_brake

    slip_f = dem_f / p.slip_stiffness_front
    slip_r = dem_r / p.slip_stiffness_rear
    alpha_f = math.atan2(state.vy + p.lf * state.omega, vx_eff) - state.beta
    alpha_r = math.atan2(state.vy - p.lr * state.omega, vx_eff)

    fxw_f, fyw_f = tire_forces(slip_f, alpha_f, p.load_front,
                               p.slip_stiffness_front,
                               p.cornering_stiffness_front, p.friction)
    fx_r, fy_r = tire_forces(slip_r, alpha_r, p.load_rear,
                             p.slip_stiffness_rear,
                             p.cornering_stiffness_rear, p.friction)
    cb, sb = math.cos(state.beta), math.sin(state.beta)
    fx_f = fxw_f * cb - fyw_f * sb
    fy_f = fxw_f * sb + fyw_f * cb

    f_resist = p.drag_coeff * state.vx * abs(state.vx) + p.rolling_resist * move_dir
    return fx_f, fy_f, fx_r, fy_r, f_resist


def _integrate(state: RaceCarState, throttle: float, brake: float,
               steer_cmd: float, p: VehicleParams, dt: float) -> RaceCarState:
    """One semi-implicit Euler substep (velocities first, then pose)."""
    d_beta = steer_cmd - state.beta
    max_d = p.steer_rate * dt
    beta = state.beta + min(max(d_beta, -max_d), max_d)
    beta = min(max(beta, -p.steer_max), p.steer_max)
    state = replace(state, beta=beta)

    fx_f, fy_f, fx_r, fy_r, f_resist = _axle_forces(state, throttle, brake, p)
    ax = (fx_f + fx_r - f_resist) / p.mass + state.omega * state.vy
    ay = (fy_f + fy_r) / p.mass - state.omega * state.vx
    domega = (p.lf * fy_f - p.lr * fy_r) / p.yaw_inertia

    vx = state.vx + dt * ax
    vy = state.vy + dt * ay
    omega = state.omega + dt * domega
    # keep the standstill a fixed point under brake/rolling friction
    if abs(vx) < 0.02 and throttle <= 1e-12 and abs(state.vx) < 0.02:
        vx = 0.0
        if abs(vy) < 0.02:
            vy, omega = 0.0, 0.0

    cp, sp = math.cos(state.psi), math.sin(state.psi)
    x = state.x + dt * (vx * cp + vy * sp)
    y = state.y + dt * (vx * sp - vy * cp)
    psi = state.psi - dt * omega
    return RaceCarState(x, y, psi, vx, vy, omega, beta, state.s)


def _corners(state: RaceCarState, p: VehicleParams):
    f = np.array([math.cos(state.psi), math.sin(state.psi)])
    r = np.array([math.sin(state.psi), -math.cos(state.psi)])
    com = np.array([state.x, state.y])
    hl, hw = 0.5 * p.body_length, 0.5 * p.body_width
    return [com + sf * hl * f + sr * hw * r for sf in (1, -1) for sr in (1, -1)]


def racing_step(state: RaceCarState, action, track: Track,
                params: VehicleParams | None = None, dt: float = 0.05,
                substeps: int = 5) -> StepResult:
    """Advance the car by one control step.

    ``action`` is (throttle, brake, steer) in its box; inputs are clipped.
    The returned info carries the collision flag, the velocity projection
    onto the track direction and the signed progress increment.
    """
    p = params or VehicleParams.default()
    vals = [state.x, state.y, state.psi, state.vx, state.vy, state.omega, state.beta]
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("non-finite car state")
    throttle = min(max(float(action[0]), 0.0), 1.0)
    brake = min(max(float(action[1]), 0.0), 1.0)
    steer_cmd = min(max(float(action[2]), -1.0), 1.0) * p.steer_max

    sub_dt = dt / substeps
    for _ in range(substeps):
        state = _integrate(state, throttle, brake, steer_cmd, p, sub_dt)

    s_old = state.s
    s, dist, _, tangent = track.nearest((state.x, state.y), s_hint=s_old)
    state = replace(state, s=s)
    ds = s - s_old
    if ds > 0.5 * track.length:
        ds -= track.length
    elif ds < -0.5 * track.length:
        ds += track.length

    cp, sp = math.cos(state.psi), math.sin(state.psi)
    v_world = (state.vx * cp + state.vy * sp, state.vx * sp - state.vy * cp)
    proj = tangent[0] * v_world[0] + tangent[1] * v_world[1]

    width = float(track.width_at(s))
    failure = dist > width
    collision = False
    if not failure:
        for c in _corners(state, p):
            cs, cdist, _, _ = track.nearest(c, s_hint=s)
            if cdist > float(track.width_at(cs)):
                collision = True
                break
    reward = -1.0 * failure - 0.2 * collision + 0.01 * proj
    info = {"collision": collision, "speed_proj": proj, "progress": ds}
    return StepResult(state, reward, failure, failure, info)


def observe(state: RaceCarState, track: Track) -> np.ndarray:
    """44-entry observation: (vx, vy, omega, beta) and 20 lookahead offsets.

    The offsets are vehicle-frame vectors to centerline points sampled
    every 3 m over the 60 m ahead, wrapping around the loop.
    """
    offsets = LOOKAHEAD_SPACING * np.arange(1, N_LOOKAHEAD + 1)
    pts = track.sample(state.s + offsets)
    dx = pts[:, 0] - state.x
    dy = pts[:, 1] - state.y
    cp, sp = math.cos(state.psi), math.sin(state.psi)
    local_x = dx * cp + dy * sp
    local_y = dx * sp - dy * cp
    out = np.empty(4 + 2 * N_LOOKAHEAD)
    out[0], out[1], out[2], out[3] = state.vx, state.vy, state.omega, state.beta
    out[4::2] = local_x
    out[5::2] = local_y
    return out


class RacingEnv:
    """Episode wrapper around :func:`racing_step`.

    Training resets spawn at a random arclength to spread coverage over the
    lap; evaluation resets start at the line (s = 0). Episodes end on
    failure or after ``max_steps``.
    """

    act_dim = 3
    action_low = np.array([0.0, 0.0, -1.0])
    action_high = np.array([1.0, 1.0, 1.0])

    def __init__(self, track: Track, params: VehicleParams | None = None,
                 dt: float = 0.05, substeps: int = 5, max_steps: int = 1000,
                 spawn_speed: float = 3.0):
        self.track = track
        self.params = params or VehicleParams.default()
        self.dt = dt
        self.substeps = substeps
        self.max_steps = max_steps
        self.spawn_speed = spawn_speed
        self.state: RaceCarState | None = None
        self.steps = 0

    @property
    def obs_dim(self) -> int:
        return 4 + 2 * N_LOOKAHEAD

    def reset(self, rng: np.random.Generator | None = None,
              spawn_s: float | None = None) -> np.ndarray:
        if spawn_s is None:
            spawn_s = float(rng.uniform(0.0, self.track.length)) if rng is not None else 0.0
        pos = self.track.sample(spawn_s)
        tan = self.track.tangent(spawn_s)
        psi = math.atan2(tan[1], tan[0])
        self.state = RaceCarState(float(pos[0]), float(pos[1]), psi,
                                  self.spawn_speed, 0.0, 0.0, 0.0, float(spawn_s))
        self.steps = 0
        return self.observe()

    def eval_reset(self, rng=None) -> np.ndarray:
        return self.reset(spawn_s=0.0)

    def observe(self) -> np.ndarray:
        return observe(self.state, self.track)

    def step(self, action) -> StepResult:
        res = racing_step(self.state, action, self.track, self.params,
                          self.dt, self.substeps)
        self.state = res.next_state
        self.steps += 1
        if self.steps >= self.max_steps:
            res.terminated = True
        return res
