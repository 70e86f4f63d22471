"""Control priors.

Cart-pole: a state-independent constant push to one side (a deliberately
biased prior). Racing: Stanley lateral control on the front-axle crosstrack
error plus symmetric longitudinal P-controllers tracking a curve-dependent
target speed, with a clipped linear gain schedule that softens braking at
high speed.

Sign conventions match :mod:`cheq.envs.racing`: positive steering means a
right turn and the crosstrack error is positive with the car left of the
centerline, so the Stanley law steers back toward the path with positive
gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envs.racing import RaceCarState
from .envs.track import Track, curve_radius_ahead
from .envs.vehicle import VehicleParams


@dataclass
class StanleyGains:
    """Lateral + longitudinal controller gains (paper-default values)."""

    k_cross: float = 0.5   # 1/s
    k_soft: float = 1.0    # m/s
    k_r: float = 0.4       # 1/s
    v_max: float = 8.0     # m/s
    k_v_max: float = 0.25  # s/m
    k_v_min: float = 0.05  # s/m
    v_low: float = 8.0     # m/s
    v_high: float = 28.0   # m/s

    def __post_init__(self):
        if not (self.k_v_max > self.k_v_min > 0):
            raise ValueError("need k_v_max > k_v_min > 0")
        if not (self.v_high > self.v_low):
            raise ValueError("need v_high > v_low")
        if min(self.k_cross, self.k_soft, self.k_r, self.v_max) <= 0:
            raise ValueError("gains must be positive")


def constant_force_prior(f_bias: float = 5.0) -> float:
    """Biased cart-pole prior: the same leftward force every call."""
    return -f_bias


def stanley_lateral(heading_error: float, crosstrack_error: float, v: float,
                    gains: StanleyGains, steer_limit: float = math.inf) -> float:
    """delta = heading_error + k_cross * e / (v + k_soft), clamped."""
    if v < 0:
        raise ValueError("stanley control needs v >= 0")
    delta = heading_error + gains.k_cross * crosstrack_error / (v + gains.k_soft)
    return min(max(delta, -steer_limit), steer_limit)


def target_velocity(radius: float, gains: StanleyGains) -> float:
    """v_target = min(k_r * R, v_max)."""
    if radius <= 0:
        raise ValueError("curve radius must be positive")
    return min(gains.k_r * radius, gains.v_max)


def gain_schedule(v: float, gains: StanleyGains) -> float:
    """Clipped linear interpolation from k_v_max at v_low down to k_v_min
    at v_high."""
    if v < 0:
        raise ValueError("gain schedule needs v >= 0")
    k = (gains.k_v_max - gains.k_v_min) / (gains.v_low - gains.v_high) \
        * (v - gains.v_low) + gains.k_v_max
    return min(max(k, gains.k_v_min), gains.k_v_max)


def longitudinal_control(v: float, v_target: float, k_v: float):
    """Symmetric P-controllers; throttle and brake are never both active."""
    err = v_target - v
    if err >= 0:
        return min(max(k_v * err, 0.0), 1.0), 0.0
    return 0.0, min(max(k_v * (-err), 0.0), 1.0)


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def racing_prior(state: RaceCarState, track: Track, gains: StanleyGains,
                 vehicle: VehicleParams | None = None) -> np.ndarray:
    """Path-following action (throttle, brake, steer) for the current state.

    Lateral: Stanley law on the front-axle crosstrack error with the
    nearest-point path tangent. Longitudinal: target speed from the curve
    radius ahead, tracked through the scheduled P-controllers.
    """
    p = vehicle or VehicleParams.default()
    front = (state.x + p.lf * math.cos(state.psi),
             state.y + p.lf * math.sin(state.psi))
    _, _, e, tangent = track.nearest(front, s_hint=state.s)
    theta_path = math.atan2(tangent[1], tangent[0])
    heading_error = _wrap_angle(state.psi - theta_path)
    v = max(state.vx, 0.0)
    delta = stanley_lateral(heading_error, e, v, gains, steer_limit=p.steer_max)

    radius = curve_radius_ahead(track, state.s)
    v_t = target_velocity(radius, gains)
    k_v = gain_schedule(v, gains)
    throttle, brake = longitudinal_control(v, v_t, k_v)
    return np.array([throttle, brake, delta / p.steer_max])
