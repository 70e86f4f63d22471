"""Single-track vehicle parameters and the coupled Dugoff tire model.

The parameter set (a generic front-wheel-drive compact car) lives in
``vehicle_params.json`` next to this module so every consumer reads the
same numbers; individual fields can be overridden through the env config.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from importlib import resources


@dataclass
class VehicleParams:
    mass: float
    yaw_inertia: float
    lf: float                        # CoM to front axle, m
    lr: float                        # CoM to rear axle, m
    cornering_stiffness_front: float  # N/rad
    cornering_stiffness_rear: float
    slip_stiffness_front: float      # N per unit slip ratio
    slip_stiffness_rear: float
    friction: float
    gravity: float
    drive_force_max: float           # front axle, N
    brake_force_max: float           # total, N
    brake_bias_front: float
    drag_coeff: float                # N/(m/s)^2
    rolling_resist: float            # N
    steer_max: float                 # rad
    steer_rate: float                # rad/s
    v_slip_floor: float              # m/s, slip denominators
    body_length: float
    body_width: float

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr

    @property
    def load_front(self) -> float:
        """Static front-axle normal load (no load transfer modeled)."""
        return self.mass * self.gravity * self.lr / self.wheelbase

    @property
    def load_rear(self) -> float:
        return self.mass * self.gravity * self.lf / self.wheelbase

    @classmethod
    def default(cls, **overrides) -> "VehicleParams":
        text = resources.files("cheq.envs").joinpath("vehicle_params.json").read_text()
        data = json.loads(text)
        data.update(overrides)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown vehicle parameters: {sorted(unknown)}")
        return cls(**data)


def tire_forces(slip_long: float, slip_angle: float, normal_load: float,
                c_slip: float, c_alpha: float, mu: float):
    """Coupled Dugoff tire forces for one axle.

    Linear stiffness at small slip, blending into friction saturation via
    the Dugoff factor; the combined force never exceeds mu * Fz.
    Returns (F_long, F_lat) in the wheel frame; the lateral force opposes
    the slip angle.
    """
    if normal_load <= 0.0:
        return 0.0, 0.0
    denom = max(abs(1.0 + slip_long), 1e-6)
    fx0 = c_slip * slip_long / denom
    fy0 = -c_alpha * math.tan(slip_angle) / denom
    demand = math.hypot(fx0, fy0)
    limit = mu * normal_load
    if demand < 1e-12:
        return 0.0, 0.0
    lam = limit / (2.0 * demand)
    scale = 1.0 if lam >= 1.0 else lam * (2.0 - lam)
    return fx0 * scale, fy0 * scale
