"""Continuous-force cart-pole.

Classic cart-pole dynamics driven by a continuous horizontal force,
integrated with semi-implicit Euler. The reward favors balancing while
keeping the cart near the origin: 1 - 0.05*|x| per upright step, 0 on the
step that violates the angle or position bound.

State layout: [x, x_dot, phi, phi_dot] with phi = 0 upright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import StepResult


@dataclass
class CartPoleParams:
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    pole_half_length: float = 0.5
    gravity: float = 9.8
    force_max: float = 10.0
    dt: float = 0.02
    angle_limit: float = 0.21   # rad
    x_limit: float = 2.4        # m
    max_steps: int = 500


def cartpole_step(state, force: float, params: CartPoleParams | None = None) -> StepResult:
    """One semi-implicit Euler step of the cart-pole dynamics.

    ``force`` is in newtons within [-force_max, force_max]. Termination via
    the step cap is the environment's job; this function only flags bound
    violations (failure).
    """
    p = params or CartPoleParams()
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (4,) or not np.all(np.isfinite(state)) or not math.isfinite(force):
        raise ValueError("cartpole_step needs a finite 4-state and force")
    force = float(np.clip(force, -p.force_max, p.force_max))
    x, x_dot, phi, phi_dot = state

    total_mass = p.cart_mass + p.pole_mass
    ml = p.pole_mass * p.pole_half_length
    sin_phi = math.sin(phi)
    cos_phi = math.cos(phi)

    temp = (force + ml * phi_dot * phi_dot * sin_phi) / total_mass
    phi_acc = (p.gravity * sin_phi - cos_phi * temp) / (
        p.pole_half_length * (4.0 / 3.0 - p.pole_mass * cos_phi * cos_phi / total_mass))
    x_acc = temp - ml * phi_acc * cos_phi / total_mass

    x_dot = x_dot + p.dt * x_acc
    x = x + p.dt * x_dot
    phi_dot = phi_dot + p.dt * phi_acc
    phi = phi + p.dt * phi_dot

    next_state = np.array([x, x_dot, phi, phi_dot])
    failure = abs(phi) > p.angle_limit or abs(x) > p.x_limit
    reward = 0.0 if failure else 1.0 - 0.05 * abs(x)
    return StepResult(next_state, reward, failure, failure, {})


class CartPoleEnv:
    """Episode wrapper: reset noise, step cap, action normalization.

    Actions through :meth:`step` are normalized to [-1, 1] and scaled by
    force_max; :func:`cartpole_step` below takes raw newtons.
    """

    obs_dim = 4
    act_dim = 1
    action_low = np.array([-1.0])
    action_high = np.array([1.0])

    def __init__(self, params: CartPoleParams | None = None):
        self.params = params or CartPoleParams()
        self.state = np.zeros(4)
        self.steps = 0

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.state = rng.uniform(-0.05, 0.05, size=4)
        self.steps = 0
        return self.observe()

    def eval_reset(self, rng: np.random.Generator) -> np.ndarray:
        return self.reset(rng)

    def observe(self) -> np.ndarray:
        return self.state.copy()

    def step(self, action) -> StepResult:
        force = float(np.clip(action[0], -1.0, 1.0)) * self.params.force_max
        res = cartpole_step(self.state, force, self.params)
        self.state = res.next_state
        self.steps += 1
        if self.steps >= self.params.max_steps:
            res.terminated = True
        res.next_state = self.state.copy()
        return res
