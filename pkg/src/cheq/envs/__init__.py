"""Evaluation environments: continuous-force cart-pole and the racing task."""

from dataclasses import dataclass, field


@dataclass
class StepResult:
    """Outcome of one environment step.

    ``terminated`` covers both real failures and the step cap; ``failure``
    is set only when the physical failure condition fired (pole/cart out of
    bounds, center of mass off the track). failure implies terminated.
    """

    next_state: object
    reward: float
    terminated: bool
    failure: bool
    info: dict = field(default_factory=dict)


from .cartpole import CartPoleEnv, CartPoleParams, cartpole_step  # noqa: E402
from .track import Track, generate_track, curve_radius  # noqa: E402
from .vehicle import VehicleParams, tire_forces  # noqa: E402
from .racing import RacingEnv, RaceCarState, racing_step, observe  # noqa: E402

__all__ = [
    "StepResult", "CartPoleEnv", "CartPoleParams", "cartpole_step",
    "Track", "generate_track", "curve_radius",
    "VehicleParams", "tire_forces",
    "RacingEnv", "RaceCarState", "racing_step", "observe",
]
