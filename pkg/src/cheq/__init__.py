"""Adaptive hybrid RL lab.

Blends a classical control prior with an ensemble-critic SAC agent through
a per-step weight; the weight follows the critic ensemble's disagreement so
the prior takes over wherever the agent is still uncertain. Ships the two
study environments (continuous cart-pole, single-track racing), the
baselines, and the experiment harness behind the ``cheq`` CLI.
"""

from . import backend
from .hybrid import (WeightAdaptor, WeightConfig, adapt_weight_cheq,
                     adapt_weight_core, adapt_weight_schedule,
                     ensemble_uncertainty, mix, mix_residual)
from .nets import AdamState, Network, adam_step, polyak_update

__version__ = "0.1.0"

__all__ = [
    "backend", "Network", "AdamState", "adam_step", "polyak_update",
    "mix", "mix_residual", "ensemble_uncertainty", "WeightConfig",
    "WeightAdaptor", "adapt_weight_cheq", "adapt_weight_core",
    "adapt_weight_schedule",
]
