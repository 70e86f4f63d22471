"""Algorithm variant assembly.

Maps variant names to their agent/adaptor settings: plain SAC and REDQ
(no prior, weight pinned to 1), fixed-weight and schedule hybrids, the
TD-error-weighted hybrid, and the uncertainty-adapted ensemble agent.
"""

from __future__ import annotations

import numpy as np

from ..hybrid import WeightAdaptor, WeightConfig
from .core import AgentConfig, SacEnsembleAgent

VARIANTS = ("sac", "redq", "fixed", "schedule", "core", "cheq")


def variant_defaults(name: str, total_steps: int) -> dict:
    """Agent/adaptor defaults, before per-run overrides."""
    if name == "sac":
        return {"agent": {"ensemble_size": 2, "min_targets": 2, "utd_ratio": 1,
                          "mask_rate": 1.0, "formulation": "stationary"},
                "adaptor": {"variant": "fixed", "value": 1.0},
                "prior": False}
    if name == "redq":
        return {"agent": {"ensemble_size": 5, "min_targets": 2, "utd_ratio": 20,
                          "mask_rate": 1.0, "formulation": "stationary"},
                "adaptor": {"variant": "fixed", "value": 1.0},
                "prior": False}
    if name == "fixed":
        return {"agent": {"ensemble_size": 2, "min_targets": 2, "utd_ratio": 1,
                          "mask_rate": 1.0, "formulation": "stationary"},
                "adaptor": {"variant": "fixed", "value": 0.5},
                "prior": True}
    if name == "schedule":
        return {"agent": {"ensemble_size": 2, "min_targets": 2, "utd_ratio": 1,
                          "mask_rate": 1.0, "formulation": "contextual"},
                "adaptor": {"variant": "schedule", "horizon": total_steps},
                "prior": True}
    if name == "core":
        return {"agent": {"ensemble_size": 2, "min_targets": 2, "utd_ratio": 1,
                          "mask_rate": 1.0, "formulation": "contextual"},
                "adaptor": {"variant": "core", "core_a": 7.0, "core_c": 0.02},
                "prior": True}
    if name == "cheq":
        return {"agent": {"ensemble_size": 5, "min_targets": 2, "utd_ratio": 1,
                          "mask_rate": 0.8, "formulation": "contextual"},
                "adaptor": {"variant": "cheq"},
                "prior": True}
    raise ValueError(f"unknown variant {name!r} (one of {VARIANTS})")


def make_adaptor(spec: dict) -> WeightAdaptor:
    """Build a weight adaptor from its config dict."""
    spec = dict(spec)
    variant = spec.pop("variant")
    if variant == "cheq":
        bounds = {k: spec.pop(k) for k in
                  ("lambda_min", "lambda_max", "u_min", "u_max") if k in spec}
        spec["config"] = WeightConfig(**bounds)
    return WeightAdaptor(variant, **spec)


def validate_combination(agent_cfg: AgentConfig, adaptor: WeightAdaptor,
                         has_prior: bool) -> None:
    """Reject assemblies that cannot run as configured."""
    if not has_prior and adaptor.lambda_min < 1.0:
        raise ValueError("a blending weight below 1 needs a control prior")
    if agent_cfg.formulation == "mixed_action" and not has_prior:
        raise ValueError("mixed-action training is only meaningful with a prior")


def build_agent(obs_dim: int, act_dim: int, agent_cfg: AgentConfig,
                rng: np.random.Generator, obs_scale=None) -> SacEnsembleAgent:
    return SacEnsembleAgent(obs_dim, act_dim, agent_cfg, rng, obs_scale=obs_scale)
