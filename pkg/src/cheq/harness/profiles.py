"""Bundled experiment profiles.

``paper`` mirrors the full-scale study setup (1.5e6 steps, 256-unit layers,
batch 256); the desk profiles shrink network width, batch and step budget so
the trend experiments run on a laptop-class CPU in minutes to hours. Any
field can still be overridden per run.
"""

from __future__ import annotations

import copy

from .config import RunConfig

PROFILES = {
    "cartpole-ablation": {
        "env": {"id": "cartpole"},
        "variant": "fixed",
        "agent": {
            "hidden_sizes": [64, 64],
            "batch_size": 128,
            "target_entropy": -1.0,
            "utd_ratio": 2,
            "buffer_capacity": 100_000,
        },
        "adaptor": {"value": 0.5},
        "total_steps": 100_000,
        "eval_every_episodes": 20,
        "out_dir": "runs/cartpole",
    },
    "racing-small": {
        "env": {"id": "racing", "track_seed": 7, "max_steps": 1000},
        "variant": "cheq",
        "agent": {
            "hidden_sizes": [128, 128],
            "batch_size": 128,
            "buffer_capacity": 200_000,
        },
        "adaptor": {},
        "total_steps": 200_000,
        "eval_every_episodes": 20,
        "checkpoint_every_steps": 20_000,
        "out_dir": "runs/racing-small",
    },
    "racing-paper": {
        "env": {"id": "racing", "track_seed": 7, "max_steps": 2000},
        "variant": "cheq",
        "agent": {},
        "total_steps": 1_500_000,
        "eval_every_episodes": 20,
        "checkpoint_every_steps": 100_000,
        "out_dir": "runs/racing-paper",
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def profile(name: str, **overrides) -> RunConfig:
    """Instantiate a bundled profile, with nested-dict overrides.

    Changing the variant drops the profile's adaptor section (its keys
    belong to the old variant) unless an adaptor override is given.
    """
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r} (have {sorted(PROFILES)})")
    base = copy.deepcopy(PROFILES[name])
    if "variant" in overrides and overrides["variant"] != base.get("variant"):
        base["adaptor"] = {}
    d = _merge(base, overrides)
    d.setdefault("version", 1)
    return RunConfig.from_dict(d)
