"""Run configuration: schema, validation, hashing, serialization.

A run config is a plain JSON document with a schema version. Its defaults
are the shared hyperparameters of the study setup (discount 0.99, Polyak
0.005, learning rates 3e-4, batch 256, buffer 1e6, warm-up 1e3 random steps
plus 4e3 held-weight steps, evaluation every 20 episodes); desk-scale
profiles in :mod:`cheq.harness.profiles` override them explicitly.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field

from ..agents.core import FORMULATIONS
from ..agents.variants import VARIANTS, variant_defaults

CONFIG_VERSION = 1

ENV_IDS = ("cartpole", "racing")

_ENV_KEYS = {
    "cartpole": {"id", "force_max", "dt", "max_steps", "x_limit", "angle_limit"},
    "racing": {"id", "track_seed", "track_file", "dt", "substeps", "max_steps",
               "spawn_speed", "vehicle", "track_spec"},
}

_ADAPTOR_KEYS = {
    "fixed": {"variant", "value"},
    "schedule": {"variant", "horizon"},
    "cheq": {"variant", "lambda_min", "lambda_max", "u_min", "u_max",
             "warmup_low", "warmup_high"},
    "core": {"variant", "core_a", "core_c", "warmup_low", "warmup_high"},
}

_AGENT_KEYS = {
    "ensemble_size", "min_targets", "utd_ratio", "mask_rate", "gamma", "tau",
    "lr_actor", "lr_critic", "lr_alpha", "target_entropy", "batch_size",
    "hidden_sizes", "activation", "warmup_random_steps", "warmup_lambda_steps",
    "buffer_capacity", "formulation", "init_alpha",
}

_PRIOR_KEYS = {"f_bias", "gains"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    env: dict
    variant: str = "cheq"
    agent: dict = field(default_factory=dict)
    adaptor: dict = field(default_factory=dict)
    prior: dict = field(default_factory=dict)
    total_steps: int = 1_500_000
    seed: int = 0
    eval_every_episodes: int = 20
    checkpoint_every_steps: int = 0
    out_dir: str = "run"
    version: int = CONFIG_VERSION

    def to_dict(self) -> dict:
        return copy.deepcopy(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = copy.deepcopy(d)
        validate_config(d)
        return cls(**d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json() + "\n")

    def resolved_agent(self) -> dict:
        """Variant defaults with this run's explicit overrides applied."""
        base = variant_defaults(self.variant, self.total_steps)
        agent = dict(base["agent"])
        agent.update(self.agent)
        return agent

    def resolved_adaptor(self) -> dict:
        base = variant_defaults(self.variant, self.total_steps)
        spec = dict(base["adaptor"])
        spec.update(self.adaptor)
        return spec

    def uses_prior(self) -> bool:
        return variant_defaults(self.variant, self.total_steps)["prior"]


def _check_keys(section: str, given: dict, allowed: set) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown keys {sorted(unknown)}")


def validate_config(d: dict) -> None:
    """Structural validation of a config dict; raises ConfigError."""
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    if d.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION}")
    allowed_top = {"env", "variant", "agent", "adaptor", "prior", "total_steps",
                   "seed", "eval_every_episodes", "checkpoint_every_steps",
                   "out_dir", "version"}
    _check_keys("config", d, allowed_top)

    env = d.get("env")
    if not isinstance(env, dict) or env.get("id") not in ENV_IDS:
        raise ConfigError(f"env.id must be one of {ENV_IDS}")
    _check_keys(f"env[{env['id']}]", env, _ENV_KEYS[env["id"]])

    variant = d.get("variant", "cheq")
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}")

    agent = d.get("agent", {})
    _check_keys("agent", agent, _AGENT_KEYS)
    if "formulation" in agent and agent["formulation"] not in FORMULATIONS:
        raise ConfigError(f"agent.formulation must be one of {FORMULATIONS}")
    if variant in ("sac", "redq") and agent.get("formulation") == "contextual":
        raise ConfigError(f"{variant} runs without a prior and takes no context input")
    if agent.get("formulation") == "mixed_action" and variant in ("sac", "redq"):
        raise ConfigError("mixed-action training needs a prior in the loop")

    adaptor = d.get("adaptor", {})
    base_variant = variant_defaults(variant, 1)["adaptor"]["variant"]
    adaptor_variant = adaptor.get("variant", base_variant)
    if adaptor_variant != base_variant:
        raise ConfigError(
            f"variant {variant!r} uses the {base_variant!r} adaptor")
    _check_keys("adaptor", adaptor, _ADAPTOR_KEYS[base_variant])

    _check_keys("prior", d.get("prior", {}), _PRIOR_KEYS)

    for key in ("total_steps", "seed", "eval_every_episodes",
                "checkpoint_every_steps"):
        if key in d and (not isinstance(d[key], int) or d[key] < 0):
            raise ConfigError(f"{key} must be a nonnegative integer")
    if d.get("total_steps", 1) <= 0:
        raise ConfigError("total_steps must be positive")


def config_hash(cfg: RunConfig) -> str:
    """Identity of the experimental setup: everything but seed and out_dir."""
    d = cfg.to_dict()
    d.pop("seed", None)
    d.pop("out_dir", None)
    blob = json.dumps(d, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
