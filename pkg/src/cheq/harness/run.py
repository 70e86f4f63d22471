"""Assembly of one training run from its config."""

from __future__ import annotations

import json
import os

import numpy as np

from ..agents.core import AgentConfig, SacEnsembleAgent
from ..agents.loop import run_training
from ..agents.variants import make_adaptor, validate_combination
from ..buffer import ReplayBuffer
from ..envs.cartpole import CartPoleEnv, CartPoleParams
from ..envs.racing import RacingEnv
from ..envs.track import Track, TrackSpec, generate_track
from ..envs.vehicle import VehicleParams
from ..priors import StanleyGains, constant_force_prior, racing_prior
from .checkpoint import save_agent
from .config import RunConfig, config_hash
from .logs import RunLogger
from .seeding import seed_streams


def resolve_out_dir(out_dir: str) -> str:
    root = os.environ.get("CHEQ_OUT_DIR")
    if root and not os.path.isabs(out_dir):
        return os.path.join(root, out_dir)
    return out_dir


def racing_obs_scale(env: RacingEnv) -> np.ndarray:
    """Bring velocities, rates and lookahead offsets to comparable size."""
    return np.concatenate([
        [0.1, 0.2, 0.5, 1.0 / env.params.steer_max],
        np.full(2 * 20, 1.0 / 60.0),
    ])


def load_track_for(env_cfg: dict) -> Track:
    if env_cfg.get("track_file"):
        return Track.load(env_cfg["track_file"])
    spec = TrackSpec(**env_cfg.get("track_spec", {}))
    return generate_track(int(env_cfg.get("track_seed", 0)), spec)


def build_env(env_cfg: dict):
    """Returns (env, eval_env, obs_scale, prior_fn) for an env config."""
    env_id = env_cfg["id"]
    if env_id == "cartpole":
        keys = {k: env_cfg[k] for k in ("force_max", "dt", "max_steps", "x_limit",
                                        "angle_limit") if k in env_cfg}
        params = CartPoleParams(**keys)
        env, eval_env = CartPoleEnv(params), CartPoleEnv(params)
        return env, eval_env, np.ones(4), None
    if env_id == "racing":
        track = load_track_for(env_cfg)
        vehicle = VehicleParams.default(**env_cfg.get("vehicle", {}))
        kw = {k: env_cfg[k] for k in ("dt", "substeps", "max_steps", "spawn_speed")
              if k in env_cfg}
        env = RacingEnv(track, vehicle, **kw)
        eval_env = RacingEnv(track, vehicle, **kw)
        return env, eval_env, racing_obs_scale(env), None
    raise ValueError(f"unknown env id {env_id!r}")


def build_prior_fn(cfg: RunConfig, env):
    if not cfg.uses_prior():
        return None
    if cfg.env["id"] == "cartpole":
        f_bias = float(cfg.prior.get("f_bias", 0.5 * env.params.force_max))
        force = constant_force_prior(f_bias)

        def prior_fn(e, _f=force):
            return np.array([_f / e.params.force_max])

        return prior_fn
    gains = StanleyGains(**cfg.prior.get("gains", {}))

    def prior_fn(e, _g=gains):
        return racing_prior(e.state, e.track, _g, e.params)

    return prior_fn


def run_one(cfg: RunConfig, quiet: bool = True) -> dict:
    """Execute one seeded training run; returns the summary dict."""
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(1)
    except Exception:
        pass

    out = resolve_out_dir(cfg.out_dir)
    os.makedirs(out, exist_ok=True)
    cfg.save(os.path.join(out, "config.json"))

    rngs = seed_streams(cfg.seed)
    env, eval_env, obs_scale, _ = build_env(cfg.env)
    prior_fn = build_prior_fn(cfg, env)
    agent_cfg = AgentConfig(**cfg.resolved_agent())
    adaptor = make_adaptor(cfg.resolved_adaptor())
    validate_combination(agent_cfg, adaptor, prior_fn is not None)
    agent = SacEnsembleAgent(env.obs_dim, env.act_dim, agent_cfg, rngs["init"],
                             obs_scale=obs_scale)
    buffer = ReplayBuffer(min(agent_cfg.buffer_capacity, max(cfg.total_steps, 1)),
                          env.obs_dim, env.act_dim, agent_cfg.ensemble_size)

    ckpt_meta = {"env": cfg.env, "adaptor": cfg.resolved_adaptor(),
                 "prior": cfg.prior, "variant": cfg.variant}

    def checkpoint_fn(step):
        save_agent(agent, os.path.join(out, "checkpoints", f"step_{step:08d}"),
                   meta=dict(ckpt_meta, step=step))

    with RunLogger(out) as logger:
        summary = run_training(
            env=env, eval_env=eval_env, agent=agent, adaptor=adaptor,
            prior_fn=prior_fn, buffer=buffer, rngs=rngs,
            total_steps=cfg.total_steps,
            eval_every_episodes=cfg.eval_every_episodes,
            checkpoint_every=cfg.checkpoint_every_steps,
            checkpoint_fn=checkpoint_fn,
            logger=logger)

    out_summary = {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "final_return": summary["final_return"],
        "cum_failures": summary["cum_failures"],
        "episodes": summary["episodes"],
        "gradient_rounds": summary["gradient_rounds"],
    }
    with open(os.path.join(out, "summary.json"), "w") as f:
        json.dump(out_summary, f, indent=2, sort_keys=True)
    if not quiet:
        print(f"[{cfg.variant} seed={cfg.seed}] return={summary['final_return']:.2f} "
              f"failures={summary['cum_failures']}")
    return out_summary
