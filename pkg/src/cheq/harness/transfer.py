"""Zero-shot transfer and standalone evaluation.

Transfer runs one greedy adapted episode per (model, track) pair, tabulates
(return, success) rows and summarizes success rate and mean return. The
prior-only mode drives every track with the controller alone. Each racing
episode also leaves a position/weight trace for the map reports.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from ..agents.loop import eval_episode
from ..agents.variants import make_adaptor
from ..envs.racing import RacingEnv
from ..envs.track import Track
from ..envs.vehicle import VehicleParams
from ..priors import StanleyGains, racing_prior
from .checkpoint import load_agent
from .logs import write_trace


def _racing_env(track: Track, env_cfg: dict) -> RacingEnv:
    vehicle = VehicleParams.default(**env_cfg.get("vehicle", {}))
    kw = {k: env_cfg[k] for k in ("dt", "substeps", "max_steps", "spawn_speed")
          if k in env_cfg}
    return RacingEnv(track, vehicle, **kw)


def _prior_fn(gains: StanleyGains):
    def fn(env):
        return racing_prior(env.state, env.track, gains, env.params)
    return fn


def evaluate_checkpoint(ckpt_dir, track: Track, episodes: int = 1,
                        trace_path=None):
    """Greedy adapted episodes of one checkpoint on one track.

    Returns a list of (return, failure, steps) tuples.
    """
    agent, man = load_agent(ckpt_dir)
    meta = man["meta"]
    env = _racing_env(track, meta.get("env", {}))
    adaptor = make_adaptor(meta["adaptor"])
    gains = StanleyGains(**meta.get("prior", {}).get("gains", {}))
    prior = _prior_fn(gains) if meta.get("variant") != "sac" else None
    results = []
    for k in range(episodes):
        trace = [] if trace_path else None
        ret, fail, steps = eval_episode(env, agent, adaptor, prior,
                                        rng=np.random.default_rng(k), trace=trace)
        if trace_path:
            write_trace(trace_path if episodes == 1
                        else f"{trace_path}.{k}", trace)
        results.append((ret, fail, steps))
    return results


def transfer_protocol(checkpoints: list, tracks: dict, out_dir,
                      prior_only: bool = False,
                      gains: StanleyGains | None = None,
                      env_cfg: dict | None = None) -> dict:
    """Evaluate checkpoints (or the prior alone) across tracks.

    ``tracks`` maps a label to a Track. Writes transfer.csv, per-episode
    traces and summary.json under ``out_dir``; returns the summary dict.
    """
    os.makedirs(out_dir, exist_ok=True)
    trace_dir = os.path.join(out_dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)
    rows = []

    if prior_only:
        g = gains or StanleyGains()
        for tname, track in tracks.items():
            env = _racing_env(track, env_cfg or {})
            trace = []
            ret, fail, _ = eval_episode(env, None, None, _prior_fn(g),
                                        trace=trace)
            write_trace(os.path.join(trace_dir, f"prior__{tname}.csv"), trace)
            rows.append(("prior", tname, ret, int(not fail)))
    else:
        for ckpt in checkpoints:
            model = os.path.basename(os.path.normpath(ckpt))
            agent, man = load_agent(ckpt)
            meta = man["meta"]
            adaptor = make_adaptor(meta["adaptor"])
            g = StanleyGains(**meta.get("prior", {}).get("gains", {}))
            prior = _prior_fn(g) if meta.get("variant") != "sac" else None
            for tname, track in tracks.items():
                env = _racing_env(track, env_cfg or meta.get("env", {}))
                trace = []
                ret, fail, _ = eval_episode(env, agent, adaptor, prior,
                                            trace=trace)
                write_trace(os.path.join(trace_dir, f"{model}__{tname}.csv"),
                            trace)
                rows.append((model, tname, ret, int(not fail)))

    with open(os.path.join(out_dir, "transfer.csv"), "w") as f:
        f.write("model,track,return,success\n")
        for model, tname, ret, ok in rows:
            f.write(f"{model},{tname},{repr(float(ret))},{ok}\n")

    returns = [r[2] for r in rows]
    summary = {
        "rows": len(rows),
        "success_rate": float(np.mean([r[3] for r in rows])) if rows else math.nan,
        "mean_return": float(np.mean(returns)) if rows else math.nan,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
    return summary
