"""Checkpoint bundles.

A bundle directory holds every network in the binary network format, the
optimizer moments in one npz, and a manifest tying them together with the
agent configuration, observation scaling and whatever run metadata the
caller wants to carry (adaptor spec, env config).
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..agents.core import AgentConfig, SacEnsembleAgent
from ..nets import AdamState, load_network, save_network

MANIFEST = "manifest.json"


def save_agent(agent: SacEnsembleAgent, out_dir, meta: dict | None = None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    networks = {"actor": "actor.net"}
    save_network(agent.actor, os.path.join(out_dir, "actor.net"))
    for e, (c, t) in enumerate(zip(agent.critics, agent.targets)):
        networks[f"critic{e}"] = f"critic{e}.net"
        networks[f"target{e}"] = f"target{e}.net"
        save_network(c, os.path.join(out_dir, f"critic{e}.net"))
        save_network(t, os.path.join(out_dir, f"target{e}.net"))

    optim = {"actor_m": agent.actor_adam.first_moment,
             "actor_v": agent.actor_adam.second_moment,
             "alpha_m": agent.alpha_adam.first_moment,
             "alpha_v": agent.alpha_adam.second_moment,
             "log_alpha": agent.log_alpha}
    steps = {"actor": agent.actor_adam.step_count,
             "alpha": agent.alpha_adam.step_count}
    for e, st in enumerate(agent.critic_adam):
        optim[f"critic{e}_m"] = st.first_moment
        optim[f"critic{e}_v"] = st.second_moment
        steps[f"critic{e}"] = st.step_count
    np.savez(os.path.join(out_dir, "optim.npz"), **optim)

    cfg = dict(agent.config.__dict__)
    cfg["hidden_sizes"] = list(cfg["hidden_sizes"])
    manifest = {
        "format": 1,
        "obs_dim": agent.obs_dim,
        "act_dim": agent.act_dim,
        "obs_scale": agent.obs_scale.tolist(),
        "agent_config": cfg,
        "adam_steps": steps,
        "counters": {"critic_rounds": agent.critic_rounds,
                     "actor_rounds": agent.actor_rounds},
        "networks": networks,
        "meta": meta or {},
    }
    with open(os.path.join(out_dir, MANIFEST), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)


def load_manifest(ckpt_dir) -> dict:
    with open(os.path.join(ckpt_dir, MANIFEST)) as f:
        return json.load(f)


def load_agent(ckpt_dir):
    """Rebuild the agent from a bundle. Returns (agent, manifest)."""
    man = load_manifest(ckpt_dir)
    if man.get("format") != 1:
        raise ValueError(f"unsupported checkpoint format in {ckpt_dir}")
    cfg_d = dict(man["agent_config"])
    cfg_d["hidden_sizes"] = tuple(cfg_d["hidden_sizes"])
    cfg = AgentConfig(**cfg_d)
    agent = SacEnsembleAgent(man["obs_dim"], man["act_dim"], cfg,
                             np.random.default_rng(0),
                             obs_scale=np.array(man["obs_scale"]))
    agent.actor = load_network(os.path.join(ckpt_dir, man["networks"]["actor"]))
    agent.critics = [load_network(os.path.join(ckpt_dir, man["networks"][f"critic{e}"]))
                     for e in range(cfg.ensemble_size)]
    agent.targets = [load_network(os.path.join(ckpt_dir, man["networks"][f"target{e}"]))
                     for e in range(cfg.ensemble_size)]

    optim = np.load(os.path.join(ckpt_dir, "optim.npz"))
    steps = man["adam_steps"]

    def adam(prefix, n):
        st = AdamState.for_params(n)
        st.first_moment = optim[f"{prefix}_m"].copy()
        st.second_moment = optim[f"{prefix}_v"].copy()
        st.step_count = int(steps[prefix])
        return st

    agent.actor_adam = adam("actor", agent.actor.n_params)
    agent.critic_adam = [adam(f"critic{e}", agent.critics[e].n_params)
                         for e in range(cfg.ensemble_size)]
    agent.alpha_adam = adam("alpha", 1)
    agent.log_alpha = optim["log_alpha"].copy()
    agent.critic_rounds = int(man["counters"]["critic_rounds"])
    agent.actor_rounds = int(man["counters"]["actor_rounds"])
    return agent, man
