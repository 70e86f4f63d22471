"""Desk-scale study definitions and parallel seed execution.

Two bundled studies mirror the full-scale experiments at laptop size: the
cart-pole formulation ablation (fixed weight and scheduled weight, all
three training formulations) and the racing safety/return trend (adaptive
ensemble agent vs plain SAC on one reduced track). Runs of a study are
independent processes; results land in per-run directories under a common
root.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .config import RunConfig
from .profiles import profile
from .run import run_one

CARTPOLE_FORMULATIONS = ("contextual", "stationary", "mixed_action")

# the ramp must outlast the run: once it completes, the weight is constant
# and the mixing-blind formulations are plain RL agents on settled dynamics
# (they then recover and the formulations stop separating)
CARTPOLE_SCHEDULE_HORIZON_FRACTION = 1.5


def ablation_configs(out_root: str, seeds=range(5), total_steps: int = 100_000):
    """Fixed-weight and scheduled-weight runs for each formulation."""
    configs = []
    for form in CARTPOLE_FORMULATIONS:
        for seed in seeds:
            configs.append(profile(
                "cartpole-ablation", seed=int(seed), total_steps=total_steps,
                agent={"formulation": form},
                out_dir=os.path.join(out_root, f"fixed_{form}_s{seed}")))
            configs.append(profile(
                "cartpole-ablation", seed=int(seed), total_steps=total_steps,
                variant="schedule",
                adaptor={"horizon": int(CARTPOLE_SCHEDULE_HORIZON_FRACTION
                                        * total_steps)},
                agent={"formulation": form},
                out_dir=os.path.join(out_root, f"schedule_{form}_s{seed}")))
    return configs


def racing_trend_configs(out_root: str, seeds=range(3),
                         total_steps: int = 200_000, utd: int = 1):
    """Adaptive ensemble agent vs plain SAC on the reduced training track."""
    configs = []
    for seed in seeds:
        configs.append(profile(
            "racing-small", seed=int(seed), total_steps=total_steps,
            agent={"utd_ratio": utd},
            out_dir=os.path.join(out_root, f"cheq_s{seed}")))
        configs.append(profile(
            "racing-small", seed=int(seed), total_steps=total_steps,
            variant="sac",
            out_dir=os.path.join(out_root, f"sac_s{seed}")))
    return configs


def _run_cfg(cfg: RunConfig) -> dict:
    summary = run_one(cfg)
    summary["out_dir"] = cfg.out_dir
    return summary


def run_many(configs, max_workers: int | None = None) -> list:
    """Execute runs as parallel processes; returns summaries in order."""
    if max_workers is None:
        max_workers = max(1, min(len(configs), os.cpu_count() or 1))
    if max_workers == 1 or len(configs) == 1:
        return [_run_cfg(c) for c in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as ex:
        return list(ex.map(_run_cfg, configs))
