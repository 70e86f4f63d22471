"""Metric stream writers.

One CSV file per stream with fixed headers:

- steps.csv     step,lambda,uncertainty,reward
- episodes.csv  episode,end_step,return,failure,cum_failures
- eval.csv      step,return,failure
- updates.csv   step,critic_loss_mean,actor_obj,alpha

Floats are written with shortest round-trip repr so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import os


def _fmt(x) -> str:
    if isinstance(x, (int,)):
        return str(x)
    return repr(float(x))


class RunLogger:
    """Appends metric rows for one run directory."""

    SCHEMAS = {
        "steps": "step,lambda,uncertainty,reward",
        "episodes": "episode,end_step,return,failure,cum_failures",
        "eval": "step,return,failure",
        "updates": "step,critic_loss_mean,actor_obj,alpha",
    }

    def __init__(self, out_dir):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self._files = {}
        for name, header in self.SCHEMAS.items():
            f = open(os.path.join(out_dir, f"{name}.csv"), "w", buffering=1 << 16)
            f.write(header + "\n")
            self._files[name] = f

    def _row(self, name, *vals):
        self._files[name].write(",".join(_fmt(v) for v in vals) + "\n")

    def log_step(self, step, lam, u, reward):
        self._row("steps", int(step), lam, u, reward)

    def log_episode(self, episode, end_step, ret, failure, cum_failures):
        self._row("episodes", int(episode), int(end_step), ret, int(failure),
                  int(cum_failures))

    def log_eval(self, step, ret, failure):
        self._row("eval", int(step), ret, int(failure))

    def log_update(self, step, critic_loss_mean, actor_obj, alpha):
        self._row("updates", int(step), critic_loss_mean, actor_obj, alpha)

    def close(self):
        for f in self._files.values():
            f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_trace(path, rows) -> None:
    """Positions with the live weight for one greedy episode."""
    with open(path, "w") as f:
        f.write("step,x,y,lambda,speed\n")
        for step, x, y, lam, speed in rows:
            f.write(f"{int(step)},{_fmt(x)},{_fmt(y)},{_fmt(lam)},{_fmt(speed)}\n")
