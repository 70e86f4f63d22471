"""Deterministic RNG stream derivation.

One master seed fans out into independent named streams through SeedSequence
spawning (counter-based splitting), so adding a consumer never perturbs the
draws of the others. Stream names, in spawn order: init, env, action,
update, masks, warmup, eval, track.
"""

import numpy as np

STREAMS = ("init", "env", "action", "update", "masks", "warmup", "eval", "track")


def seed_streams(master_seed: int) -> dict:
    root = np.random.SeedSequence(int(master_seed))
    children = root.spawn(len(STREAMS))
    return {name: np.random.default_rng(seq) for name, seq in zip(STREAMS, children)}
