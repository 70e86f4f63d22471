import numpy as np
import pytest
from scipy.stats import chisquare

from cheq.buffer import ReplayBuffer


def fill(buf, n, rng, obs_dim=3, act_dim=2, n_masks=5, lam=None):
    for i in range(n):
        buf.push(rng.standard_normal(obs_dim), rng.uniform(-1, 1, act_dim),
                 lam if lam is not None else rng.random(), float(i),
                 rng.standard_normal(obs_dim), False, rng.random(n_masks) < 0.8)


def test_fifo_overwrite_drops_oldest(rng):
    buf = ReplayBuffer(10, 3, 2, 5)
    fill(buf, 11, rng)
    assert len(buf) == 10
    # rewards were 0..10; reward 0 (the oldest) must be gone
    assert 0.0 not in buf.rewards[:buf.size]
    assert 10.0 in buf.rewards[:buf.size]


def test_sample_requires_enough_items(rng):
    buf = ReplayBuffer(10, 3, 2, 5)
    fill(buf, 4, rng)
    with pytest.raises(ValueError):
        buf.sample(5, rng)


def test_uniformity_chi_square(rng):
    buf = ReplayBuffer(100, 3, 2, 5)
    fill(buf, 100, rng)
    counts = np.zeros(100)
    for _ in range(1000):
        batch = buf.sample(100, rng)
        idx = batch["rewards"].astype(int)
        counts += np.bincount(idx, minlength=100)
    _, p = chisquare(counts)
    assert p > 0.01


def test_lambda_stored_bit_exact(rng):
    buf = ReplayBuffer(50, 3, 2, 5)
    lam = 0.123456789123456789
    fill(buf, 50, rng, lam=lam)
    batch = buf.sample(32, rng)
    assert np.all(batch["lams"] == lam)


def test_masks_roundtrip(rng):
    buf = ReplayBuffer(8, 2, 1, 3)
    masks = np.array([True, False, True])
    for _ in range(4):
        buf.push(np.zeros(2), np.zeros(1), 0.5, 1.0, np.zeros(2), True, masks)
    batch = buf.sample(4, rng)
    assert batch["masks"].shape == (4, 3)
    assert np.all(batch["masks"] == masks)
    assert np.all(batch["dones"] == 1.0)
