"""Squashed-Gaussian policy head.

The actor network emits ``2 * action_dim`` values per state: means and raw
log-std entries. The raw log-std is mapped into [LOG_STD_MIN, LOG_STD_MAX]
with a tanh rescale so the bound is kept without killing gradients. Actions
are ``tanh(mean + std * noise)`` and the log-density carries the tanh
change-of-variables term in the numerically stable softplus form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
LOG2 = np.log(2.0)
# largest double strictly below 1; keeps sampled actions inside the open box
# even where tanh rounds to exactly +-1
_INTERIOR = np.nextafter(1.0, 0.0)


@dataclass
class GaussianPolicyOutput:
    mean: np.ndarray
    log_std: np.ndarray
    sampled_action: np.ndarray
    log_prob: float


def softplus(x):
    return np.logaddexp(0.0, x)


def split_head(raw):
    """Split raw actor output into (mean, clamped log_std).

    Works on single vectors and batches; the last axis is 2 * action_dim.
    """
    raw = np.asarray(raw, dtype=np.float64)
    d = raw.shape[-1] // 2
    if raw.shape[-1] != 2 * d:
        raise ValueError("actor head width must be even")
    mean = raw[..., :d]
    span = 0.5 * (LOG_STD_MAX - LOG_STD_MIN)
    mid = 0.5 * (LOG_STD_MAX + LOG_STD_MIN)
    log_std = mid + span * np.tanh(raw[..., d:])
    return mean, log_std


def squash_log_prob(z, log_std, noise):
    """log pi(a) for a = tanh(z), z = mean + exp(log_std) * noise.

    Summed over the last axis. log(1 - tanh(z)^2) is evaluated as
    2*(log 2 - z - softplus(-2z)) to stay finite for large |z|.
    """
    gauss = -0.5 * noise * noise - _HALF_LOG_2PI - log_std
    corr = 2.0 * (LOG2 - z - softplus(-2.0 * z))
    return np.sum(gauss - corr, axis=-1)


def sample_squashed_gaussian(mean, log_std, noise) -> GaussianPolicyOutput:
    """Reparameterized draw through the tanh squash, with its log-density."""
    mean = np.asarray(mean, dtype=np.float64)
    log_std = np.asarray(log_std, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape != mean.shape:
        raise ValueError(f"noise shape {noise.shape} vs mean {mean.shape}")
    if np.any(log_std < LOG_STD_MIN - 1e-9) or np.any(log_std > LOG_STD_MAX + 1e-9):
        raise ValueError("log_std outside clamp range")
    z = mean + np.exp(log_std) * noise
    action = np.clip(np.tanh(z), -_INTERIOR, _INTERIOR)
    logp = float(squash_log_prob(z, log_std, noise))
    return GaussianPolicyOutput(mean, log_std, action, logp)


def greedy_action(mean):
    """Deterministic mode of the squashed policy: tanh(mean), exactly."""
    return np.tanh(np.asarray(mean, dtype=np.float64))


def sample_batch(raw_head, noise):
    """Batched reparameterized sampling used by the training loop.

    Returns (action, log_prob, aux) where aux carries the intermediates the
    actor backward pass needs.
    """
    mean, log_std = split_head(raw_head)
    std = np.exp(log_std)
    z = mean + std * noise
    action = np.tanh(z)
    logp = squash_log_prob(z, log_std, noise)
    return action, logp, {"mean": mean, "log_std": log_std, "std": std,
                          "z": z, "action": action, "noise": noise}


def sample_batch_grads(aux, d_action, d_logp, alpha=None):
    """Backprop through sample_batch.

    Given upstream gradients on the sampled action (d_action, per element)
    and on the log-probability (d_logp, per row), produce the gradient on
    the raw actor head [d_mean | d_raw_log_std].

    dlogp/dz = 2 - 4*sigmoid(-2z) from the tanh correction;
    dlogp/dlog_std = -1 + dlogp/dz * std * noise.
    """
    z = aux["z"]
    std = aux["std"]
    noise = aux["noise"]
    action = aux["action"]
    log_std = aux["log_std"]
    d_logp = np.asarray(d_logp)[..., None]

    sig = 1.0 / (1.0 + np.exp(2.0 * z))  # sigmoid(-2z)
    dlogp_dz = 2.0 - 4.0 * sig
    dz = d_action * (1.0 - action * action) + d_logp * dlogp_dz
    d_mean = dz
    d_log_std = dz * std * noise + d_logp * (-1.0)
    # chain through the tanh rescale of the raw log_std output
    span = 0.5 * (LOG_STD_MAX - LOG_STD_MIN)
    mid = 0.5 * (LOG_STD_MAX + LOG_STD_MIN)
    t = (log_std - mid) / span
    d_raw = d_log_std * span * (1.0 - t * t)
    return np.concatenate([d_mean, d_raw], axis=-1)
