"""Hybrid action machinery.

Mixing functions (regularized convex blend and residual form), the ensemble
disagreement measure, and the weight adaption rules that map that signal to
the blending weight: fixed, linear schedule, uncertainty thresholds, and the
TD-error based estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class WeightConfig:
    """Bounds of the piecewise-linear uncertainty-to-weight map."""

    lambda_min: float = 0.2
    lambda_max: float = 1.0
    u_min: float = 0.03
    u_max: float = 0.15

    def __post_init__(self):
        if not (0.0 <= self.lambda_min <= self.lambda_max <= 1.0):
            raise ValueError("need 0 <= lambda_min <= lambda_max <= 1")
        if not (0.0 <= self.u_min < self.u_max):
            raise ValueError("need 0 <= u_min < u_max")


def mix(a_prior, a_rl, lam: float):
    """Regularized blend (1 - lam) * a_prior + lam * a_rl, componentwise."""
    a_prior = np.asarray(a_prior, dtype=np.float64)
    a_rl = np.asarray(a_rl, dtype=np.float64)
    if a_prior.shape != a_rl.shape:
        raise ValueError(f"action shapes differ: {a_prior.shape} vs {a_rl.shape}")
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"mixing weight {lam} outside [0, 1]")
    return (1.0 - lam) * a_prior + lam * a_rl


def mix_residual(a_prior, a_rl, lam_rl: float, low=-1.0, high=1.0):
    """Residual blend a_prior + lam_rl * a_rl, clipped to the action box."""
    a_prior = np.asarray(a_prior, dtype=np.float64)
    a_rl = np.asarray(a_rl, dtype=np.float64)
    if a_prior.shape != a_rl.shape:
        raise ValueError(f"action shapes differ: {a_prior.shape} vs {a_rl.shape}")
    return np.clip(a_prior + lam_rl * a_rl, low, high)


def ensemble_uncertainty(q_values) -> float:
    """Disagreement of the critic ensemble: std with 1/E normalization."""
    q = np.asarray(q_values, dtype=np.float64)
    if q.size < 2:
        raise ValueError("uncertainty needs at least two critics")
    mu = q.mean()
    return float(np.sqrt(np.mean((q - mu) ** 2)))


def adapt_weight_cheq(u: float, cfg: WeightConfig) -> float:
    """Piecewise-linear map from uncertainty to blending weight.

    lambda_max below u_min, lambda_min above u_max, linear in between and
    continuous at both knots.
    """
    if u < cfg.u_min:
        return cfg.lambda_max
    if u > cfg.u_max:
        return cfg.lambda_min
    frac = (u - cfg.u_max) / (cfg.u_min - cfg.u_max)
    return frac * (cfg.lambda_max - cfg.lambda_min) + cfg.lambda_min


def adapt_weight_schedule(t: float, horizon: float) -> float:
    """Linear ramp from 0 to 1 over the horizon, clipped outside."""
    if horizon <= 0:
        raise ValueError("schedule horizon must be positive")
    return float(min(max(t / horizon, 0.0), 1.0))


def adapt_weight_core(td_error: float, a: float, c: float) -> float:
    """TD-error based weight: 1 / (1 + a * (1 - exp(-c * |delta|)))."""
    if a < 0 or c <= 0:
        raise ValueError("need a >= 0 and c > 0")
    pseudo = a * (1.0 - math.exp(-c * abs(td_error)))
    return 1.0 / (1.0 + pseudo)


def sample_bernoulli_masks(n: int, kappa: float, rng: np.random.Generator):
    """Independent inclusion flags, each true with probability kappa."""
    if not (0.0 < kappa <= 1.0):
        raise ValueError(f"masking rate {kappa} outside (0, 1]")
    return rng.random(n) < kappa


class WeightAdaptor:
    """One of the weight adaption variants, with its clip range.

    ``variant`` is one of fixed, schedule, cheq, core. The training loop
    feeds whatever signal the variant consumes (step index, uncertainty or
    TD error) through :meth:`next_weight`; during the warm-up phase
    :meth:`warmup_weight` applies instead.
    """

    def __init__(self, variant: str, *, value: float | None = None,
                 horizon: int | None = None, config: WeightConfig | None = None,
                 core_a: float = 7.0, core_c: float = 0.02,
                 warmup_low: float = 0.2, warmup_high: float = 0.3):
        self.variant = variant
        self.warmup_low = warmup_low
        self.warmup_high = warmup_high
        if variant == "fixed":
            if value is None or not (0.0 <= value <= 1.0):
                raise ValueError("fixed adaptor needs a weight in [0, 1]")
            self.value = float(value)
            self.lambda_min = self.lambda_max = self.value
        elif variant == "schedule":
            if not horizon or horizon <= 0:
                raise ValueError("schedule adaptor needs a positive horizon")
            self.horizon = int(horizon)
            self.lambda_min, self.lambda_max = 0.0, 1.0
        elif variant == "cheq":
            self.config = config or WeightConfig()
            self.lambda_min = self.config.lambda_min
            self.lambda_max = self.config.lambda_max
        elif variant == "core":
            self.core_a = float(core_a)
            self.core_c = float(core_c)
            self.lambda_min = 1.0 / (1.0 + self.core_a)
            self.lambda_max = 1.0
        else:
            raise ValueError(f"unknown adaptor variant {variant!r}")

    @property
    def uses_uncertainty(self) -> bool:
        return self.variant == "cheq"

    @property
    def uses_td_error(self) -> bool:
        return self.variant == "core"

    def initial_weight(self, t: int = 0) -> float:
        """Weight at an episode start."""
        if self.variant == "fixed":
            return self.value
        if self.variant == "schedule":
            return adapt_weight_schedule(t, self.horizon)
        return self.lambda_min

    def warmup_weight(self, t: int, rng: np.random.Generator) -> float:
        """Weight used while the agent is still untrained."""
        if self.variant == "fixed":
            return self.value
        if self.variant == "schedule":
            return adapt_weight_schedule(t, self.horizon)
        if self.variant == "cheq":
            return float(rng.uniform(self.warmup_low, self.warmup_high))
        return self.warmup_low  # core: held small and constant

    def next_weight(self, *, t: int = 0, uncertainty: float | None = None,
                    td_error: float | None = None) -> float:
        if self.variant == "fixed":
            lam = self.value
        elif self.variant == "schedule":
            lam = adapt_weight_schedule(t, self.horizon)
        elif self.variant == "cheq":
            if uncertainty is None:
                raise ValueError("cheq adaptor needs an uncertainty value")
            lam = adapt_weight_cheq(uncertainty, self.config)
        else:
            if td_error is None:
                raise ValueError("core adaptor needs a TD error")
            lam = adapt_weight_core(td_error, self.core_a, self.core_c)
        return float(min(max(lam, self.lambda_min), self.lambda_max))
