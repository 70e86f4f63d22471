"""Contextualized SAC with an ensemble of critics.

One agent bundles a squashed-Gaussian actor, E critics with their slow
targets, and an auto-tuned temperature. Critic updates follow the
randomized-subset minimum target with per-transition Bernoulli mask gating;
the actor ascends the ensemble-mean Q minus the entropy term. When the
agent is contextual the blending weight is appended to every network input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import policy
from ..hybrid import ensemble_uncertainty
from ..nets import AdamState, Network, adam_step_inplace, polyak_update_inplace

FORMULATIONS = ("contextual", "stationary", "mixed_action")


@dataclass
class AgentConfig:
    ensemble_size: int = 5          # E
    min_targets: int = 2            # F
    utd_ratio: int = 1              # G
    mask_rate: float = 0.8          # kappa
    gamma: float = 0.99
    tau: float = 0.005
    lr_actor: float = 3e-4
    lr_critic: float = 3e-4
    lr_alpha: float = 3e-4
    target_entropy: float = -3.0
    batch_size: int = 256
    hidden_sizes: tuple = (256, 256)
    activation: str = "relu"
    warmup_random_steps: int = 1000
    warmup_lambda_steps: int = 4000
    buffer_capacity: int = 1_000_000
    formulation: str = "contextual"
    init_alpha: float = 1.0

    def __post_init__(self):
        if not (1 <= self.min_targets <= self.ensemble_size):
            raise ValueError("need 1 <= F <= E")
        if self.utd_ratio < 1:
            raise ValueError("UTD ratio must be >= 1")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("discount must be in (0, 1)")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)


@dataclass
class TrainMetrics:
    """Per-update aggregates appended by the training loop."""

    critic_loss_mean: float = 0.0
    actor_objective: float = 0.0
    alpha: float = 0.0
    q_mean: float = 0.0
    q_std: float = 0.0
    rounds: int = 0


class SacEnsembleAgent:
    def __init__(self, obs_dim: int, act_dim: int, config: AgentConfig,
                 rng: np.random.Generator, obs_scale=None):
        self.config = config
        self.obs_dim = int(obs_dim)
        self.act_dim = int(act_dim)
        self.contextual = config.formulation == "contextual"
        self.in_dim = self.obs_dim + (1 if self.contextual else 0)
        self.obs_scale = (np.ones(obs_dim) if obs_scale is None
                          else np.asarray(obs_scale, dtype=np.float64))
        if self.obs_scale.shape != (self.obs_dim,):
            raise ValueError("obs_scale must match the observation width")

        h = config.hidden_sizes
        actor_sizes = (self.in_dim, *h, 2 * self.act_dim)
        critic_sizes = (self.in_dim + self.act_dim, *h, 1)
        self.actor = Network.initialize(actor_sizes, config.activation, rng)
        self.critics = [Network.initialize(critic_sizes, config.activation, rng)
                        for _ in range(config.ensemble_size)]
        self.targets = [c.copy() for c in self.critics]

        self.actor_adam = AdamState.for_params(self.actor.n_params)
        self.critic_adam = [AdamState.for_params(c.n_params) for c in self.critics]
        self.log_alpha = np.array([np.log(config.init_alpha)])
        self.alpha_adam = AdamState.for_params(1)
        self.critic_rounds = 0
        self.actor_rounds = 0

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha[0]))

    # ---- input plumbing -------------------------------------------------

    def net_input(self, obs, lams):
        """Scale observations and append the context column if used."""
        obs = np.atleast_2d(np.asarray(obs, dtype=np.float64)) * self.obs_scale
        if not self.contextual:
            return np.ascontiguousarray(obs)
        lams = np.atleast_1d(np.asarray(lams, dtype=np.float64))
        return np.ascontiguousarray(np.concatenate(
            [obs, np.broadcast_to(lams[:, None], (obs.shape[0], 1))], axis=1))

    # ---- acting ----------------------------------------------------------

    def act(self, obs, lam: float, rng: np.random.Generator | None = None,
            greedy: bool = False):
        """Sample (or take the mode of) the policy at one state.

        Returns (action, log_prob); greedy mode consumes no randomness and
        reports log_prob None.
        """
        x = self.net_input(obs, lam)
        raw = self.actor.forward_batch(x)[0][0]
        mean, log_std = policy.split_head(raw)
        if greedy:
            return policy.greedy_action(mean), None
        noise = rng.standard_normal(self.act_dim)
        out = policy.sample_squashed_gaussian(mean, log_std, noise)
        return out.sampled_action, out.log_prob

    def q_values(self, obs, lam: float, action) -> np.ndarray:
        """Online-critic values at a single (s, a, lambda)."""
        x = np.ascontiguousarray(np.concatenate(
            [self.net_input(obs, lam), np.atleast_2d(action)], axis=1))
        return np.array([c.forward_batch(x)[0][0, 0] for c in self.critics])

    def uncertainty(self, obs, lam: float, action) -> float:
        return ensemble_uncertainty(self.q_values(obs, lam, action))

    # ---- updates ---------------------------------------------------------

    def critic_targets(self, batch, f_subset, rng: np.random.Generator):
        """REDQ-style target values for one minibatch.

        y = r + gamma * (1 - done) * (min over the F-subset of target
        critics at (s', a', lambda) - alpha * log pi(a' | s', lambda)).
        """
        if len(f_subset) == 0:
            raise ValueError("empty minimization subset")
        sp = self.net_input(batch["next_obs"], batch["lams"])
        noise = rng.standard_normal((sp.shape[0], self.act_dim))
        raw = self.actor.forward_batch(sp)[0]
        a2, logp2, _ = policy.sample_batch(raw, noise)
        xp = np.ascontiguousarray(np.concatenate([sp, a2], axis=1))
        q_next = np.min(np.stack(
            [self.targets[e].forward_batch(xp)[0][:, 0] for e in f_subset]), axis=0)
        y = batch["rewards"] + self.config.gamma * (1.0 - batch["dones"]) * (
            q_next - self.alpha * logp2)
        return y

    def critic_loss_grad(self, e: int, x, y, mask):
        """Masked mean-squared TD loss of critic ``e`` and its gradient.

        Masked-out rows contribute exactly zero to both; normalization is by
        the full batch size.
        """
        critic = self.critics[e]
        batch_n = x.shape[0]
        q, cache = critic.forward_batch(x)
        err = np.where(mask, q[:, 0] - y, 0.0)
        loss = float(err @ err) / batch_n
        dq = (2.0 / batch_n) * err
        grads, _ = critic.backward_batch(cache, dq[:, None])
        return loss, grads, q[:, 0]

    def critic_round(self, batch, rng: np.random.Generator) -> TrainMetrics:
        """One gradient round: fresh F-subset, masked critic steps, Polyak."""
        cfg = self.config
        f_subset = rng.choice(cfg.ensemble_size, size=cfg.min_targets, replace=False)
        y = self.critic_targets(batch, f_subset, rng)
        s_in = self.net_input(batch["obs"], batch["lams"])
        x = np.ascontiguousarray(np.concatenate([s_in, batch["actions"]], axis=1))

        losses = []
        q_all = []
        for e, critic in enumerate(self.critics):
            mask = batch["masks"][:, e]
            if not mask.any():
                continue
            loss, grads, q = self.critic_loss_grad(e, x, y, mask)
            losses.append(loss)
            q_all.append(q)
            adam_step_inplace(critic.flat, grads, self.critic_adam[e], cfg.lr_critic)
            polyak_update_inplace(self.targets[e], critic, cfg.tau)
        self.critic_rounds += 1

        q_cat = np.concatenate(q_all) if q_all else np.zeros(1)
        return TrainMetrics(
            critic_loss_mean=float(np.mean(losses)) if losses else 0.0,
            alpha=self.alpha,
            q_mean=float(q_cat.mean()), q_std=float(q_cat.std()), rounds=1)

    def actor_objective_grad(self, s_in, noise):
        """Reparameterized actor objective and its ascent gradient.

        Objective: mean over the batch of (ensemble-mean Q at the sampled
        action) - alpha * log pi. Returns (objective, dJ/dphi, logp).
        """
        batch_n = s_in.shape[0]
        raw, actor_cache = self.actor.forward_batch(s_in)
        a, logp, aux = policy.sample_batch(raw, noise)
        x = np.ascontiguousarray(np.concatenate([s_in, a], axis=1))

        n_ens = len(self.critics)
        up = np.full((batch_n, 1), 1.0 / (batch_n * n_ens))
        d_action = np.zeros_like(a)
        q_sum = np.zeros(batch_n)
        for critic in self.critics:
            q, cache = critic.forward_batch(x)
            q_sum += q[:, 0]
            dx = critic.backward_input(cache, up)
            d_action += dx[:, self.in_dim:]
        alpha = self.alpha
        objective = float(np.mean(q_sum / n_ens - alpha * logp))

        d_logp = np.full(batch_n, -alpha / batch_n)
        d_head = policy.sample_batch_grads(aux, d_action, d_logp)
        grads, _ = self.actor.backward_batch(actor_cache, d_head)
        return objective, grads, logp

    def actor_round(self, batch, rng: np.random.Generator) -> TrainMetrics:
        """Ascend the ensemble-mean Q minus entropy; then adapt alpha."""
        cfg = self.config
        batch_n = batch["obs"].shape[0]
        s_in = self.net_input(batch["obs"], batch["lams"])
        noise = rng.standard_normal((batch_n, self.act_dim))
        objective, grads, logp = self.actor_objective_grad(s_in, noise)
        if not np.all(np.isfinite(logp)):
            raise FloatingPointError("non-finite policy log-prob, update refused")
        adam_step_inplace(self.actor.flat, -grads, self.actor_adam, cfg.lr_actor)

        ent_gap = float(np.mean(-logp)) - cfg.target_entropy
        adam_step_inplace(self.log_alpha, np.array([self.alpha * ent_gap]),
                          self.alpha_adam, cfg.lr_alpha)
        self.actor_rounds += 1
        return TrainMetrics(actor_objective=objective, alpha=self.alpha, rounds=1)

    def td_error(self, obs, action, lam, reward, next_obs, done) -> float:
        """Mean-ensemble TD error of one transition (drives the TD-based
        weight rule). Uses the current networks, mean over targets for the
        bootstrap and mean over online critics for the estimate."""
        sp = self.net_input(next_obs, lam)
        raw = self.actor.forward_batch(sp)[0][0]
        mean, log_std = policy.split_head(raw)
        a2 = policy.greedy_action(mean)
        logp2 = float(policy.squash_log_prob(mean + 0.0, log_std, np.zeros_like(mean)))
        xp = np.ascontiguousarray(np.concatenate([sp, a2[None, :]], axis=1))
        q_next = float(np.mean([t.forward_batch(xp)[0][0, 0] for t in self.targets]))
        y = reward + self.config.gamma * (0.0 if done else 1.0) * (
            q_next - self.alpha * logp2)
        q = float(np.mean(self.q_values(obs, lam, action)))
        return y - q
