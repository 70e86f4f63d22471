"""Interaction and training loops.

``run_training`` drives one seeded run: warm-up with uniform random actions,
per-step weight adaption, blended environment steps, masked ensemble
updates at the configured update-to-data ratio, periodic greedy evaluation
and checkpoints. ``eval_episode`` is the shared greedy rollout used by the
in-training evaluation, the eval CLI and the transfer protocol.

Actions live in two spaces: the agent's tanh space [-1, 1]^d and the
environment's action box. Both blending and storage happen in tanh space;
the box mapping is affine so the blend commutes with it.
"""

from __future__ import annotations

import numpy as np

from ..hybrid import WeightAdaptor, mix, sample_bernoulli_masks
from .core import SacEnsembleAgent


def to_box(a_tanh, low, high):
    return low + 0.5 * (np.asarray(a_tanh) + 1.0) * (high - low)


def to_tanh(a_box, low, high):
    return 2.0 * (np.asarray(a_box) - low) / (high - low) - 1.0


class NullLogger:
    """Swallows every logging call; handy for tests."""

    def log_step(self, *a): pass

    def log_episode(self, *a): pass

    def log_eval(self, *a): pass

    def log_update(self, *a): pass


def _reset_weight(adaptor, t, in_warmup, rng_warmup):
    if in_warmup and adaptor.variant in ("cheq", "core"):
        return adaptor.warmup_weight(t, rng_warmup)
    return adaptor.initial_weight(t)


def run_training(*, env, eval_env, agent: SacEnsembleAgent,
                 adaptor: WeightAdaptor, prior_fn, buffer, rngs: dict,
                 total_steps: int, eval_every_episodes: int = 20,
                 checkpoint_every: int = 0, checkpoint_fn=None,
                 logger=None, final_eval_episodes: int = 5) -> dict:
    """Run one training job; returns the run summary.

    ``rngs`` must provide independent generators under the keys env,
    action, update, masks, warmup and eval. ``prior_fn`` maps the live env
    to a box-space prior action (None trains without a prior, i.e. the
    weight must be pinned to 1).
    """
    logger = logger or NullLogger()
    cfg = agent.config
    low = np.asarray(env.action_low, dtype=np.float64)
    high = np.asarray(env.action_high, dtype=np.float64)
    warm_total = cfg.warmup_random_steps + cfg.warmup_lambda_steps

    rng_env, rng_action = rngs["env"], rngs["action"]
    rng_update, rng_masks = rngs["update"], rngs["masks"]
    rng_warmup, rng_eval = rngs["warmup"], rngs["eval"]

    obs = env.reset(rng_env)
    lam = _reset_weight(adaptor, 0, warm_total >= 1, rng_warmup)
    episode = 0
    episode_return = 0.0
    cum_failures = 0
    gradient_rounds = 0
    eval_returns = []

    for t in range(1, total_steps + 1):
        if t <= cfg.warmup_random_steps:
            a_rl = rng_action.uniform(-1.0, 1.0, agent.act_dim)
        else:
            a_rl, _ = agent.act(obs, lam, rng_action)
        u = agent.uncertainty(obs, lam, a_rl)

        if prior_fn is None:
            applied = a_rl
        else:
            a_prior = to_tanh(prior_fn(env), low, high)
            applied = mix(a_prior, a_rl, lam)
        res = env.step(to_box(applied, low, high))
        next_obs = env.observe()

        stored = applied if cfg.formulation == "mixed_action" else a_rl
        done_store = bool(res.failure)
        masks = sample_bernoulli_masks(cfg.ensemble_size, cfg.mask_rate, rng_masks)
        buffer.push(obs, stored, lam, res.reward, next_obs, done_store, masks)
        logger.log_step(t, lam, u, res.reward)
        episode_return += res.reward

        # next weight (applies to step t+1), from the pre-update networks
        if t + 1 <= warm_total and adaptor.variant in ("cheq", "core"):
            lam_next = adaptor.warmup_weight(t, rng_warmup)
        elif adaptor.uses_uncertainty:
            lam_next = adaptor.next_weight(uncertainty=u)
        elif adaptor.uses_td_error:
            delta = agent.td_error(obs, stored, lam, res.reward, next_obs, done_store)
            lam_next = adaptor.next_weight(td_error=delta)
        else:
            lam_next = adaptor.next_weight(t=t)

        if t > cfg.warmup_random_steps and len(buffer) >= cfg.batch_size:
            closs = 0.0
            batch = None
            for _ in range(cfg.utd_ratio):
                batch = buffer.sample(cfg.batch_size, rng_update)
                m = agent.critic_round(batch, rng_update)
                closs += m.critic_loss_mean
                gradient_rounds += 1
            am = agent.actor_round(batch, rng_update)
            closs /= cfg.utd_ratio
            if not (np.isfinite(closs) and np.isfinite(am.actor_objective)):
                raise FloatingPointError(
                    f"non-finite loss at step {t}: critic {closs}, "
                    f"actor {am.actor_objective}")
            logger.log_update(t, closs, am.actor_objective, am.alpha)

        obs = next_obs
        lam = lam_next
        if res.terminated:
            episode += 1
            cum_failures += int(res.failure)
            logger.log_episode(episode, t, episode_return, int(res.failure),
                               cum_failures)
            if eval_every_episodes and episode % eval_every_episodes == 0:
                ret, fail, _ = eval_episode(eval_env, agent, adaptor, prior_fn,
                                            rng_eval, t_global=t)
                eval_returns.append(ret)
                logger.log_eval(t, ret, int(fail))
            obs = env.reset(rng_env)
            episode_return = 0.0
            lam = _reset_weight(adaptor, t, t + 1 <= warm_total, rng_warmup)

        if checkpoint_every and checkpoint_fn and t % checkpoint_every == 0:
            checkpoint_fn(t)

    if checkpoint_fn and (not checkpoint_every or total_steps % checkpoint_every):
        checkpoint_fn(total_steps)

    # assess the trained policy: a few greedy adapted episodes at the final
    # training time (the eval rows above are the learning curve)
    final_evals = [eval_episode(eval_env, agent, adaptor, prior_fn, rng_eval,
                                t_global=total_steps)[0]
                   for _ in range(final_eval_episodes)]
    return {
        "episodes": episode,
        "cum_failures": cum_failures,
        "gradient_rounds": gradient_rounds,
        "final_return": float(np.mean(final_evals)),
        "final_evals": final_evals,
        "eval_returns": eval_returns,
    }


def eval_episode(env, agent, adaptor, prior_fn, rng=None, t_global: int = 0,
                 trace=None, max_steps: int | None = None):
    """One greedy episode with the weight adapted as during training.

    ``agent=None`` runs the prior alone. ``trace``, if given, collects
    (step, x, y, lam, speed) rows for environments that expose a car state.
    Returns (return, failure, steps).
    """
    if hasattr(env, "eval_reset"):
        obs = env.eval_reset(rng)
    else:
        obs = env.reset(rng)
    low = np.asarray(env.action_low, dtype=np.float64)
    high = np.asarray(env.action_high, dtype=np.float64)
    lam = adaptor.initial_weight(t_global) if adaptor is not None else 0.0
    total = 0.0
    steps = 0
    failure = False
    while True:
        if agent is None:
            box_action = np.asarray(prior_fn(env), dtype=np.float64)
            u = 0.0
            a_rl = None
        else:
            a_rl, _ = agent.act(obs, lam, greedy=True)
            u = agent.uncertainty(obs, lam, a_rl)
            if prior_fn is None:
                applied = a_rl
            else:
                a_prior = to_tanh(prior_fn(env), low, high)
                applied = mix(a_prior, a_rl, lam)
            box_action = to_box(applied, low, high)
        if trace is not None and hasattr(env, "state") and env.state is not None:
            trace.append((steps, env.state.x, env.state.y, lam,
                          float(np.hypot(env.state.vx, env.state.vy))))
        res = env.step(box_action)
        next_obs = env.observe()
        total += res.reward
        steps += 1
        if agent is not None and adaptor is not None:
            if adaptor.uses_uncertainty:
                lam = adaptor.next_weight(uncertainty=u)
            elif adaptor.uses_td_error:
                delta = agent.td_error(obs, a_rl, lam, res.reward, next_obs,
                                       bool(res.failure))
                lam = adaptor.next_weight(td_error=delta)
            else:
                lam = adaptor.next_weight(t=t_global)
        obs = next_obs
        failure = failure or bool(res.failure)
        if res.terminated or (max_steps and steps >= max_steps):
            return total, failure, steps
