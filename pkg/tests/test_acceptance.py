"""Acceptance suite: one test per criterion, each printing a PASS line.

The two training studies (cart-pole ablation, racing trend) are desk-scale
trend experiments: minutes to a couple of hours on a 2-core CPU. They run
by default; deselect with ``-m "not training"`` for the fast suites only.

Set CHEQ_ACCEPT_CACHE=<dir> to keep and reuse the expensive training
artifacts across invocations while iterating.
"""

import json
import math
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from cheq import policy
from cheq.agents.core import AgentConfig, SacEnsembleAgent
from cheq.agents.loop import eval_episode
from cheq.agents.variants import make_adaptor
from cheq.buffer import ReplayBuffer
from cheq.envs.racing import RacingEnv
from cheq.envs.track import generate_track
from cheq.envs.vehicle import VehicleParams
from cheq.harness.experiments import (ablation_configs, racing_trend_configs,
                                      run_many)
from cheq.harness.profiles import profile
from cheq.harness.run import run_one
from cheq.harness.transfer import transfer_protocol
from cheq.hybrid import (WeightConfig, adapt_weight_cheq, adapt_weight_core,
                         ensemble_uncertainty, mix)
from cheq.nets import Network
from cheq.priors import (StanleyGains, constant_force_prior, gain_schedule,
                         longitudinal_control, racing_prior, stanley_lateral,
                         target_velocity)

from conftest import fd_gradient

R_MAX = 500.0  # cart-pole: 500-step cap, at most reward 1 per step
EXACT = 1e-9


def _cache_root(name, tmp_path_factory):
    root = os.environ.get("CHEQ_ACCEPT_CACHE")
    if root:
        path = os.path.join(root, name)
        os.makedirs(path, exist_ok=True)
        return path, os.path.exists(os.path.join(path, "DONE"))
    return str(tmp_path_factory.mktemp(name)), False


def _mark_done(path):
    if os.environ.get("CHEQ_ACCEPT_CACHE"):
        open(os.path.join(path, "DONE"), "w").write("done\n")


# ---------------------------------------------------------------------------
# Criterion 1: closed-form oracle suite
# ---------------------------------------------------------------------------

class TestClosedFormOracles:
    def test_mixing_endpoints_and_convexity(self, rng):
        for _ in range(200):
            p = rng.uniform(-1, 1, 3)
            a = rng.uniform(-1, 1, 3)
            lam = float(rng.uniform(0, 1))
            out = mix(p, a, lam)
            assert np.array_equal(mix(p, a, 0.0), p)
            assert np.array_equal(mix(p, a, 1.0), a)
            assert np.all(out >= np.minimum(p, a) - EXACT)
            assert np.all(out <= np.maximum(p, a) + EXACT)
        print("\n[acceptance] closed-form: mixing endpoints/convexity PASS")

    def test_uncertainty_vs_brute_force(self, rng):
        for _ in range(100):
            q = rng.standard_normal(rng.integers(2, 9))
            m = sum(q) / len(q)
            want = math.sqrt(sum((x - m) ** 2 for x in q) / len(q))
            assert abs(ensemble_uncertainty(q) - want) <= EXACT
        assert abs(ensemble_uncertainty([1, 2, 3, 4, 5]) - math.sqrt(2)) <= EXACT
        print("[acceptance] closed-form: ensemble std vs brute force PASS")

    def test_weight_map_knots(self):
        cfg = WeightConfig(lambda_min=0.2, lambda_max=1.0, u_min=0.03, u_max=0.15)
        assert abs(adapt_weight_cheq(0.03, cfg) - 1.0) <= EXACT
        assert abs(adapt_weight_cheq(0.15, cfg) - 0.2) <= EXACT
        assert abs(adapt_weight_cheq(0.09, cfg) - 0.6) <= EXACT
        print("[acceptance] closed-form: weight-map knot values PASS")

    def test_td_error_weight(self):
        assert adapt_weight_core(0.0, 7.0, 0.02) == 1.0
        # oracle: direct evaluation of 1/(1 + 7(1 - exp(-0.02*50)))
        oracle = 1.0 / (1.0 + 7.0 * (1.0 - math.exp(-(0.02 * 50.0))))
        assert abs(adapt_weight_core(50.0, 7.0, 0.02) - oracle) <= EXACT
        assert adapt_weight_core(50.0, 7.0, 0.02) == pytest.approx(0.1843371,
                                                                   abs=1e-5)
        print("[acceptance] closed-form: TD-error weight formula PASS")

    def test_controller_laws_worked_examples(self):
        g = StanleyGains()
        assert abs(stanley_lateral(0.0, 0.0, 5.0, g)) <= EXACT
        assert abs(stanley_lateral(0.1, 0.0, 17.0, g) - 0.1) <= EXACT
        assert abs(stanley_lateral(0.0, 1.0, 0.0, g) - 0.5) <= EXACT
        assert abs(target_velocity(10.0, g) - 4.0) <= EXACT
        assert abs(target_velocity(100.0, g) - 8.0) <= EXACT
        assert abs(target_velocity(1e12, g) - 8.0) <= EXACT
        assert abs(gain_schedule(8.0, g) - 0.25) <= EXACT
        assert abs(gain_schedule(28.0, g) - 0.05) <= EXACT
        assert abs(gain_schedule(18.0, g) - 0.15) <= EXACT
        assert longitudinal_control(8.0, 8.0, 0.25) == (0.0, 0.0)
        t, b = longitudinal_control(6.0, 8.0, 0.25)
        assert abs(t - 0.5) <= EXACT and b == 0.0
        t, b = longitudinal_control(12.0, 8.0, 0.25)
        assert t == 0.0 and abs(b - 1.0) <= EXACT
        assert constant_force_prior(5.0) == -5.0
        print("[acceptance] closed-form: controller-law worked examples PASS")


# ---------------------------------------------------------------------------
# Criterion 2: gradient acceptance
# ---------------------------------------------------------------------------

class TestGradientAcceptance:
    def test_100_random_networks_finite_differences(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(100):
            sizes = [int(s) for s in rng.integers(1, 17, size=rng.integers(2, 5))]
            act = "relu" if rng.random() < 0.5 else "tanh"
            net = Network.initialize(sizes, act, rng)
            x = rng.standard_normal(sizes[0])
            up = rng.standard_normal(sizes[-1])
            grads = net.gradients(x, up)

            def f(flat, net=net, x=x, up=up):
                return float(up @ Network(net.sizes, net.activation,
                                          flat.copy()).forward(x))

            idx = rng.choice(net.n_params, size=min(8, net.n_params),
                             replace=False)
            numeric = fd_gradient(f, net.flat, idx=idx)
            for i in idx:
                tol = 1e-4 * max(abs(numeric[i]), 1e-7)
                assert abs(grads[i] - numeric[i]) <= tol
                checked += 1
        print(f"\n[acceptance] gradients: 100 networks, {checked} coords PASS")

    def test_10_full_sac_objectives_finite_differences(self):
        rng = np.random.default_rng(7)
        for trial in range(5):
            cfg = AgentConfig(ensemble_size=2, min_targets=2,
                              hidden_sizes=(10,), batch_size=4,
                              target_entropy=-1.0)
            agent = SacEnsembleAgent(3, 2, cfg, rng)
            x = np.ascontiguousarray(rng.standard_normal((4, 3 + 1 + 2)))
            y = rng.standard_normal(4)
            mask = rng.random(4) < 0.8
            if not mask.any():
                mask[0] = True
            _, grads, _ = agent.critic_loss_grad(0, x, y, mask)
            critic = agent.critics[0]

            def closs(flat):
                q = Network(critic.sizes, critic.activation,
                            flat.copy()).forward_batch(x)[0][:, 0]
                err = np.where(mask, q - y, 0.0)
                return float(err @ err) / 4

            idx = rng.choice(critic.n_params, size=12, replace=False)
            numeric = fd_gradient(closs, critic.flat, idx=idx)
            for i in idx:
                assert abs(grads[i] - numeric[i]) <= \
                    1e-4 * max(abs(numeric[i]), 1e-7)

        for trial in range(5):
            cfg = AgentConfig(ensemble_size=2, min_targets=2,
                              hidden_sizes=(8,), batch_size=3,
                              target_entropy=-1.0)
            agent = SacEnsembleAgent(2, 1, cfg, rng)
            s_in = agent.net_input(rng.standard_normal((3, 2)),
                                   rng.uniform(0, 1, 3))
            noise = rng.standard_normal((3, 1))
            _, grads, _ = agent.actor_objective_grad(s_in, noise)

            def obj(flat):
                probe = Network(agent.actor.sizes, agent.actor.activation,
                                flat.copy())
                raw = probe.forward_batch(s_in)[0]
                a, logp, _ = policy.sample_batch(raw, noise)
                xs = np.ascontiguousarray(np.concatenate([s_in, a], axis=1))
                q = np.mean([c.forward_batch(xs)[0][:, 0]
                             for c in agent.critics], axis=0)
                return float(np.mean(q - agent.alpha * logp))

            idx = rng.choice(agent.actor.n_params, size=12, replace=False)
            numeric = fd_gradient(obj, agent.actor.flat, idx=idx)
            for i in idx:
                assert abs(grads[i] - numeric[i]) <= \
                    1e-4 * max(abs(numeric[i]), 1e-7)
        print("[acceptance] gradients: 10 SAC critic/actor objectives PASS")


# ---------------------------------------------------------------------------
# Criterion 3: algorithm-mechanics suite
# ---------------------------------------------------------------------------

class TestAlgorithmMechanics:
    def test_terminal_target(self, rng):
        cfg = AgentConfig(ensemble_size=3, min_targets=2, hidden_sizes=(8,),
                          target_entropy=-1.0)
        agent = SacEnsembleAgent(3, 1, cfg, rng)
        batch = {
            "obs": rng.standard_normal((8, 3)),
            "actions": rng.uniform(-1, 1, (8, 1)),
            "lams": rng.uniform(0, 1, 8),
            "rewards": rng.standard_normal(8),
            "next_obs": rng.standard_normal((8, 3)),
            "dones": np.ones(8),
            "masks": np.ones((8, 3), dtype=bool),
        }
        y = agent.critic_targets(batch, [0, 1], rng)
        assert np.array_equal(y, batch["rewards"])
        print("\n[acceptance] mechanics: terminal target y = r PASS")

    def test_mask_gating_bit_exact(self):
        cfg = AgentConfig(ensemble_size=2, min_targets=2, hidden_sizes=(12,),
                          target_entropy=-1.0)
        a1 = SacEnsembleAgent(3, 1, cfg, np.random.default_rng(1))
        a2 = SacEnsembleAgent(3, 1, cfg, np.random.default_rng(1))
        rng = np.random.default_rng(2)
        x = np.ascontiguousarray(rng.standard_normal((6, 5)))
        mask = np.array([True, False, True, True, False, True])
        y1 = rng.standard_normal(6)
        y2 = y1.copy()
        y2[1] = 1e9
        y2[4] = -1e9
        _, g1, _ = a1.critic_loss_grad(0, x, y1, mask)
        _, g2, _ = a2.critic_loss_grad(0, x, y2, mask)
        assert np.array_equal(g1, g2)
        print("[acceptance] mechanics: mask gating bit-exact PASS")

    def test_subset_frequency(self):
        rng = np.random.default_rng(5)
        e, f, n = 5, 2, 10_000
        counts = np.zeros(e)
        for _ in range(n):
            counts[rng.choice(e, size=f, replace=False)] += 1
        assert np.all(np.abs(counts / n - f / e) <= 0.02)
        print("[acceptance] mechanics: F-subset frequency F/E +- 0.02 PASS")

    def test_utd_bookkeeping_and_stored_action_and_reset(self, tmp_path):
        cfg = profile("cartpole-ablation", seed=0, total_steps=400,
                      variant="cheq",
                      agent={"ensemble_size": 3, "utd_ratio": 4,
                             "hidden_sizes": [16, 16], "batch_size": 16,
                             "warmup_random_steps": 100,
                             "warmup_lambda_steps": 50,
                             "buffer_capacity": 1000},
                      out_dir=str(tmp_path / "m"))
        summary = run_one(cfg)
        assert summary["gradient_rounds"] == 4 * (400 - 100)
        steps = [l.split(",") for l in
                 open(tmp_path / "m" / "steps.csv").read().splitlines()[1:]]
        episodes = [l.split(",") for l in
                    open(tmp_path / "m" / "episodes.csv").read().splitlines()[1:]]
        # weight resets to the floor after each episode past warm-up
        warm_total = 150
        for ep in episodes[:-1]:
            end = int(ep[1])
            if end + 1 > warm_total and end < 400:
                assert float(steps[end][1]) == 0.2
        first_update = open(tmp_path / "m" / "updates.csv").read().splitlines()[1]
        assert int(first_update.split(",")[0]) == 101
        print("[acceptance] mechanics: UTD G*N bookkeeping and weight reset PASS")

    def test_stored_action_is_policy_action(self, rng):
        """The replayed action must be the agent's own draw, not the blend."""
        from cheq.agents.loop import run_training
        from cheq.envs.cartpole import CartPoleEnv
        from cheq.harness.seeding import seed_streams

        cfg = AgentConfig(ensemble_size=2, min_targets=2, hidden_sizes=(8, 8),
                          batch_size=8, target_entropy=-1.0,
                          warmup_random_steps=0, warmup_lambda_steps=0,
                          buffer_capacity=200, mask_rate=1.0)
        rngs = seed_streams(0)
        env, eval_env = CartPoleEnv(), CartPoleEnv()
        agent = SacEnsembleAgent(4, 1, cfg, rngs["init"])
        buffer = ReplayBuffer(200, 4, 1, 2)

        seen = []
        orig_act = agent.act

        def spy_act(obs, lam, rng=None, greedy=False):
            a, lp = orig_act(obs, lam, rng, greedy)
            if not greedy:
                seen.append(a.copy())
            return a, lp

        agent.act = spy_act
        run_training(env=env, eval_env=eval_env, agent=agent,
                     adaptor=make_adaptor({"variant": "fixed", "value": 0.5}),
                     prior_fn=lambda e: np.array([-0.5]), buffer=buffer,
                     rngs=rngs, total_steps=50, eval_every_episodes=0)
        stored = buffer.actions[:50, 0]
        assert np.array_equal(stored, np.array([a[0] for a in seen]))
        # and the blend differs from the stored stream (lam=0.5, prior=-0.5)
        assert not np.allclose(stored, 0.5 * (-0.5) + 0.5 * stored)
        print("[acceptance] mechanics: stored action is a_RL, not the blend PASS")


# ---------------------------------------------------------------------------
# Criterion 4: controller safety
# ---------------------------------------------------------------------------

@pytest.mark.training
def test_controller_safety_twenty_laps():
    track = generate_track(7)
    env = RacingEnv(track, VehicleParams.default(), max_steps=10 ** 9)
    gains = StanleyGains()
    env.reset(spawn_s=0.0)
    progress = 0.0
    steps = 0
    while progress < 20.0 * track.length:
        action = racing_prior(env.state, env.track, gains, env.params)
        assert action[0] * action[1] == 0.0, "throttle and brake overlap"
        res = env.step(action)
        progress += res.info["progress"]
        steps += 1
        assert not res.failure, f"controller failed at step {steps}"
        assert steps < 60_000, "20 laps should take well under 60k steps"
    print(f"\n[acceptance] controller safety: 20 laps, zero failures, "
          f"{steps} steps PASS")


# ---------------------------------------------------------------------------
# Criterion 5: cart-pole formulation ablation (desk scale)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def ablation_results(tmp_path_factory):
    root, cached = _cache_root("ablation", tmp_path_factory)
    if not cached:
        run_many(ablation_configs(root, seeds=range(5)), max_workers=2)
        _mark_done(root)
    out = {}
    for mode in ("fixed", "schedule"):
        for form in ("contextual", "stationary", "mixed_action"):
            rets = []
            for seed in range(5):
                with open(os.path.join(root, f"{mode}_{form}_s{seed}",
                                       "summary.json")) as f:
                    rets.append(json.load(f)["final_return"])
            out[(mode, form)] = rets
    return out


@pytest.mark.training
class TestCartpoleAblation:
    def test_fixed_weight_formulations(self, ablation_results):
        """Fixed 0.5 blend: context-aware and stationary-hybrid agents must
        master the task; the mixed-action agent must not."""
        hi = 0.9 * R_MAX
        lo = 0.5 * R_MAX
        ctx = ablation_results[("fixed", "contextual")]
        sta = ablation_results[("fixed", "stationary")]
        mix_ = ablation_results[("fixed", "mixed_action")]
        assert sum(r >= hi for r in ctx) >= 4, f"contextual: {ctx}"
        assert sum(r >= hi for r in sta) >= 4, f"stationary: {sta}"
        assert sum(r < lo for r in mix_) >= 4, f"mixed-action: {mix_}"
        print(f"\n[acceptance] ablation fixed-0.5: ctx={np.round(ctx)} "
              f"sta={np.round(sta)} mixed={np.round(mix_)} PASS")

    def test_schedule_only_contextual_succeeds(self, ablation_results):
        hi = 0.9 * R_MAX
        ctx = ablation_results[("schedule", "contextual")]
        sta = ablation_results[("schedule", "stationary")]
        mix_ = ablation_results[("schedule", "mixed_action")]
        assert sum(r >= hi for r in ctx) >= 4, f"contextual: {ctx}"
        assert sum(r >= hi for r in sta) < 4, f"stationary: {sta}"
        assert sum(r >= hi for r in mix_) < 4, f"mixed-action: {mix_}"
        print(f"[acceptance] ablation schedule: ctx={np.round(ctx)} "
              f"sta={np.round(sta)} mixed={np.round(mix_)} PASS")


# ---------------------------------------------------------------------------
# Criterion 6 + 7: racing desk-scale trend and transfer protocol
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def racing_results(tmp_path_factory):
    root, cached = _cache_root("racing", tmp_path_factory)
    if not cached:
        run_many(racing_trend_configs(root, seeds=range(3)), max_workers=2)
        _mark_done(root)
    return root


def cum_failures_at(run_dir, step):
    rows = open(os.path.join(run_dir, "episodes.csv")).read().splitlines()[1:]
    best = 0
    for r in rows:
        parts = r.split(",")
        if int(parts[1]) <= step:
            best = int(parts[4])
    return best


@pytest.mark.training
class TestRacingTrend:
    def test_fewer_failures_than_sac_at_matched_steps(self, racing_results):
        grid = range(20_000, 200_001, 20_000)
        for seed in range(3):
            cheq_dir = os.path.join(racing_results, f"cheq_s{seed}")
            sac_dir = os.path.join(racing_results, f"sac_s{seed}")
            for step in grid:
                c = cum_failures_at(cheq_dir, step)
                s = cum_failures_at(sac_dir, step)
                assert c < s, (f"seed {seed} step {step}: adaptive {c} "
                               f"vs sac {s}")
        print("\n[acceptance] racing trend: strictly fewer failures at all "
              "matched steps, every seed PASS")

    def test_final_return_exceeds_prior(self, racing_results):
        track = generate_track(7)
        env = RacingEnv(track, VehicleParams.default(), max_steps=1000)
        gains = StanleyGains()
        prior_ret, _, _ = eval_episode(
            env, None, None,
            lambda e: racing_prior(e.state, e.track, gains, e.params))
        finals = []
        for seed in range(3):
            with open(os.path.join(racing_results, f"cheq_s{seed}",
                                   "summary.json")) as f:
                finals.append(json.load(f)["final_return"])
        assert np.mean(finals) > prior_ret, (finals, prior_ret)
        print(f"[acceptance] racing trend: final greedy return "
              f"{np.round(finals, 1)} vs prior {prior_ret:.1f} PASS")


@pytest.mark.training
class TestTransferProtocol:
    @pytest.fixture(scope="class")
    def transfer_out(self, racing_results, tmp_path_factory):
        out = str(tmp_path_factory.mktemp("transfer"))
        ckpt_root = os.path.join(racing_results, "cheq_s0", "checkpoints")
        ckpts = sorted(os.path.join(ckpt_root, d) for d in os.listdir(ckpt_root))
        assert len(ckpts) == 10, f"expected 10 checkpoints, got {len(ckpts)}"
        tracks = {f"seed{1000 + i}": generate_track(1000 + i) for i in range(10)}
        summary = transfer_protocol(ckpts, tracks, os.path.join(out, "models"))
        prior_summary = transfer_protocol(
            [], tracks, os.path.join(out, "prior"), prior_only=True)
        return out, summary, prior_summary

    def test_exactly_100_rows(self, transfer_out):
        _, summary, _ = transfer_out
        assert summary["rows"] == 100
        print("\n[acceptance] transfer: 10 checkpoints x 10 tracks = 100 "
              "rows PASS")

    def test_prior_only_success_rate_100(self, transfer_out):
        _, _, prior_summary = transfer_out
        assert prior_summary["rows"] == 10
        assert prior_summary["success_rate"] == 1.0
        print("[acceptance] transfer: prior-only success rate 100% PASS")

    def test_weight_drops_below_max_on_each_track(self, transfer_out):
        """On every unseen track the most-trained model must hand authority
        back at least once: after first reaching the ceiling, the weight
        falls below it again (or never reaches it at all)."""
        out, _, _ = transfer_out
        trace_dir = os.path.join(out, "models", "traces")
        lam_max = 1.0
        final_model = sorted(
            {f.split("__")[0] for f in os.listdir(trace_dir)})[-1]
        for i in range(10):
            path = os.path.join(trace_dir, f"{final_model}__seed{1000 + i}.csv")
            lams = [float(l.split(",")[3]) for l in
                    open(path).read().splitlines()[1:]]
            hit = next((k for k, v in enumerate(lams)
                        if v >= lam_max - 1e-12), None)
            if hit is None:
                continue  # never fully autonomous: prior engaged throughout
            assert any(v < lam_max - 1e-12 for v in lams[hit + 1:]), \
                f"track seed{1000 + i}: weight never dropped after step {hit}"
        print("[acceptance] transfer: weight drops below its ceiling on "
              "every unseen track PASS")


# ---------------------------------------------------------------------------
# Criterion 8: determinism
# ---------------------------------------------------------------------------

def test_train_determinism_byte_identical(tmp_path):
    def one(out):
        cfg = profile("cartpole-ablation", seed=123, total_steps=700,
                      agent={"hidden_sizes": [16, 16], "batch_size": 16,
                             "warmup_random_steps": 80,
                             "warmup_lambda_steps": 40,
                             "buffer_capacity": 1000},
                      out_dir=str(tmp_path / out))
        run_one(cfg)

    one("a")
    one("b")
    for f in ("steps.csv", "episodes.csv", "eval.csv", "updates.csv"):
        assert (tmp_path / "a" / f).read_bytes() == \
            (tmp_path / "b" / f).read_bytes(), f"{f} differs between runs"
    print("\n[acceptance] determinism: repeated seed gives byte-identical "
          "logs PASS")
