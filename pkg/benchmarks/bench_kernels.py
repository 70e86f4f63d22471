"""Benchmark: compiled kernels vs the pure numpy fallback.

Times the batched MLP forward/backward passes, the Adam and Polyak updates,
and one full critic+actor gradient round at the two study sizes. Run with

    python benchmarks/bench_kernels.py

The active training backend is chosen at import (CHEQ_BACKEND overrides);
this script always measures both.
"""

import time

import numpy as np

from cheq import backend

try:
    from threadpoolctl import threadpool_limits
    threadpool_limits(1)
except Exception:
    pass

SHAPES = {
    "cartpole (5-64-64-1, batch 128)": ((5, 64, 64, 1), 128),
    "racing (48-128-128-1, batch 256)": ((48, 128, 128, 1), 256),
    "paper (48-256-256-1, batch 256)": ((48, 256, 256, 1), 256),
}


def time_call(fn, repeat=200):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat * 1e3  # ms


def bench_kernels():
    rng = np.random.default_rng(0)
    names = backend.available_backends()
    print(f"available backends: {names} (active: {backend.NAME})\n")
    header = f"{'kernel':<44}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, (sizes, batch) in SHAPES.items():
        n = backend.param_count(sizes)
        params = rng.standard_normal(n)
        x = np.ascontiguousarray(rng.standard_normal((batch, sizes[0])))
        dy = np.ascontiguousarray(rng.standard_normal((batch, sizes[-1])))
        rows = {"forward": [], "forward+backward": []}
        for name in names:
            impl = backend.get_backend(name)
            rows["forward"].append(time_call(
                lambda: impl.forward_batch(params, sizes, 0, x)))

            def fwd_bwd(impl=impl):
                _, cache = impl.forward_batch(params, sizes, 0, x)
                impl.backward_batch(params, sizes, 0, cache, dy)

            rows["forward+backward"].append(time_call(fwd_bwd))
        for op, vals in rows.items():
            speed = vals[0] / vals[-1] if len(vals) > 1 else 1.0
            print(f"{label + ' ' + op:<44}"
                  + "".join(f"{v:>10.3f}ms" for v in vals)
                  + f"{speed:>9.2f}x")

    n = backend.param_count((48, 256, 256, 1))
    params = rng.standard_normal(n)
    grads = rng.standard_normal(n)
    m = np.zeros(n)
    v = np.zeros(n)
    vals = []
    for name in names:
        impl = backend.get_backend(name)
        vals.append(time_call(lambda: impl.adam_update(
            params, grads, m, v, 5, 3e-4, 0.9, 0.999, 1e-8), repeat=500))
    print(f"{'adam update (79k params)':<44}"
          + "".join(f"{v:>10.3f}ms" for v in vals)
          + f"{vals[0] / vals[-1]:>9.2f}x")


def bench_training_round():
    from cheq.agents.core import AgentConfig, SacEnsembleAgent
    from cheq.buffer import ReplayBuffer
    rng = np.random.default_rng(0)
    print("\nfull gradient round (active backend only):")
    for label, (obs_dim, hid, batch, ens) in {
        "cartpole profile": (4, (64, 64), 128, 2),
        "racing profile": (44, (128, 128), 128, 5),
        "paper scale": (44, (256, 256), 256, 5),
    }.items():
        cfg = AgentConfig(ensemble_size=ens, min_targets=2, batch_size=batch,
                          hidden_sizes=hid, target_entropy=-1.0)
        agent = SacEnsembleAgent(obs_dim, 3, cfg, rng)
        buf = ReplayBuffer(4 * batch, obs_dim, 3, ens)
        for _ in range(2 * batch):
            buf.push(rng.standard_normal(obs_dim), rng.uniform(-1, 1, 3), 0.5,
                     0.1, rng.standard_normal(obs_dim), False,
                     rng.random(ens) < 0.8)

        def round_():
            b = buf.sample(batch, rng)
            agent.critic_round(b, rng)
            agent.actor_round(b, rng)

        ms = time_call(round_, repeat=50)
        print(f"  {label:<24} {ms:8.2f} ms/round "
              f"({1e5 * ms / 1e3 / 60:5.1f} min per 1e5 rounds)")


if __name__ == "__main__":
    bench_kernels()
    bench_training_round()
