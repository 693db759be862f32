"""Benchmark the numba kernels against the pure-numpy fallbacks.

Kernel micro-benchmarks import both implementations side by side; the
end-to-end sampler comparison re-launches this script in a subprocess with
SWITCHCOUNT_BACKEND set, because the backend binds at import time.

Usage:
    python benchmarks/bench_backends.py            # kernel table + sampler
    python benchmarks/bench_backends.py --kernels-only
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def _timeit(fn, repeat=30):
    fn()  # warm-up (JIT compile on the numba side)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n=300, t=5, repeat=30):
    from switchcount import _kernels_numba as kb
    from switchcount import _kernels_numpy as kp

    rng = np.random.default_rng(0)
    counts = rng.poisson(2.0, size=(n, t)).astype(np.int64)
    lam = rng.uniform(0.5, 6.0, size=(n, t))
    states = ((counts > 0) | (rng.random((n, t)) < 0.5)).astype(np.int64)
    z = rng.normal(size=(n, t))
    p01 = rng.uniform(0.2, 0.8, size=n)
    p10 = rng.uniform(0.2, 0.8, size=n)
    u = rng.random((n, t))
    alpha, fam = 0.3, kp.FAMILY_NB

    cases = [
        ("plain_loglik", lambda k: k.plain_loglik(counts, lam, alpha, fam)),
        ("masked_loglik", lambda k: k.masked_loglik(counts, states, lam, alpha, fam)),
        ("zi_loglik", lambda k: k.zi_loglik(counts, lam, z, alpha, fam)),
        ("forward_loglik", lambda k: k.forward_loglik(counts, lam, alpha, fam, p01, p10)),
        ("ffbs", lambda k: k.ffbs(counts, lam, alpha, fam, p01, p10, u)),
        ("state_stats", lambda k: k.state_stats(counts, states, lam, alpha, fam)),
    ]
    print(f"kernel micro-benchmarks on a {n}x{t} panel (best of {repeat}):")
    print(f"{'kernel':<16} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, call in cases:
        t_np = _timeit(lambda: call(kp), repeat)
        t_nb = _timeit(lambda: call(kb), repeat)
        print(f"{name:<16} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us {t_np / t_nb:>8.1f}x")


def bench_sampler_subprocess(backend, n=100, t=5, sweeps=4000):
    code = f"""
import time
import numpy as np
import switchcount as sc
from switchcount.models import ModelSpec, ParamSet

spec = ModelSpec.from_name("msnb")
rng = np.random.default_rng(7)
truth = ParamSet(beta=np.array([1.5, 0.4, -0.3]), log_alpha=np.log(0.15),
                 transitions=rng.uniform(0.2, 0.8, size=({n}, 2)))
panel, _ = sc.simulate_panel(spec, truth, {n}, {t}, seed=3)
cfg = sc.McmcConfig(n_chains=2, n_draws={sweeps}, n_burnin={sweeps // 4}, thin=5, seed=1)
sc.sample_posterior(spec, panel, cfg=cfg)  # warm-up/compile
t0 = time.perf_counter()
sc.sample_posterior(spec, panel, cfg=cfg)
el = time.perf_counter() - t0
print(f"{{el:.2f}}s total, {{el / (2 * {sweeps}) * 1e6:.0f}}us/sweep")
"""
    env = dict(os.environ, SWITCHCOUNT_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    print(f"sampler ({backend:>5}): {out.stdout.strip()}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kernels-only", action="store_true")
    parser.add_argument("--n", type=int, default=300)
    parser.add_argument("--sweeps", type=int, default=4000)
    args = parser.parse_args()

    bench_kernels(n=args.n)
    if not args.kernels_only:
        print()
        print(f"end-to-end MSNB sampler, 2 chains x {args.sweeps} sweeps, N=100 T=5:")
        for backend in ("numpy", "numba"):
            bench_sampler_subprocess(backend, sweeps=args.sweeps)


if __name__ == "__main__":
    main()
