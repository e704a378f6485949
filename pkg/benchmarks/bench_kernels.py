"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --dim 64 --steps 4000
"""
import argparse
import math
import timeit

import numpy as np

from stabkit import kernels
from stabkit.core import assemble_generator, damped_from_obs
from stabkit.core.evolve import step_operators


def make_system(n, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    obs = rng.standard_normal((1, n))
    gen = assemble_generator(X - X.conj().T, damped_from_obs(obs, np.ones(n)), obs)
    P, Q = step_operators(gen, 0.01)
    z0 = rng.standard_normal(n) + 0j
    return gen, P, Q, z0


def cases(n, steps):
    gen, P, Q, z0 = make_system(n)
    obs = gen.obs.astype(complex)
    return {
        "propagate": lambda k: k.propagate(P, Q, gen.metric, gen.obs, z0, steps),
        "gramian_trapezoid": lambda k: k.gramian_trapezoid(P, obs, steps // 4, 0.01),
        "bisect_ftilde x200": lambda k: [k.bisect_ftilde(j * math.pi, (j + 1) * math.pi)
                                         for j in range(1, 201)],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=32)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("compiled")
    except ImportError:
        print("compiled extension not built; only the python backend is timed")
        cy = None

    print(f"dim={args.dim} steps={args.steps} best of {args.repeat}")
    print(f"{'kernel':<20} {'python [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for name, fn in cases(args.dim, args.steps).items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<20} {t_py:12.2f} {'-':>14} {'-':>8}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20} {t_py:12.2f} {t_cy:14.2f} {t_py / t_cy:8.1f}")


if __name__ == "__main__":
    main()
