"""Compare the compiled and NumPy iteration kernels across problem sizes.

Usage: python benchmarks/bench_kernel.py [--iters 200]
"""

import argparse
import time

import numpy as np

from risbeam.admm import SolverOptions
from risbeam.admm.backend import HAVE_EXTENSION
from risbeam.admm.solver import _solve_structured
from risbeam.channel import sample_channel
from risbeam.config import default_config


def time_backend(backend, n_side, users, iters, seed=0):
    cfg = default_config(seed=seed, users=users, n_x=n_side, n_z=n_side)
    ch = sample_channel(cfg, np.random.default_rng(seed))
    gains_norm = np.linalg.norm(ch.gains, axis=1)
    H = np.ascontiguousarray(ch.gains / gains_norm[:, None])
    sig2n = cfg.noise_w / (gains_norm**2 * cfg.p_max)
    opts = SolverOptions(backend=backend, max_iters=iters, epsilon=0.0,
                         track_sinr=False)
    t0 = time.perf_counter()
    _solve_structured(H, sig2n, cfg.n, users, opts, np.random.default_rng(seed))
    return (time.perf_counter() - t0) / iters


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--iters", type=int, default=200)
    args = parser.parse_args()

    if not HAVE_EXTENSION:
        print("compiled kernel not built; only the NumPy kernel is timed")
    print(f"{'N':>5} {'K':>3} {'numpy (us/iter)':>16} {'cython (us/iter)':>17} "
          f"{'speedup':>8}")
    for n_side, users in ((4, 5), (8, 5), (16, 5), (16, 8), (23, 5)):
        t_py = time_backend("py", n_side, users, args.iters)
        if HAVE_EXTENSION:
            t_c = time_backend("c", n_side, users, args.iters)
            print(f"{n_side * n_side:>5} {users:>3} {t_py * 1e6:>16.1f} "
                  f"{t_c * 1e6:>17.1f} {t_py / t_c:>8.1f}x")
        else:
            print(f"{n_side * n_side:>5} {users:>3} {t_py * 1e6:>16.1f} "
                  f"{'-':>17} {'-':>8}")


if __name__ == "__main__":
    main()
