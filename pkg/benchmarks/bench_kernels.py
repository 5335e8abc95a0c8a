"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py --length 200000 --repeat 5
"""
import argparse
import time

import numpy as np

from punctstat import kernels
from punctstat._accel import HAVE_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=200_000, help="profile length for the DFA kernel")
    ap.add_argument("--scales", type=int, nargs="+", default=[16, 64, 256, 1024])
    ap.add_argument("--order", type=int, default=2)
    ap.add_argument("--grid", type=int, default=60, help="grid points per Weibull parameter")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can be timed")
    rng = np.random.default_rng(args.seed)
    profile = np.cumsum(rng.standard_normal(args.length))
    k = rng.geometric(0.15, size=20_000)
    support, counts = np.unique(k, return_counts=True)
    p_grid = np.linspace(0.01, 0.9, args.grid)
    beta_grid = np.linspace(0.3, 3.0, args.grid)

    cases = []
    for s in args.scales:
        basis = kernels.detrend_basis(s, args.order)
        cases.append((f"window_variances s={s}",
                      lambda b=basis, s=s: kernels.window_variances_numpy(profile, s, b),
                      lambda b=basis, s=s: kernels.window_variances_numba(profile, s, b)))
    cases.append((f"weibull_loglik_grid {args.grid}x{args.grid}",
                  lambda: kernels.weibull_loglik_grid_numpy(support, counts, p_grid, beta_grid),
                  lambda: kernels.weibull_loglik_grid_numba(support, counts, p_grid, beta_grid)))

    print(f"{'kernel':<34}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}{'max rel diff':>14}")
    for name, f_np, f_nb in cases:
        t_np, r_np = best_of(f_np, args.repeat)
        if HAVE_NUMBA:
            f_nb()  # compile outside the timed runs
            t_nb, r_nb = best_of(f_nb, args.repeat)
            a, b = np.asarray(r_np, dtype=float), np.asarray(r_nb, dtype=float)
            ok = np.isfinite(a) & np.isfinite(b)
            rel = np.max(np.abs(a[ok] - b[ok]) / np.maximum(np.abs(a[ok]), 1e-300)) if ok.any() else 0.0
            print(f"{name:<34}{t_np * 1e3:>10.2f}{t_nb * 1e3:>10.2f}{t_np / t_nb:>8.1f}x{rel:>14.1e}")
        else:
            print(f"{name:<34}{t_np * 1e3:>10.2f}{'-':>10}{'-':>9}{'-':>14}")


if __name__ == "__main__":
    main()
