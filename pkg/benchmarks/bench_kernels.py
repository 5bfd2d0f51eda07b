"""Time the numba kernels against their pure-numpy twins.

Run as a script: python3 benchmarks/bench_kernels.py [--repeats N]
The numba path is JIT-warmed before timing so compilation cost does not
pollute the numbers.
"""

import argparse
import time

import numpy as np

from puremit._accel import (
    HAS_NUMBA,
    backend,
    bin_outcomes_numba,
    bin_outcomes_numpy,
    kraus_apply_numba,
    kraus_apply_numpy,
)


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _kraus_case(rng, dim: int, n_ops: int):
    ops = rng.normal(size=(n_ops, dim, dim)) + 1j * rng.normal(size=(n_ops, dim, dim))
    ops /= np.sqrt(n_ops * dim)
    rho = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = rho @ rho.conj().T
    rho /= rho.trace().real
    return ops, ops.conj().transpose(0, 2, 1).copy(), rho


def _bin_case(rng, n_outcomes: int, n_draws: int):
    probs = rng.dirichlet(np.ones(n_outcomes))
    return np.cumsum(probs), rng.random(n_draws)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    rows = []
    for dim, n_ops in ((4, 4), (16, 16), (64, 16), (128, 8)):
        case = _kraus_case(rng, dim, n_ops)
        if HAS_NUMBA:
            kraus_apply_numba(*case)  # warm the JIT
            t_nb = _time(kraus_apply_numba, case, args.repeats)
            resid = float(
                np.max(np.abs(kraus_apply_numba(*case) - kraus_apply_numpy(*case)))
            )
        else:
            t_nb, resid = None, 0.0
        t_np = _time(kraus_apply_numpy, case, args.repeats)
        rows.append((f"kraus_apply d={dim} k={n_ops}", t_nb, t_np, resid))

    for n_outcomes, n_draws in ((2, 1_000_000), (8, 1_000_000), (64, 1_000_000)):
        case = _bin_case(rng, n_outcomes, n_draws)
        if HAS_NUMBA:
            bin_outcomes_numba(*case)
            t_nb = _time(bin_outcomes_numba, case, args.repeats)
            same = bool(
                np.array_equal(bin_outcomes_numba(*case), bin_outcomes_numpy(*case))
            )
            resid = 0.0 if same else float("nan")
        else:
            t_nb, resid = None, 0.0
        t_np = _time(bin_outcomes_numpy, case, args.repeats)
        rows.append((f"bin_outcomes n={n_outcomes} draws=1e6", t_nb, t_np, resid))

    print(f"selected backend: {backend()}")
    header = f"{'case':<32}{'numba (ms)':>12}{'numpy (ms)':>12}{'speedup':>10}{'residual':>12}"
    print(header)
    print("-" * len(header))
    for name, t_nb, t_np, resid in rows:
        if t_nb is None:
            print(f"{name:<32}{'n/a':>12}{t_np * 1e3:>12.3f}{'n/a':>10}{resid:>12.1e}")
        else:
            print(
                f"{name:<32}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}"
                f"{t_np / t_nb:>9.2f}x{resid:>12.1e}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
