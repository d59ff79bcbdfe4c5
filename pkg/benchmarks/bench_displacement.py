"""Compare the compiled displacement kernel with the numpy fallback.

    python benchmarks/bench_displacement.py [--repeat 5] [--threads 1]

Prints the best-of-repeat wall time per backend for a few batch sizes and
truncation dimensions, the speed-up, and the largest entrywise difference
between the two results.
"""

import argparse
import os
import time

import numpy as np

from phasepom import kernels


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    os.environ["PHASEPOM_THREADS"] = str(args.threads)

    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not available; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'batch':>6} {'dim':>4} {'python [s]':>11} {'compiled [s]':>13} {'speed-up':>9} {'max diff':>9}")
    for batch, dim in [(2048, 12), (2048, 60), (8192, 60), (512, 120)]:
        betas = 3 * (rng.uniform(-1, 1, batch) + 1j * rng.uniform(-1, 1, batch))
        t_py = best_time(lambda: kernels.displacement_batch(betas, dim, backend="python"), args.repeat)
        if "compiled" in kernels.BACKENDS:
            t_c = best_time(lambda: kernels.displacement_batch(betas, dim, backend="compiled"), args.repeat)
            diff = np.abs(kernels.displacement_batch(betas, dim, backend="python")
                          - kernels.displacement_batch(betas, dim, backend="compiled")).max()
            print(f"{batch:6d} {dim:4d} {t_py:11.4f} {t_c:13.4f} {t_py / t_c:8.1f}x {diff:9.1e}")
        else:
            print(f"{batch:6d} {dim:4d} {t_py:11.4f} {'-':>13} {'-':>9} {'-':>9}")


if __name__ == "__main__":
    main()
