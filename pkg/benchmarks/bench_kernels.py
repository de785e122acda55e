"""Compare the compiled and numpy kernels.

Run ``python3 benchmarks/bench_kernels.py``. Reports the best of several
repeats for the Toeplitz minor sweep (one full Fisher-density profile) and
for the truncated sine series, and checks that both backends agree.
"""
import argparse
import timeit

import numpy as np

from kitaev_mpe import kernels
from kitaev_mpe.correlators import X, kernel_for
from kitaev_mpe.model import ModelParams


def toeplitz_data(L):
    kernel = kernel_for(ModelParams(mu=1.0, alpha=0.5, L=L))
    n = L - 1
    base = L - 1 + X.offset
    return kernel.g[base:base + n].copy(), kernel.g[base - n + 1:base + 1][::-1].copy()


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="256,1024,4096")
    parser.add_argument("--terms", default="10000,1000000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = [("python", kernels.python_backend)]
    if kernels.compiled_backend is not None:
        backends.append(("cython", kernels.compiled_backend))
    else:
        print("compiled extension not built; timing the numpy kernels only")

    print(f"{'kernel':<24}{'size':>10}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for L in (int(s) for s in args.sizes.split(",")):
        tpos, tneg = toeplitz_data(L)
        times, results = [], []
        for _, mod in backends:
            times.append(best_time(lambda: mod.toeplitz_minor_ratios(tpos, tneg), args.repeat))
            results.append(mod.toeplitz_minor_ratios(tpos, tneg))
        if len(results) == 2:
            np.testing.assert_allclose(results[0][0], results[1][0], rtol=1e-9)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{'toeplitz_minor_ratios':<24}{L:>10}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)
    for n in (int(s) for s in args.terms.split(",")):
        times, results = [], []
        for _, mod in backends:
            times.append(best_time(lambda: mod.sine_series(0.01, 0.5, n), args.repeat))
            results.append(mod.sine_series(0.01, 0.5, n))
        if len(results) == 2:
            np.testing.assert_allclose(results[0], results[1], rtol=1e-12)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{'sine_series':<24}{n:>10}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
