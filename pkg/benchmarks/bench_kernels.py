"""Time the numba kernels against the numpy fallback on mixture-sized inputs.

    python3 benchmarks/bench_kernels.py [--n 5000] [--d 10] [--m 30] [--repeat 5]
"""

import argparse
import time

import numpy as np

from pesmc import _kernels, tmix


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--m", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    A = rng.standard_normal((args.m, args.d, args.d))
    sigmas = A @ A.transpose(0, 2, 1) + args.d * np.eye(args.d)
    mix = tmix.TMixture(np.full(args.m, 1.0 / args.m), rng.standard_normal((args.m, args.d)), sigmas)
    X = rng.standard_normal((args.n, args.d))
    coef = rng.random((args.n, args.m))

    cases = {
        "t_logpdf": lambda impl: impl[0](X, mix.means, mix.chols, mix.log_norm, mix.nu),
        "weighted_scatter": lambda impl: impl[1](X, mix.means, coef),
    }
    print(f"n={args.n} d={args.d} M={args.m}, best of {args.repeat}")
    for name, call in cases.items():
        row = {}
        for backend, impl in _kernels._IMPLS.items():
            call(impl)  # warm-up / JIT compile
            row[backend] = _best_of(lambda: call(impl), args.repeat)
        ref = call(_kernels._IMPLS["numpy"])
        ref = ref[0] if isinstance(ref, tuple) else ref
        line = "  ".join(f"{b}={t * 1e3:8.2f} ms" for b, t in row.items())
        if "numba" in row:
            got = call(_kernels._IMPLS["numba"])
            got = got[0] if isinstance(got, tuple) else got
            err = np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1.0)
            line += f"  speedup={row['numpy'] / row['numba']:.2f}x  max_rel_diff={err:.1e}"
        print(f"{name:17s} {line}")


if __name__ == "__main__":
    main()
