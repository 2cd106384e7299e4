"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--trials N] [--pairs N] [--repeat N]
"""
import argparse
import timeit

import numpy as np

from femtorelay import kernels
from femtorelay.schemes import SchemeId


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"{label:<40s} {best * 1e3:10.2f} ms")
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=200_000, help="realizations per evaluate_batch call")
    p.add_argument("--pairs", type=int, default=5_000, help="point pairs for the oracle")
    p.add_argument("--grid", type=int, default=10_000, help="oracle grid size")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    rng = np.random.default_rng(0)
    g = rng.uniform(0.0, 100.0, size=(3, args.trials))
    pts = rng.uniform(0.0, 10.0, size=(4, args.pairs))

    backends = {"python": kernels.load_backend("python")}
    try:
        backends["cython"] = kernels.load_backend("cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    times = {}
    for name, mod in backends.items():
        for scheme in (SchemeId.DF, SchemeId.QF_WZQ):
            times[name, scheme.value] = bench(
                f"{name} evaluate_batch {scheme.value} n={args.trials}",
                lambda: mod.evaluate_batch(g[0], g[1], g[2], 2.0, 6.0, scheme.code),
                args.repeat,
            )
        times[name, "oracle"] = bench(
            f"{name} oracle_max_min {args.pairs}x{args.grid}",
            lambda: mod.oracle_max_min(*pts, args.grid),
            args.repeat,
        )
    if "cython" in backends:
        print()
        for key in ("DF", "QF_WZQ", "oracle"):
            print(f"speedup {key:<8s} {times['python', key] / times['cython', key]:6.1f}x")


if __name__ == "__main__":
    main()
