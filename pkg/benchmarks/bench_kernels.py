"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from resolventkit import _pykernels, kernels


def cases(rng):
    P = rng.uniform(-5, 5, size=(20_000, 2))
    x = rng.uniform(-20, 20, size=20_000)
    A = rng.uniform(0, 1, size=(600, 2))
    B = rng.uniform(-1, 0, size=(600, 2))
    h = 0.01
    return {
        "epi_exp_project_many (2e4 points)": lambda m: m.epi_exp_project_many(P),
        "prox_exp_many (2e4 points)": lambda m: m.prox_exp_many(x),
        "minkowski_mark (600 x 600 pairs)": lambda m: m.minkowski_mark(A, 0.5, B, 0.5, h, (-60, -60), (120, 120)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    compiled = kernels.compiled_module()
    if compiled is None:
        print("compiled kernels are not built; only the fallback is timed")
    print(f"{'kernel':36s} {'fallback (s)':>13s} {'compiled (s)':>13s} {'speedup':>8s}")
    for name, fn in cases(np.random.default_rng(0)).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:36s} {t_py:13.4f} {'-':>13s} {'-':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        same = np.array_equal(fn(_pykernels), fn(compiled))
        print(f"{name:36s} {t_py:13.4f} {t_c:13.4f} {t_py / t_c:7.1f}x{'' if same else '  (outputs differ!)'}")


if __name__ == "__main__":
    main()
