"""Timing comparison of the compiled and reference polygamma kernels.

Per-call timings over a range of array sizes for each of the four
kernels, then a small end-to-end simulation study under each backend.
Run from the repository root:

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --sizes 1000,100000 --study-m 100
"""

import argparse
import time

import numpy as np

from bpreg import _kernels, simulate

KERNELS = ("lgamma", "digamma", "trigamma", "tetragamma")


def best_of(fn, arg, repeats, min_time=0.01):
    """Best per-call seconds over ``repeats`` adaptive batches."""
    calls = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(calls):
            fn(arg)
        elapsed = time.perf_counter() - t0
        if elapsed >= min_time:
            break
        calls *= 4
    best = elapsed / calls
    for _ in range(repeats - 1):
        t0 = time.perf_counter()
        for _ in range(calls):
            fn(arg)
        best = min(best, (time.perf_counter() - t0) / calls)
    return best


def bench_kernels(sizes, repeats):
    rng = np.random.default_rng(0)
    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}  (active: {_kernels.active_backend()})")
    print()
    header = f"{'kernel':12s}{'size':>9s}" + "".join(
        f"{b + ' ns/elt':>16s}" for b in backends
    )
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for size in sizes:
        arg = rng.uniform(0.05, 50.0, size)
        for kernel in KERNELS:
            row = f"{kernel:12s}{size:>9d}"
            per_elt = []
            for backend in backends:
                _kernels.use_backend(backend)
                fn = getattr(_kernels, kernel)
                sec = best_of(fn, arg, repeats)
                per_elt.append(sec / size * 1e9)
                row += f"{per_elt[-1]:>16.1f}"
            if len(per_elt) == 2:
                row += f"{per_elt[1] / per_elt[0]:>9.1f}x"
            print(row)
        print()


def bench_study(m, seed):
    cfg = simulate.McConfig(n=30, p=1, q=1, m=m, seed=seed)
    print(f"end-to-end study: n=30, m={m}")
    reports = {}
    for backend in _kernels.available_backends():
        _kernels.use_backend(backend)
        t0 = time.perf_counter()
        report = simulate.run_study(cfg)
        elapsed = time.perf_counter() - t0
        reports[backend] = report
        print(
            f"  {backend:7s}{elapsed:8.2f}s"
            f"  ({elapsed / m * 1e3:.1f} ms/replicate,"
            f" failures {report.n_failures})"
        )
    names = list(reports)
    if len(names) == 2:
        a = reports[names[0]].stats["mle"]["bias"]
        b = reports[names[1]].stats["mle"]["bias"]
        print(f"  max |bias difference| between backends: {np.max(np.abs(a - b)):.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        default="100,1000,10000,100000",
        help="comma separated array lengths",
    )
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats")
    parser.add_argument("--study-m", type=int, default=50, help="study replicates")
    parser.add_argument("--seed", type=int, default=42, help="study seed")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    original = _kernels.active_backend()
    try:
        bench_kernels(sizes, args.repeats)
        bench_study(args.study_m, args.seed)
    finally:
        _kernels.use_backend(original)


if __name__ == "__main__":
    main()
