"""Time the compiled kernels against the numpy fallback.

Run ``python benchmarks/bench_kernels.py`` after building the extension.
Each kernel is timed on both backends with identical inputs, the outputs are
checked for bitwise equality, and a table of best-of-N wall times is printed.
A final row times a complete training run with each backend forced.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sparsepce import _backend

TRAIN_SNIPPET = """
import time
from sparsepce.benchmarks import get_problem
from sparsepce.training import ExperimentalDesign, TrainConfig, train
prob = get_problem("ishigami")
x, y = prob.sample(150, 1)
best = float("inf")
for _ in range({repeat}):
    t = time.perf_counter()
    train(ExperimentalDesign(x, y), prob.space, TrainConfig(selector="LARS"))
    best = min(best, time.perf_counter() - t)
print(best)
"""


def cases(rng):
    x = rng.uniform(-1.0, 1.0, 20_000)
    tables = rng.uniform(-1.0, 1.0, size=(6, 11, 350))
    tables[:, 0, :] = 1.0
    from sparsepce.basis import enumerate_total_degree

    alphas = np.ascontiguousarray(enumerate_total_degree(6, 8))
    c = rng.normal(size=8008)
    a = rng.normal(size=8008)
    cand = (rng.random(8008) > 0.01).astype(np.uint8)
    return {
        "univariate_table (N=20000, k<=10)": lambda k: k.univariate_table(x, 10, 0),
        "tensor_design (N=350, P=3003, d=6)": lambda k: k.tensor_design(tables, alphas),
        "lars_step (P=8008)": lambda k: k.lars_step(c, a, 3.0, 1.2, cand, 1e-12),
    }


def time_training(backend: str, repeat: int) -> float:
    env = dict(os.environ, SPARSEPCE_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", TRAIN_SNIPPET.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="best-of repeats per measurement")
    parser.add_argument("--number", type=int, default=3, help="calls per repeat")
    args = parser.parse_args(argv)

    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is available")
    kernels = {name: _backend.get_backend(name) for name in backends}
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s}" + "".join(f"{b:>14s}" for b in backends) + (f"{'speed-up':>12s}" if len(backends) > 1 else ""))
    for label, fn in cases(rng).items():
        results = {b: fn(k) for b, k in kernels.items()}
        ref = results["python"]
        for b, r in results.items():
            same = r == ref if isinstance(r, tuple) else np.array_equal(r, ref)
            if not same:
                raise SystemExit(f"{label}: backend {b} disagrees with the python backend")
        times = {b: min(timeit.repeat(lambda k=k: fn(k), number=args.number, repeat=args.repeat)) / args.number for b, k in kernels.items()}
        row = f"{label:40s}" + "".join(f"{times[b] * 1e3:11.3f} ms" for b in backends)
        if len(backends) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)
    train_times = {b: time_training(b, args.repeat) for b in backends}
    row = f"{'train Ishigami N=150 LARS (end to end)':40s}" + "".join(f"{train_times[b] * 1e3:11.1f} ms" for b in backends)
    if len(backends) > 1:
        row += f"{train_times['python'] / train_times['cython']:11.1f}x"
    print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
