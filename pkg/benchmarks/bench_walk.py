"""Compare the compiled and pure-Python walk kernels.

    python3 benchmarks/bench_walk.py [--length 60] [--walks 20000]
"""

import argparse
import time

import numpy as np

from ciugraph import _kernels, _walk_py


def run(fn, walks, xs, ys, quads):
    t0 = time.perf_counter()
    for seq in walks:
        fn(seq, xs, ys, quads)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=60)
    ap.add_argument("--walks", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    xs = rng.uniform(0, 546, 24)
    ys = rng.uniform(0, 290, 24)
    quads = rng.integers(0, 4, 24).astype(np.int64)
    walks = [rng.integers(1, 24, args.length).astype(np.int64) for _ in range(args.walks)]

    py = run(_walk_py.walk_stats, walks, xs, ys, quads)
    print(f"python  {py:8.3f} s  ({1e6 * py / args.walks:7.2f} us/walk)")
    if _kernels.BACKEND != "cython":
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return
    cy = run(_kernels.walk_stats, walks, xs, ys, quads)
    print(f"cython  {cy:8.3f} s  ({1e6 * cy / args.walks:7.2f} us/walk)  speedup x{py / cy:.1f}")
    for seq in walks[:200]:
        a = _walk_py.walk_stats(seq, xs, ys, quads)
        b = _kernels.walk_stats(seq, xs, ys, quads)
        assert all(abs(u - v) <= 1e-9 * max(1.0, abs(u)) for u, v in zip(a, b)), (a, b)
    print("outputs agree")


if __name__ == "__main__":
    main()
