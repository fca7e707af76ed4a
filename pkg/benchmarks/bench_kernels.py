"""Compare the numba kernels against the pure-numpy fallbacks.

Run with the default (numba) path:

    python benchmarks/bench_kernels.py

The numpy fallback alone can be timed by setting DITTO_NO_NUMBA=1.
"""

import time

import numpy as np

from ditto import kernels


def bench(name, fn, *args, repeats=5):
    fn(*args)  # warm-up / JIT compile
    best = min(timeit(fn, args) for _ in range(repeats))
    print(f"{name:28s} {best * 1e3:10.2f} ms")
    return best


def timeit(fn, args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    rng = np.random.default_rng(0)
    print(f"active path: {'numba' if kernels.USE_NUMBA else 'numpy fallback'}\n")

    normed = rng.normal(size=(800, 32))
    normed /= np.linalg.norm(normed, axis=1, keepdims=True)
    trajs = rng.normal(size=(2000, 101, 2)) * 5
    frames = rng.integers(0, 256, (20, 720, 1280, 3), dtype=np.uint8)
    perm = np.array([2, 0, 1], dtype=np.int64)
    offs = np.array([17, 130, 255], dtype=np.int64)

    pairs = [
        ("greedy_dedup", (np.ascontiguousarray(normed), 0.95)),
        ("cumulative_displacements", (trajs,)),
        ("luminance", (frames,)),
        ("apply_color_map", (frames, perm, offs)),
    ]
    for name, args in pairs:
        active = bench(f"{name} (active)", getattr(kernels, name), *args)
        fallback = bench(f"{name} (numpy)", kernels.numpy_impls[name], *args)
        if kernels.USE_NUMBA:
            print(f"{'':28s} speedup x{fallback / active:0.2f}\n")


if __name__ == "__main__":
    main()
