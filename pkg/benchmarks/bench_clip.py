"""Benchmark the compiled triangle/disk clipping kernel against the
pure-Python twin, and confirm that both agree to roundoff.

Usage: python3 benchmarks/bench_clip.py [n_triangles] [repeats]
"""

import sys
import time

import numpy as np

from curlab import _clip
from curlab import _clippy

try:
    from curlab import _clipcore
except ImportError:
    _clipcore = None


def make_triangles(n, seed=0):
    rng = np.random.default_rng(seed)
    # mix of fully-inside, fully-outside and straddling triangles
    centers = rng.uniform(-1.5, 1.5, (n, 1, 2))
    return centers + rng.uniform(-0.4, 0.4, (n, 3, 2))


def time_batch(fn, tris, r, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(tris, r)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    tris = make_triangles(n)
    r = 1.0

    print(f"active backend: {_clip.BACKEND}")
    t_py, a_py = time_batch(_clippy.tri_disk_areas, tris, r, repeats)
    print(f"python  {n} triangles: {t_py * 1e3:8.1f} ms "
          f"({n / t_py / 1e6:.2f} M tri/s)")

    if _clipcore is None:
        print("compiled kernel not built; nothing to compare")
        return

    t_cy, a_cy = time_batch(_clipcore.tri_disk_areas, tris, r, repeats)
    print(f"cython  {n} triangles: {t_cy * 1e3:8.1f} ms "
          f"({n / t_cy / 1e6:.2f} M tri/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    worst = np.abs(a_py - a_cy).max()
    scale = np.abs(a_py).max()
    print(f"max |python - cython|: {worst:.3e} (scale {scale:.3e})")
    if worst > 1e-12 * max(scale, 1.0):
        raise SystemExit("kernels disagree beyond roundoff")
    print("kernels agree to roundoff")


if __name__ == "__main__":
    main()
