"""Compare the compiled and pure-numpy kernels on lattice evolution and grid scans.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time per backend and the max result difference.
"""

import argparse
import time

import numpy as np

from putowalk import _kernels
from putowalk.criteria import symbol_sigma_min
from putowalk.lattice import evolve, initial_state
from putowalk.torus import TorusGrid
from putowalk.walks import builtin_walk, fourier_walk_2d

LATTICE_CASES = [
    ("lazy d=1, 4000 steps", builtin_walk("lazy", 1), 4000),
    ("std d=2, 200 steps", builtin_walk("std", 2), 200),
    ("fourier d=2, 200 steps", fourier_walk_2d(), 200),
    ("triangular6, 100 steps", builtin_walk("triangular6", 2), 100),
    ("lazy d=3, 30 steps", builtin_walk("lazy", 3), 30),
]

SCAN_CASES = [
    ("std d=2 scan, 128^2", builtin_walk("std", 2), TorusGrid(2, 128)),
    ("triangular6 scan, 128^2", builtin_walk("triangular6", 2), TorusGrid(2, 128)),
    ("lazy d=3 scan, 32^3", builtin_walk("lazy", 3), TorusGrid(3, 32)),
]


def use(backend):
    mod = _kernels.available_backends()[backend]
    _kernels.apply_stage = mod.apply_stage
    _kernels.extreme_singular_values = mod.extreme_singular_values


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    backends = sorted(_kernels.available_backends())
    print(f"default backend: {_kernels.BACKEND}; threads: {_kernels.num_threads()}")
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + f"{'py/cy':>10s}{'max diff':>11s}")

    def row(label, make):
        times, results = [], []
        for b in backends:
            use(b)
            t, out = best_of(make, args.repeat)
            times.append(t)
            results.append(out)
        diff = max(float(np.max(np.abs(r - results[0]))) for r in results)
        speed = times[backends.index("python")] / times[backends.index("cython")] if len(backends) > 1 else 1.0
        print(f"{label:28s}" + "".join(f"{t:12.4f}" for t in times) + f"{speed:10.1f}{diff:11.1e}")

    for label, walk, n in LATTICE_CASES:
        phi = np.eye(walk.coin_dim)[0]
        row(label, lambda walk=walk, n=n, phi=phi: evolve(
            walk, initial_state(walk.dimension, walk.coin_dim, phi), n).amplitudes)
    for label, walk, grid in SCAN_CASES:
        row(label, lambda walk=walk, grid=grid: symbol_sigma_min(walk, -1, grid.points()))
    rng = np.random.default_rng(0)
    for dim in (3, 4, 6):
        mats = rng.normal(size=(65536, dim, dim)) + 1j * rng.normal(size=(65536, dim, dim))
        row(f"svd only, 65536 x {dim}x{dim}", lambda mats=mats: np.stack(
            _kernels.extreme_singular_values(mats)))
    use(_kernels.BACKEND)


if __name__ == "__main__":
    main()
