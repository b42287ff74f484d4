"""Time the hot kernels under the numba and numpy backends.

Usage::

    python benchmarks/bench_backends.py [--n 400] [--dim 1000] [--repeat 5]

Each kernel is called once per backend before timing so numba compilation is
excluded; the best of ``--repeat`` runs is reported.
"""
import argparse
import timeit

import numpy as np

from cdmaps import _backend, _hot, use_backend


def cases(n, dim, rng):
    X = rng.standard_normal((n, dim))
    D2 = _hot.sq_distances(X)
    D2 /= np.median(D2)
    pts = rng.standard_normal((20 * n, 8))
    C = rng.standard_normal((8, 8))
    m = min(n, 120)
    K = _hot.complex_kernel(D2[:m, :m], 1.0, 0.5, -0.8)
    f = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return {
        f"sq_distances       ({n}x{dim})": lambda: _hot.sq_distances(X),
        f"complex_kernel     ({n}x{n})": lambda: _hot.complex_kernel(D2, 1.0, 0.5, -0.8),
        f"kmeans assign      ({20 * n}x8, k=8)": lambda: _hot.assign(pts, C),
        f"phase_energy       ({m}x{m})": lambda: _hot.phase_energy(K, f),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--dim", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _backend.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    table = {}
    for name in ("numba", "numpy"):
        with use_backend(name):
            for label, fn in cases(args.n, args.dim, np.random.default_rng(0)).items():
                fn()  # warm-up / JIT
                best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
                table.setdefault(label, {})[name] = best
    print(f"{'kernel':40s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>9s}")
    for label, t in table.items():
        print(f"{label:40s} {1e3 * t['numba']:12.2f} {1e3 * t['numpy']:12.2f} "
              f"{t['numpy'] / t['numba']:8.1f}x")


if __name__ == "__main__":
    main()
