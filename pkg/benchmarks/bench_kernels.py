"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from ncspectra import _pykernels, gasket, torus, uhf

try:
    from ncspectra import _kernels
except ImportError:
    _kernels = None


def tensor_case(S, n_grid: int = 64):
    v2 = np.sort(S.values)
    cw2 = np.concatenate([[0.0], np.cumsum(S.weights[np.argsort(S.values)])])
    grid = np.geomspace(4 * S.min_positive, S.max_value, n_grid)
    return (S.values, S.weights, v2, cw2, grid)


def edge_case(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    return (f[0].copy(), f[1].copy(), rng.uniform(0.1, 1.0, size=n))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    cases = {
        "tensor_counts torus p=2 K=64": ("tensor_counts", tensor_case(torus.torus_spectrum(2, 64))),
        "tensor_counts uhf r=2 N=12": ("tensor_counts", tensor_case(uhf.ci_spectrum(2, 1.5, 12))),
        "tensor_counts gasket N=6": ("tensor_counts", tensor_case(gasket.gasket_spectrum(2, 6))),
        "edge_quotient_max 10^6 edges": ("edge_quotient_max", edge_case(10**6)),
    }
    print(f"{'case':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, (fn, a) in cases.items():
        py = min(timeit.repeat(lambda: getattr(_pykernels, fn)(*a), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:34s} {py * 1e3:12.2f} {'n/a':>12s} {'':>8s}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_kernels, fn)(*a), number=1, repeat=args.repeat))
        ref, got = getattr(_pykernels, fn)(*a), getattr(_kernels, fn)(*a)
        assert np.allclose(ref, got, rtol=1e-12, atol=0), name
        print(f"{name:34s} {py * 1e3:12.2f} {cy * 1e3:12.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
