"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import os
import sys
import timeit

import numpy as np

from qmink import _pykernels, kernels

try:
    from qmink import _ckernels
except ImportError:
    _ckernels = None


def _units(rng, n):
    g = rng.standard_normal((n, 4))
    return g / np.linalg.norm(g, axis=1)[:, None]


def cases(rng):
    a, b = _units(rng, 1_000_000), _units(rng, 1_000_000)
    c = a[0]
    return {
        "qmul 1e6": lambda impl: kernels.qmul(a, b, impl=impl),
        "inner_slack 1e6": lambda impl: kernels.inner_slack(a, c, 0.1, 1e-9, impl=impl),
        "scalar_grid_min 1024^2": lambda impl: kernels.scalar_grid_min(2.5, 2.0, 0.3, 1024, 1024, impl=impl),
        "euler_vectors 1e6": lambda impl: kernels.euler_vectors(a, impl=impl),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the numpy backend is available", file=sys.stderr)
    rng = np.random.default_rng(0)
    rows = []
    print(f"threads={kernels._threads()} (QMINK_THREADS={os.environ.get('QMINK_THREADS', 'unset')})")
    print(f"{'kernel':<24}{'cython ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        t_c = None
        if _ckernels is not None:
            t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        speed = f"{t_py / t_c:9.1f}x" if t_c else "      n/a"
        c_txt = f"{t_c:12.2f}" if t_c else f"{'n/a':>12}"
        print(f"{name:<24}{c_txt}{t_py:12.2f}{speed}")
        rows.append({"kernel": name, "cython_ms": t_c, "numpy_ms": t_py})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"threads": kernels._threads(), "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
