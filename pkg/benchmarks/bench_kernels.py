"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 4096,65536,262144]
"""
import argparse
import importlib
import timeit

import numpy as np

from semilab._kernels import _reference


def _cases(n, rng):
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    omega = rng.uniform(-50, 50, size=n)
    w = rng.uniform(size=n)
    m = min(n, 1024)  # the Wigner correlation is quadratic in n
    f = u[:m].copy()
    fh = np.roll(f, -1)
    return {
        "phase_rotate": (lambda k: k.phase_rotate(u, omega, 0.37), n),
        "weighted_mass": (lambda k: k.weighted_mass(u, w), n),
        "wigner_correlation": (lambda k: k.wigner_correlation(f, fh), m),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="4096,65536,262144")
    args = ap.parse_args(argv)
    try:
        compiled = importlib.import_module("semilab._kernels._ckernels")
    except ImportError:
        print("compiled kernels are not built; only the fallback is available")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'n':>8}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, (call, size) in _cases(n, rng).items():
            a, b = call(_reference), call(compiled)
            if not np.allclose(a, b, rtol=1e-12, atol=1e-12):
                raise SystemExit(f"{name}: backends disagree at n = {size}")
            tp = min(timeit.repeat(lambda: call(_reference), number=3, repeat=args.repeat)) / 3
            tc = min(timeit.repeat(lambda: call(compiled), number=3, repeat=args.repeat)) / 3
            print(f"{name:<20}{size:>8}{tp * 1e3:>14.3f}{tc * 1e3:>14.3f}{tp / tc:>10.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
