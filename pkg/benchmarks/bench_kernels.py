"""Time the compiled kernels against the numpy fallback.

Run from the repository root after an editable install::

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch is not
needed.  Results are checked for agreement before timing.
"""
import argparse
import timeit

import numpy as np

from lpcompact import _pykernels

try:
    from lpcompact import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    vals = rng.standard_normal((300, 64, 2))
    w = rng.uniform(0.1, 1.0, 64)
    pts = rng.standard_normal((20_000, 3))
    centers = rng.standard_normal((200, 3))
    D = _pykernels.pairwise_lp(vals, w, 2.0, 2.0)
    return {
        "pairwise_lp (300 x 64 x 2, p=2, q=2)": ("pairwise_lp", (vals, w, 2.0, 2.0)),
        "pairwise_lp (300 x 64 x 2, p=3, q=1)": ("pairwise_lp", (vals, w, 3.0, 1.0)),
        "first_min_assign (20000 pts, 200 centers)": ("first_min_assign", (pts, centers, 2.0)),
        "farthest_first (300 x 300)": ("farthest_first", (D,)),
        "farthest_first_points (20000 pts, eps 0.3)": ("farthest_first_points", (pts, 2.0, 0.3)),
        "lp_rows (5000 x 64, p=2.5)": ("lp_rows", (np.abs(rng.standard_normal((5000, 64))), w, 2.5)),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':45s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, (name, a) in cases(rng).items():
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*a), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{label:45s} {t_py:10.2f} {'n/a':>10s} {'':>8s}")
            continue
        cy = getattr(_ckernels, name)
        if not _same(py(*a), cy(*a)):
            raise SystemExit(f"backends disagree on {label}")
        t_cy = min(timeit.repeat(lambda: cy(*a), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:45s} {t_py:10.2f} {t_cy:10.2f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
