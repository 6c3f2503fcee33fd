#!/usr/bin/env python3
"""Side-by-side timing of the two kernel backends.

Runs each hot kernel on inputs shaped like the ones the certification
pipeline actually produces (lifted quadratic parts are 2x2 .. 9x9, the
margin LPs carry a few dozen rows, Gaussian batches a few hundred points),
then times a full ellipsoid-oracle batch with the package temporarily
rebound to each backend. Best-of-N wall times, so transient noise is
mostly filtered out.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from vclab import kernels
from vclab.kernels import _impl_numpy

try:
    from vclab.kernels import _impl_numba
except Exception:  # pragma: no cover - numba genuinely absent
    _impl_numba = None

KERNEL_NAMES = ("jacobi_eigh", "cholesky_pd", "lu_factor",
                "lu_solve_factored", "simplex_core", "tri_solve_sq")


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def sym(rng, n):
    G = rng.standard_normal((n, n))
    return (G + G.T) / 2.0


def pd(rng, n):
    G = rng.standard_normal((n, n))
    return G @ G.T + n * np.eye(n)


def case_jacobi(impl, n, reps):
    rng = np.random.default_rng(11)
    M = sym(rng, n)
    target = 1e-12 * float(np.max(np.abs(M)))

    def run():
        for _ in range(reps):
            impl.jacobi_eigh(M.copy(), target)
    return run


def case_cholesky(impl, n, reps):
    rng = np.random.default_rng(12)
    M = pd(rng, n)

    def run():
        for _ in range(reps):
            impl.cholesky_pd(M.copy(), 1e-12)
    return run


def case_lu(impl, n, reps):
    rng = np.random.default_rng(13)
    M = pd(rng, n)
    b = rng.standard_normal(n)

    def run():
        for _ in range(reps):
            LU, piv, ok = impl.lu_factor(M.copy(), 1e-12)
            if ok:
                impl.lu_solve_factored(LU, piv, b)
    return run


def case_tri_solve(impl, n, m, reps):
    rng = np.random.default_rng(14)
    L = np.linalg.cholesky(pd(rng, n))
    D = rng.standard_normal((m, n))

    def run():
        for _ in range(reps):
            impl.tri_solve_sq(L, D)
    return run


def case_simplex(impl, reps):
    # one max-margin separation LP in the oracle's variable layout
    # (lifted coefficients, offset, margin), solved through lp_solve with
    # the package rebound to the backend under test
    from vclab.lifting import lift_points
    from vclab.numerics import GE, LE, LinearProgram, lp_solve

    rng = np.random.default_rng(15)
    Phi = lift_points(rng.standard_normal((8, 2)))
    m, B = Phi.shape
    labels = 0b10110101
    rows = np.zeros((m, B + 2))
    rows[:, :B] = Phi
    rows[:, B] = 1.0
    rels = np.empty(m, dtype=np.int64)
    for r in range(m):
        if (labels >> r) & 1:
            rows[r, B + 1] = 1.0
            rels[r] = LE
        else:
            rels[r] = GE
    obj = np.zeros(B + 2)
    obj[B + 1] = 1.0
    lo = np.full(B + 2, -1.0)
    up = np.full(B + 2, 1.0)
    lo[B + 1], up[B + 1] = -np.inf, np.inf
    lp = LinearProgram(objective=obj, rows=rows, rels=rels,
                       rhs=np.zeros(m), lower=lo, upper=up)

    def run():
        with rebound(impl):
            for _ in range(reps):
                lp_solve(lp)
    return run


def case_oracle(impl, reps):
    from vclab.realizability import LabeledPointSet, realizable_by_ellipsoid

    rng = np.random.default_rng(16)
    batch = [(rng.standard_normal((6, 2)), int(rng.integers(1, 63)))
             for _ in range(reps)]

    def run():
        with rebound(impl):
            for pts, labels in batch:
                realizable_by_ellipsoid(LabeledPointSet(pts, labels))
    return run


class rebound:
    """Temporarily point the kernels package at one implementation."""

    def __init__(self, impl):
        self.impl = impl
        self.saved = {}

    def __enter__(self):
        for name in KERNEL_NAMES:
            self.saved[name] = getattr(kernels, name)
            setattr(kernels, name, getattr(self.impl, name))

    def __exit__(self, *exc):
        for name, fn in self.saved.items():
            setattr(kernels, name, fn)
        return False


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="best-of repetitions per case (default 5)")
    args = ap.parse_args()

    impls = [("numpy", _impl_numpy)]
    if _impl_numba is not None:
        impls.insert(0, ("numba", _impl_numba))
    else:
        print("numba backend unavailable; timing numpy only")

    # compile / cache-load every jitted kernel before any clock starts
    for _, impl in impls:
        with rebound(impl):
            kernels.warmup()

    cases = [
        ("jacobi_eigh", "9x9 x200", lambda im: case_jacobi(im, 9, 200)),
        ("jacobi_eigh", "21x21 x50", lambda im: case_jacobi(im, 21, 50)),
        ("cholesky_pd", "9x9 x2000", lambda im: case_cholesky(im, 9, 2000)),
        ("lu solve", "40x40 x200", lambda im: case_lu(im, 40, 200)),
        ("tri_solve_sq", "9x9,512 x200", lambda im: case_tri_solve(im, 9, 512, 200)),
        ("margin lp", "8pts d=2 x50", lambda im: case_simplex(im, 50)),
        ("oracle batch", "40 instances", lambda im: case_oracle(im, 40)),
    ]

    width = 14
    header = "%-14s %-14s" % ("case", "size")
    for name, _ in impls:
        header += " %*s" % (width, name)
    if len(impls) == 2:
        header += " %*s" % (width, "numpy/numba")
    print(header)
    print("-" * len(header))

    for label, size, make in cases:
        times = []
        for _, impl in impls:
            times.append(best_of(make(impl), args.repeat))
        row = "%-14s %-14s" % (label, size)
        for t in times:
            row += " %*s" % (width, "%.3f ms" % (1e3 * t))
        if len(times) == 2:
            row += " %*s" % (width, "%.2fx" % (times[1] / times[0]))
        print(row)


if __name__ == "__main__":
    main()
