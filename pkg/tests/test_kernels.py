import os
import subprocess
import sys

import numpy as np
import pytest

from vclab import kernels
from vclab.kernels import _impl_numba, _impl_numpy

IMPLS = [_impl_numpy, _impl_numba]


def _random_sym(rng, n):
    G = rng.standard_normal((n, n))
    return (G + G.T) / 2.0


def test_warmup_reports_backend():
    assert kernels.warmup() in ("numba", "numpy")


def test_jacobi_parity_and_correctness():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 8):
        for _ in range(5):
            M = _random_sym(rng, n)
            results = [impl.jacobi_eigh(M.copy(), 1e-12) for impl in IMPLS]
            for w, V, ok in results:
                assert ok == 1
                assert np.all(np.diff(w) >= 0.0)
                assert np.max(np.abs(M @ V - V @ np.diag(w))) < 1e-9
                assert np.max(np.abs(V.T @ V - np.eye(n))) < 1e-10
            (w0, V0, _), (w1, V1, _) = results
            assert np.max(np.abs(w0 - w1)) < 1e-10
            assert np.max(np.abs(V0 - V1)) < 1e-8


def test_cholesky_parity():
    rng = np.random.default_rng(1)
    for n in (2, 4, 7):
        G = rng.standard_normal((n, n))
        M = G @ G.T + n * np.eye(n)
        outs = [impl.cholesky_pd(M, 1e-12) for impl in IMPLS]
        for ok, L in outs:
            assert ok == 1
            assert np.max(np.abs(L @ L.T - M)) < 1e-10 * n
        assert np.max(np.abs(outs[0][1] - outs[1][1])) < 1e-11
    indef = np.array([[1.0, 2.0], [2.0, 1.0]])
    for impl in IMPLS:
        ok, _ = impl.cholesky_pd(indef, 1e-12)
        assert ok == 0


def test_lu_parity():
    rng = np.random.default_rng(2)
    for n in (2, 5, 9):
        M = rng.standard_normal((n, n)) + n * np.eye(n)
        b = rng.standard_normal(n)
        outs = [impl.lu_factor(M.copy(), 1e-10) for impl in IMPLS]
        for LU, piv, ok in outs:
            assert ok == 1
        assert np.array_equal(outs[0][1], outs[1][1])       # same pivot order
        assert np.max(np.abs(outs[0][0] - outs[1][0])) < 1e-12
        xs = [impl.lu_solve_factored(LU, piv, b)
              for impl, (LU, piv, _) in zip(IMPLS, outs)]
        want = np.linalg.solve(M, b)
        for x in xs:
            assert np.max(np.abs(x - want)) < 1e-9
        assert np.max(np.abs(xs[0] - xs[1])) < 1e-12


def test_lu_singular_flagged():
    M = np.array([[1.0, 2.0], [2.0, 4.0]])
    for impl in IMPLS:
        _, _, ok = impl.lu_factor(M.copy(), 1e-10)
        assert ok == 0


def test_tri_solve_parity():
    rng = np.random.default_rng(3)
    for n in (2, 4, 6):
        G = rng.standard_normal((n, n))
        M = G @ G.T + n * np.eye(n)
        L = np.linalg.cholesky(M)
        D = rng.standard_normal((7, n))
        want = np.sum(np.linalg.solve(L, D.T) ** 2, axis=0)
        outs = [impl.tri_solve_sq(L, D) for impl in IMPLS]
        for got in outs:
            assert np.max(np.abs(got - want)) < 1e-9
        assert np.max(np.abs(outs[0] - outs[1])) < 1e-12


def test_simplex_core_parity_on_tableau():
    # max x1 + x2 st x1 + x2 <= 1, x1 <= 0.7, slacks in basis
    def fresh():
        T = np.array([[1.0, 1.0, 1.0, 0.0, 1.0],
                      [1.0, 0.0, 0.0, 1.0, 0.7],
                      [1.0, 1.0, 0.0, 0.0, 0.0]])
        basis = np.array([2, 3], dtype=np.int64)
        allowed = np.ones(4, dtype=np.uint8)
        return T, basis, allowed
    traces = []
    for impl in IMPLS:
        T, basis, allowed = fresh()
        status, iters = impl.simplex_core(T, basis, allowed, 50, 1e-9, 1e-10)
        traces.append((status, iters, basis.copy(), T.copy()))
    (s0, i0, b0, T0), (s1, i1, b1, T1) = traces
    assert s0 == s1 == 0
    assert i0 == i1
    assert np.array_equal(b0, b1)
    assert np.max(np.abs(T0 - T1)) < 1e-12


def test_lp_values_agree_across_backends(monkeypatch):
    from vclab.numerics import LE, GE, LinearProgram, lp_solve

    rng = np.random.default_rng(4)
    for _ in range(20):
        n = 3
        rows = rng.standard_normal((4, n))
        rhs = rng.standard_normal(4) + 2.0
        obj = rng.standard_normal(n)
        values = []
        for impl in IMPLS:
            monkeypatch.setattr(kernels, "simplex_core", impl.simplex_core)
            res = lp_solve(LinearProgram(objective=obj, rows=rows,
                                         rels=[LE] * 4, rhs=rhs,
                                         lower=-np.ones(n), upper=np.ones(n)))
            assert res.status == "optimal"      # box keeps it bounded
            values.append(res.value)
        monkeypatch.undo()
        assert abs(values[0] - values[1]) < 1e-9


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backend_env_selection(backend):
    code = ("import vclab.kernels as k; import sys; "
            "sys.exit(0 if k.BACKEND == %r else 1)" % backend)
    env = dict(os.environ, VCLAB_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_backend_env_rejects_unknown():
    code = "import vclab.kernels"
    env = dict(os.environ, VCLAB_BACKEND="fortran")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode != 0
    assert "VCLAB_BACKEND" in proc.stderr


def test_full_oracle_matches_under_numpy_backend():
    # one end-to-end decision recomputed in a numpy-only subprocess
    code = (
        "import numpy as np\n"
        "from vclab.realizability import LabeledPointSet, realizable_by_ellipsoid\n"
        "res = realizable_by_ellipsoid(LabeledPointSet(np.array([[0.],[1.],[2.]]), 0b010))\n"
        "assert abs(res.t_star - 1.0) < 1e-9, res.t_star\n")
    env = dict(os.environ, VCLAB_BACKEND="numpy")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
