"""Dense numerical core: PD test, symmetric eigensolver, linear solve,
and a small deterministic simplex LP solver.

Matrix orders here stay tiny (at most a few dozen), so the algorithms
are chosen for determinism and simplicity: Jacobi rotations for the
eigenproblem, partial-pivoting elimination for solves, and a two-phase
tableau simplex with Bland's rule. Hot loops live in vclab.kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import Tolerances, DEFAULT
from .errors import (
    DimensionMismatchError,
    LpIterationLimitError,
    LpNumericalError,
    SingularMatrixError,
)

LE, EQ, GE = -1, 0, 1


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatchError("expected a 1-d vector, got shape %s" % (v.shape,))
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_sym_matrix(M, tol: float = 0.0) -> np.ndarray:
    """Validate symmetry (within tol) and return an exactly symmetric
    copy built from the upper triangle."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError("expected a square matrix, got shape %s" % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    if A.size and np.max(np.abs(A - A.T)) > tol:
        raise ValueError("matrix is not symmetric within tolerance %g" % tol)
    U = np.triu(A)
    return U + np.triu(A, 1).T


def cholesky_pd_check(M, tol: Tolerances = DEFAULT):
    """True plus the lower Cholesky factor when every pivot exceeds
    pd_rel times the largest diagonal entry; (False, None) otherwise."""
    A = as_sym_matrix(M)
    ok, L = kernels.cholesky_pd(A, tol.pd_rel)
    return (True, L) if ok else (False, None)


def sym_eigen(M, tol: Tolerances = DEFAULT):
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    A = as_sym_matrix(M)
    norm = float(np.sqrt(np.sum(A * A)))
    w, V, ok = kernels.jacobi_eigh(A, tol.eig_offdiag_rel * norm)
    if not ok:
        raise ValueError("Jacobi sweep limit reached without convergence")
    return w, V


def solve_linear(M, v, tol: Tolerances = DEFAULT) -> np.ndarray:
    A = np.ascontiguousarray(np.asarray(M, dtype=np.float64))
    b = as_vector(v)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError("matrix must be square")
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatchError("matrix and vector sizes disagree")
    LU, piv, ok = kernels.lu_factor(A, tol.solve_pivot_rel)
    if not ok:
        raise SingularMatrixError("pivot below %g times row scale" % tol.solve_pivot_rel)
    return kernels.lu_solve_factored(LU, piv, b)


def invert(M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Explicit inverse via one factorization; used where the inverse
    itself is part of a certificate (norm bounds), not for solving."""
    A = np.ascontiguousarray(np.asarray(M, dtype=np.float64))
    n = A.shape[0]
    LU, piv, ok = kernels.lu_factor(A, tol.solve_pivot_rel)
    if not ok:
        raise SingularMatrixError("matrix numerically singular")
    out = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        out[:, j] = kernels.lu_solve_factored(LU, piv, e)
    return out


@dataclass
class LinearProgram:
    """max c.x subject to rows, relations (LE/EQ/GE) and bounds.

    lower/upper default to unbounded; use np.inf sentinels.
    """
    objective: np.ndarray
    rows: np.ndarray
    rels: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    max_pivots: int = field(default=DEFAULT.max_lp_pivots)

    def __post_init__(self):
        self.objective = as_vector(self.objective)
        n = self.objective.shape[0]
        self.rows = np.asarray(self.rows, dtype=np.float64).reshape(-1, n)
        self.rels = np.asarray(self.rels, dtype=np.int64).reshape(-1)
        self.rhs = np.asarray(self.rhs, dtype=np.float64).reshape(-1)
        m = self.rows.shape[0]
        if self.rels.shape[0] != m or self.rhs.shape[0] != m:
            raise DimensionMismatchError("constraint arrays disagree in length")
        if not np.all(np.isfinite(self.rows)) or not np.all(np.isfinite(self.rhs)):
            raise ValueError("LP coefficients must be finite")
        self.lower = (np.full(n, -np.inf) if self.lower is None
                      else np.asarray(self.lower, dtype=np.float64).reshape(n).copy())
        self.upper = (np.full(n, np.inf) if self.upper is None
                      else np.asarray(self.upper, dtype=np.float64).reshape(n).copy())
        if np.any(self.lower > self.upper):
            raise ValueError("crossed variable bounds")


@dataclass
class LpResult:
    status: str                      # optimal | infeasible | unbounded
    x: np.ndarray | None = None
    value: float | None = None
    pivots: int = 0


def _reduced_costs(T, basis, c_std):
    # cbar = c - c_B . (B^{-1} A), with T rows holding B^{-1}[A | b]
    obj = np.zeros(T.shape[1])
    obj[:c_std.shape[0]] = c_std
    for i in range(T.shape[0] - 1):
        cb = c_std[basis[i]] if basis[i] < c_std.shape[0] else 0.0
        if cb != 0.0:
            obj -= cb * T[i, :]
    return obj


def lp_solve(lp: LinearProgram, tol: Tolerances = DEFAULT) -> LpResult:
    """Two-phase tableau simplex, maximizing, Bland's rule throughout.

    Free variables are split, shifted variables absorb finite bounds,
    and finite upper bounds become extra rows. Optimal solutions are
    re-checked against the original constraints before being returned.
    """
    c = lp.objective
    n = c.shape[0]
    lo, up = lp.lower, lp.upper
    if np.any(lo > up):
        return LpResult("infeasible")

    # variable mapping: original j -> std columns with signs, plus shift
    col_var, col_sign = [], []
    var_shift = np.zeros(n)
    bound_rows = []          # (std column, cap) for doubly bounded vars
    for j in range(n):
        l, u = lo[j], up[j]
        if np.isfinite(l):
            var_shift[j] = l
            col_var.append(j)
            col_sign.append(1.0)
            if np.isfinite(u):
                bound_rows.append((len(col_var) - 1, u - l))
        elif np.isfinite(u):
            var_shift[j] = u
            col_var.append(j)
            col_sign.append(-1.0)
        else:
            col_var.append(j)
            col_sign.append(1.0)
            col_var.append(j)
            col_sign.append(-1.0)
    n_main = len(col_var)
    col_var = np.asarray(col_var, dtype=np.int64)
    col_sign = np.asarray(col_sign, dtype=np.float64)

    m0 = lp.rows.shape[0]
    m = m0 + len(bound_rows)
    A_std = np.zeros((m, n_main))
    b_std = np.zeros(m)
    rel_std = np.zeros(m, dtype=np.int64)
    if m0:
        A_std[:m0, :] = lp.rows[:, col_var] * col_sign[None, :]
        b_std[:m0] = lp.rhs - lp.rows @ var_shift
        rel_std[:m0] = lp.rels
    for k, (colidx, cap) in enumerate(bound_rows):
        A_std[m0 + k, colidx] = 1.0
        b_std[m0 + k] = cap
        rel_std[m0 + k] = LE

    # orient rows to nonnegative rhs
    neg = b_std < 0.0
    A_std[neg, :] *= -1.0
    b_std[neg] *= -1.0
    rel_std[neg] *= -1

    # slack/surplus columns; artificials where no slack can start basic
    n_slack = int(np.sum(rel_std != EQ))
    art_rows = [i for i in range(m) if rel_std[i] != LE]
    n_art = len(art_rows)
    n_total = n_main + n_slack + n_art
    T = np.zeros((m + 1, n_total + 1))
    T[:m, :n_main] = A_std
    T[:m, n_total] = b_std
    basis = np.empty(m, dtype=np.int64)
    si = n_main
    ai = n_main + n_slack
    for i in range(m):
        if rel_std[i] == LE:
            T[i, si] = 1.0
            basis[i] = si
            si += 1
        elif rel_std[i] == GE:
            T[i, si] = -1.0
            si += 1
    for i in art_rows:
        T[i, ai] = 1.0
        basis[i] = ai
        ai += 1

    A_full = T[:m, :n_total].copy()     # pristine equations for refactorization
    b_full = b_std.copy()

    allowed = np.ones(n_total, dtype=np.uint8)
    pivots_left = lp.max_pivots
    total_pivots = 0
    c_std = np.zeros(n_total)
    c_std[:n_main] = c[col_var] * col_sign

    if n_art:
        c_p1 = np.zeros(n_total)
        c_p1[n_main + n_slack:] = -1.0
        T[m, :] = _reduced_costs(T, basis, c_p1)
        status, used = kernels.simplex_core(T, basis, allowed, pivots_left,
                                            tol.lp_tol, tol.lp_pivot_tol)
        total_pivots += used
        pivots_left -= used
        if status == 2:
            raise LpIterationLimitError("phase 1 exceeded %d pivots" % lp.max_pivots)
        infeas = sum(T[i, n_total] for i in range(m) if basis[i] >= n_main + n_slack)
        feas_tol = tol.lp_tol * max(1.0, float(np.max(np.abs(b_std))) if m else 1.0)
        if status == 1:
            # the artificial objective is bounded below by zero, so an
            # unbounded verdict is roundoff in the cost row; accept it only
            # once the artificials have already been driven to (near) zero
            if infeas > feas_tol:
                raise LpNumericalError("phase 1 stalled at infeasibility %g" % infeas)
        elif infeas > feas_tol:
            return LpResult("infeasible", pivots=total_pivots)
        # drive leftover artificials out of the basis, drop redundant rows
        allowed[n_main + n_slack:] = 0
        drop = []
        for i in range(m):
            if basis[i] < n_main + n_slack:
                continue
            target = -1
            for j in range(n_main + n_slack):
                if allowed[j] and abs(T[i, j]) > tol.lp_pivot_tol:
                    target = j
                    break
            if target < 0:
                drop.append(i)
                continue
            T[i, :] /= T[i, target]
            for r in range(T.shape[0]):
                if r != i and T[r, target] != 0.0:
                    T[r, :] -= T[r, target] * T[i, :]
                    T[r, target] = 0.0
            T[i, target] = 1.0
            basis[i] = target
        if drop:
            keep = [i for i in range(m) if i not in set(drop)]
            T = np.ascontiguousarray(T[keep + [m], :])
            basis = basis[keep]
            A_full = A_full[keep]
            b_full = b_full[keep]
            m = len(keep)

    T[m, :] = _reduced_costs(T, basis, c_std)
    status, used = kernels.simplex_core(T, basis, allowed, pivots_left,
                                        tol.lp_tol, tol.lp_pivot_tol)
    total_pivots += used
    if status == 2:
        raise LpIterationLimitError("phase 2 exceeded %d pivots" % lp.max_pivots)
    if status == 1:
        return LpResult("unbounded", pivots=total_pivots)

    x_std = np.zeros(n_total)
    xb = np.maximum(T[:m, n_total], 0.0)
    if m:
        # refactorize: solve the pristine equations for the final basis so
        # tableau drift accumulated over many pivots does not leak into the
        # reported vertex.  Keep the refactored values only when they stay
        # (near) nonnegative and do not worsen the equation residual; a
        # near-singular basis can otherwise hand back a spurious vertex.
        A_B = np.ascontiguousarray(A_full[:, basis])
        LU, piv, ok = kernels.lu_factor(A_B.copy(), tol.solve_pivot_rel)
        if ok:
            xr = kernels.lu_solve_factored(LU, piv, b_full)
            scale = max(1.0, float(np.max(np.abs(xr))))
            if float(np.min(xr)) >= -tol.lp_tol * scale:
                r_tab = float(np.max(np.abs(A_B @ xb - b_full)))
                r_ref = float(np.max(np.abs(A_B @ xr - b_full)))
                if r_ref <= r_tab:
                    xb = xr
    x_std[basis] = xb
    x = var_shift.copy()
    for colidx in range(n_main):
        x[col_var[colidx]] += col_sign[colidx] * x_std[colidx]
    value = float(c @ x)

    # primal feasibility recheck in original coordinates; the tolerance
    # follows the backward-error scale sum_j |A_ij x_j| + |b_i| so a
    # large-but-legitimate vertex is not rejected for eps-level residue
    if m0:
        resid = lp.rows @ x - lp.rhs
        scale = np.abs(lp.rows) @ np.abs(x) + np.abs(lp.rhs)
        for i in range(m0):
            r = resid[i]
            slack_tol = tol.lp_tol * max(1.0, float(scale[i]))
            bad = ((lp.rels[i] == LE and r > slack_tol)
                   or (lp.rels[i] == GE and r < -slack_tol)
                   or (lp.rels[i] == EQ and abs(r) > slack_tol))
            if bad:
                raise LpNumericalError("constraint %d violated by %g" % (i, r))
    bound_tol = tol.lp_tol * np.maximum(1.0, np.abs(x))
    if np.any(x < lo - bound_tol) or np.any(x > up + bound_tol):
        raise LpNumericalError("variable bound violated")
    return LpResult("optimal", x=x, value=value, pivots=total_pivots)
