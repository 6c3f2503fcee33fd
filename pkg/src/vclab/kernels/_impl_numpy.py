"""Pure-numpy fallback kernels.

Mirror of _impl_numba: same names, signatures, and semantics. Sequential
pivot/sweep structure is kept as Python loops; row-level arithmetic is
vectorized. Results agree with the compiled backend to numerical
accuracy (pivot sequences can differ only on exact ties).
"""

import numpy as np


def jacobi_eigh(M, off_target):
    n = M.shape[0]
    A = M.copy()
    V = np.eye(n)
    theta = off_target / n if n > 0 else 0.0
    ok = 0
    for _sweep in range(60):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= theta:
                    continue
                rotated = True
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        if not rotated:
            ok = 1
            break
    w = np.diag(A).copy()
    order = np.argsort(w)
    ws = w[order]
    Vs = V[:, order].copy()
    for k in range(n):
        big = int(np.argmax(np.abs(Vs[:, k])))
        if Vs[big, k] < 0.0:
            Vs[:, k] = -Vs[:, k]
    return ws, Vs, ok


def cholesky_pd(M, rel_tol):
    n = M.shape[0]
    L = np.zeros((n, n))
    maxdiag = float(np.max(np.diag(M))) if n > 0 else 0.0
    if maxdiag <= 0.0:
        return 0, L
    tol = rel_tol * maxdiag
    for j in range(n):
        s = M[j, j] - np.dot(L[j, :j], L[j, :j])
        if s <= tol:
            return 0, L
        L[j, j] = np.sqrt(s)
        if j + 1 < n:
            L[j + 1:, j] = (M[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return 1, L


def lu_factor(M, pivot_rel):
    n = M.shape[0]
    LU = M.copy()
    piv = np.arange(n)
    scale = np.max(np.abs(LU), axis=1) if n > 0 else np.zeros(0)
    for k in range(n):
        r = k + int(np.argmax(np.abs(LU[k:, k])))
        best = abs(LU[r, k])
        if scale[r] == 0.0 or best <= pivot_rel * scale[r]:
            return LU, piv, 0
        if r != k:
            LU[[k, r]] = LU[[r, k]]
            piv[[k, r]] = piv[[r, k]]
            scale[[k, r]] = scale[[r, k]]
        f = LU[k + 1:, k] / LU[k, k]
        LU[k + 1:, k] = f
        LU[k + 1:, k + 1:] -= np.outer(f, LU[k, k + 1:])
    return LU, piv, 1


def lu_solve_factored(LU, piv, b):
    n = LU.shape[0]
    x = b[piv].astype(np.float64).copy()
    for i in range(n):
        x[i] -= np.dot(LU[i, :i], x[:i])
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - np.dot(LU[i, i + 1:], x[i + 1:])) / LU[i, i]
    return x


def simplex_core(T, basis, allowed, max_iter, cost_tol, pivot_tol):
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    iters = 0
    allowed_b = allowed != 0
    while iters < max_iter:
        improving = np.nonzero(allowed_b & (T[m, :ncol] > cost_tol))[0]
        if improving.size == 0:
            return 0, iters
        enter = int(improving[0])
        col = T[:m, enter]
        rows = np.nonzero(col > pivot_tol)[0]
        if rows.size == 0:
            return 1, iters
        nums = np.maximum(T[rows, ncol], 0.0)
        ratios = nums / col[rows]
        best = float(np.min(ratios))
        win = 1e-12 * (1.0 + best)
        cand = rows[ratios <= best + win]
        leave = int(cand[np.argmin(basis[cand])])
        T[leave, :] /= T[leave, enter]
        T[leave, enter] = 1.0
        f = T[:, enter].copy()
        f[leave] = 0.0
        T -= np.outer(f, T[leave, :])
        T[:, enter] = 0.0
        T[leave, enter] = 1.0
        basis[leave] = enter
        iters += 1
    return 2, iters


def tri_solve_sq(L, D):
    m = D.shape[0]
    n = L.shape[0]
    Y = np.empty((m, n))
    for i in range(n):
        s = D[:, i] - Y[:, :i] @ L[i, :i]
        Y[:, i] = s / L[i, i]
    return np.einsum('ij,ij->i', Y, Y)
