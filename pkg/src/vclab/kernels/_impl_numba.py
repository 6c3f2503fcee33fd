"""Numba-compiled hot kernels.

Keep in sync with _impl_numpy: same function names, same signatures,
same semantics. Everything works on plain float64 / int64 arrays so the
two backends are drop-in interchangeable.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def jacobi_eigh(M, off_target):
    """Cyclic Jacobi sweeps until the off-diagonal mass is below off_target.

    Returns (eigenvalues ascending, eigenvector columns, ok flag).
    Eigenvector signs are canonical: largest-magnitude entry positive.
    """
    n = M.shape[0]
    A = M.copy()
    V = np.eye(n)
    # a sweep with every |a_pq| <= theta leaves off-mass <= n*theta
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
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
        if not rotated:
            ok = 1
            break
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i]
    order = np.argsort(w)
    ws = np.empty(n)
    Vs = np.empty((n, n))
    for k in range(n):
        j = order[k]
        ws[k] = w[j]
        big = 0
        bv = -1.0
        for i in range(n):
            av = abs(V[i, j])
            if av > bv:
                bv = av
                big = i
        sgn = 1.0 if V[big, j] >= 0.0 else -1.0
        for i in range(n):
            Vs[i, k] = sgn * V[i, j]
    return ws, Vs, ok


@njit(cache=True, nogil=True)
def cholesky_pd(M, rel_tol):
    """Cholesky with a pivot floor of rel_tol times the largest diagonal.

    Returns (ok flag, lower factor). ok = 0 means not positive definite.
    """
    n = M.shape[0]
    L = np.zeros((n, n))
    maxdiag = 0.0
    for i in range(n):
        if M[i, i] > maxdiag:
            maxdiag = M[i, i]
    if maxdiag <= 0.0:
        return 0, L
    tol = rel_tol * maxdiag
    for j in range(n):
        s = M[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if s <= tol:
            return 0, L
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            t = M[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / L[j, j]
    return 1, L


@njit(cache=True, nogil=True)
def lu_factor(M, pivot_rel):
    """Partial-pivoting LU. Singular when a pivot drops below
    pivot_rel times the (original, permuted) scale of its row."""
    n = M.shape[0]
    LU = M.copy()
    piv = np.arange(n)
    scale = np.zeros(n)
    for i in range(n):
        m = 0.0
        for j in range(n):
            a = abs(LU[i, j])
            if a > m:
                m = a
        scale[i] = m
    for k in range(n):
        r = k
        best = abs(LU[k, k])
        for i in range(k + 1, n):
            a = abs(LU[i, k])
            if a > best:
                best = a
                r = i
        if scale[r] == 0.0 or best <= pivot_rel * scale[r]:
            return LU, piv, 0
        if r != k:
            for j in range(n):
                tmp = LU[k, j]
                LU[k, j] = LU[r, j]
                LU[r, j] = tmp
            tp = piv[k]
            piv[k] = piv[r]
            piv[r] = tp
            ts = scale[k]
            scale[k] = scale[r]
            scale[r] = ts
        pv = LU[k, k]
        for i in range(k + 1, n):
            f = LU[i, k] / pv
            LU[i, k] = f
            for j in range(k + 1, n):
                LU[i, j] -= f * LU[k, j]
    return LU, piv, 1


@njit(cache=True, nogil=True)
def lu_solve_factored(LU, piv, b):
    n = LU.shape[0]
    x = np.empty(n)
    for i in range(n):
        x[i] = b[piv[i]]
    for i in range(n):
        s = x[i]
        for j in range(i):
            s -= LU[i, j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s -= LU[i, j] * x[j]
        x[i] = s / LU[i, i]
    return x


@njit(cache=True, nogil=True)
def simplex_core(T, basis, allowed, max_iter, cost_tol, pivot_tol):
    """Tableau simplex with Bland's rule, maximizing, in place.

    T has m constraint rows plus a reduced-cost row at the bottom; the
    last column is the right-hand side. basis[i] is the variable index
    basic in row i; allowed masks columns eligible to enter.

    Entering: lowest-index column with reduced cost above cost_tol.
    Leaving: minimum ratio; ties broken by lowest basis index. Returns
    (status, pivots) with status 0 optimal, 1 unbounded, 2 pivot cap.
    """
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    iters = 0
    while iters < max_iter:
        enter = -1
        for j in range(ncol):
            if allowed[j] != 0 and T[m, j] > cost_tol:
                enter = j
                break
        if enter < 0:
            return 0, iters
        best = -1.0
        found = False
        for i in range(m):
            aij = T[i, enter]
            if aij > pivot_tol:
                num = T[i, ncol]
                if num < 0.0:
                    num = 0.0
                r = num / aij
                if not found or r < best:
                    best = r
                    found = True
        if not found:
            return 1, iters
        win = 1e-12 * (1.0 + best)
        leave = -1
        for i in range(m):
            aij = T[i, enter]
            if aij > pivot_tol:
                num = T[i, ncol]
                if num < 0.0:
                    num = 0.0
                r = num / aij
                if r <= best + win:
                    if leave < 0 or basis[i] < basis[leave]:
                        leave = i
        pv = T[leave, enter]
        for j in range(ncol + 1):
            T[leave, j] /= pv
        T[leave, enter] = 1.0
        for i in range(m + 1):
            if i == leave:
                continue
            f = T[i, enter]
            if f != 0.0:
                for j in range(ncol + 1):
                    T[i, j] -= f * T[leave, j]
                T[i, enter] = 0.0
        basis[leave] = enter
        iters += 1
    return 2, iters


@njit(cache=True, nogil=True)
def tri_solve_sq(L, D):
    """Squared Mahalanobis norms: for each row d of D, ||L^{-1} d||^2."""
    m = D.shape[0]
    n = L.shape[0]
    out = np.empty(m)
    y = np.empty(n)
    for r in range(m):
        for i in range(n):
            s = D[r, i]
            for j in range(i):
                s -= L[i, j] * y[j]
            y[i] = s / L[i, i]
        acc = 0.0
        for i in range(n):
            acc += y[i] * y[i]
        out[r] = acc
    return out
