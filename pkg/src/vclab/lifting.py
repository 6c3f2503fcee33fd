"""The quadratic lifting map and the three faces of a quadric.

A point x in R^d lifts to
    phi(x) = (x_1^2 .. x_d^2,  x_1x_2, x_1x_3, .., x_{d-1}x_d,  x_1 .. x_d)
in R^B with B = (d^2+3d)/2; cross terms run over pairs (i,j), i<j, in
lexicographic order, and d=1 has no cross segment at all. A coefficient
vector a in R^B plus a constant c then describes the quadric
    x -> <a, phi(x)> + c,
whose sublevel set {quadric < 0} is an open ellipsoid exactly when the
quadratic-part matrix is positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, DEFAULT
from .errors import DimensionMismatchError, NotPositiveDefiniteError
from .numerics import as_vector, as_sym_matrix, cholesky_pd_check, solve_linear


def lift_dimension(d: int) -> int:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return (d * d + 3 * d) // 2


def cross_pairs(d: int):
    """Index pairs (i, j), i < j, in the frozen lexicographic order."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


@dataclass(frozen=True)
class LiftedIndex:
    """Slot bookkeeping for the lifted coordinate order.

    Layout: [0, d) squares, [d, B-d) cross terms, [B-d, B) linear.
    """
    dim: int

    @property
    def lifted_dim(self) -> int:
        return lift_dimension(self.dim)

    def square_slot(self, i: int) -> int:
        return i

    def cross_slot(self, i: int, j: int) -> int:
        if not 0 <= i < j < self.dim:
            raise IndexError("cross slot needs 0 <= i < j < d")
        d = self.dim
        return d + i * d - i * (i + 1) // 2 + (j - i - 1)

    def linear_slot(self, i: int) -> int:
        return self.lifted_dim - self.dim + i


def lift_point(x) -> np.ndarray:
    x = as_vector(x)
    d = x.shape[0]
    out = np.empty(lift_dimension(d))
    out[:d] = x * x
    pos = d
    for i in range(d):
        for j in range(i + 1, d):
            out[pos] = x[i] * x[j]
            pos += 1
    out[pos:] = x
    return out


def lift_points(X) -> np.ndarray:
    """Rows phi(x) for each row x of X, vectorized."""
    P = np.asarray(X, dtype=np.float64)
    if P.ndim != 2:
        raise DimensionMismatchError("expected an (m, d) array of points")
    m, d = P.shape
    out = np.empty((m, lift_dimension(d)))
    out[:, :d] = P * P
    pos = d
    for i in range(d):
        for j in range(i + 1, d):
            out[:, pos] = P[:, i] * P[:, j]
            pos += 1
    out[:, pos:] = P
    return out


@dataclass
class Quadric:
    dim: int
    coeffs: np.ndarray
    constant: float

    def __post_init__(self):
        self.coeffs = as_vector(self.coeffs)
        self.constant = float(self.constant)
        if self.coeffs.shape[0] != lift_dimension(self.dim):
            raise DimensionMismatchError("coefficient vector has wrong lifted length")
        quad_part = self.coeffs[:self.coeffs.shape[0] - self.dim]
        if float(np.max(np.abs(quad_part))) == 0.0:
            raise ValueError("quadratic part of the coefficient vector is zero")


def quadric_eval(q: Quadric, x) -> float:
    phi = lift_point(x)
    if phi.shape[0] != q.coeffs.shape[0]:
        raise DimensionMismatchError("point dimension does not match quadric")
    return float(q.coeffs @ phi + q.constant)


def quadric_eval_batch(q: Quadric, X) -> np.ndarray:
    Phi = lift_points(X)
    if Phi.shape[1] != q.coeffs.shape[0]:
        raise DimensionMismatchError("point dimension does not match quadric")
    return Phi @ q.coeffs + q.constant


def quadric_to_matrix(q: Quadric):
    """(A, b, c) with x'Ax + b'x + c = quadric_eval(q, x).

    A_ii takes the square coefficient; A_ij = A_ji = cross/2; b is the
    linear segment. Halving is exact in binary floating point, so the
    round trip with quadric_from_matrix is bit-exact.
    """
    d = q.dim
    A = np.zeros((d, d))
    idx = LiftedIndex(d)
    for i in range(d):
        A[i, i] = q.coeffs[idx.square_slot(i)]
    for i, j in cross_pairs(d):
        half = q.coeffs[idx.cross_slot(i, j)] / 2.0
        A[i, j] = half
        A[j, i] = half
    b = q.coeffs[idx.linear_slot(0):].copy()
    return A, b, q.constant


def quadric_from_matrix(A, b, c, dim: int | None = None) -> Quadric:
    A = as_sym_matrix(A)
    b = as_vector(b)
    d = A.shape[0] if dim is None else dim
    if A.shape[0] != d or b.shape[0] != d:
        raise DimensionMismatchError("matrix/vector order disagrees with dim")
    idx = LiftedIndex(d)
    coeffs = np.zeros(lift_dimension(d))
    for i in range(d):
        coeffs[idx.square_slot(i)] = A[i, i]
    for i, j in cross_pairs(d):
        coeffs[idx.cross_slot(i, j)] = A[i, j] * 2.0
    coeffs[idx.linear_slot(0):] = b
    return Quadric(dim=d, coeffs=coeffs, constant=float(c))


@dataclass
class Ellipsoid:
    """Open set {x : (x-center)' matrix (x-center) < 1}, matrix PD."""
    center: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        self.center = as_vector(self.center)
        self.matrix = as_sym_matrix(self.matrix, tol=0.0)
        if self.matrix.shape[0] != self.center.shape[0]:
            raise DimensionMismatchError("center and matrix order disagree")
        ok, _ = cholesky_pd_check(self.matrix)
        if not ok:
            raise NotPositiveDefiniteError("ellipsoid matrix must be positive definite")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


def ellipsoid_form_value(e: Ellipsoid, x) -> float:
    dx = as_vector(x) - e.center
    return float(dx @ e.matrix @ dx)


def ellipsoid_form_batch(e: Ellipsoid, X) -> np.ndarray:
    D = np.asarray(X, dtype=np.float64) - e.center[None, :]
    return np.einsum('ij,jk,ik->i', D, e.matrix, D)


def ellipsoid_contains(e: Ellipsoid, x) -> bool:
    return ellipsoid_form_value(e, x) < 1.0


@dataclass
class EmptySetReport:
    """The quadric's sublevel set {q < 0} is empty: its minimum over
    R^d, attained at `center`, is `interior_value` >= 0."""
    quadric: Quadric
    center: np.ndarray
    interior_value: float


def ellipsoid_from_quadric(q: Quadric, tol: Tolerances = DEFAULT):
    """Complete the square: {quadric_eval(q, .) < 0} as an Ellipsoid.

    Requires the quadratic part PD. The minimum of the quadric sits at
    mu = -(1/2) A^{-1} b with value v there; v < 0 gives the ellipsoid
    {(x-mu)' (A / -v) (x-mu) < 1}, v >= 0 an empty sublevel set.
    """
    A, b, _c = quadric_to_matrix(q)
    ok, _ = cholesky_pd_check(A, tol)
    if not ok:
        raise NotPositiveDefiniteError("quadratic part is not positive definite")
    mu = solve_linear(A, -0.5 * b, tol)
    v = quadric_eval(q, mu)
    if v >= 0.0:
        return EmptySetReport(quadric=q, center=mu, interior_value=v)
    return Ellipsoid(center=mu, matrix=A / (-v))


def ellipsoid_to_quadric(e: Ellipsoid) -> Quadric:
    """Expand (x-mu)'A(x-mu) - 1 into lifted coefficients; the sublevel
    set {quadric < 0} is exactly the ellipsoid."""
    A = e.matrix
    mu = e.center
    b = -2.0 * (A @ mu)
    c = float(mu @ A @ mu) - 1.0
    return quadric_from_matrix(A, b, c)
