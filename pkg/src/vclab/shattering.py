"""Shattering constructions and refutations for ellipsoid classes.

Lower bound: B = (d^2+3d)/2 unit-sphere points whose lifted images form
an invertible B x B system. Every labeling Y then gets an explicit
halfspace witness in lifted space, solving M b = v for target values
1 -/+ delta, and the witness quadric <b, phi(x)> - 1 has PD quadratic
part because b stays within eps/2 of the unit-ball coefficient vector
a0 = (1,...,1,0,...,0). Conversion to an ellipsoid is exact.

Upper bound: any B+1 points admit an unrealizable labeling. Rotate the
lifted cloud so the trace direction (positive on every PD quadratic
part) becomes the last axis, drop that coordinate, and take a Radon
partition of the projections; comparing the heights of the two convex
combinations singles out the side that no ellipsoid can cut out. The
oracle's infeasibility report is embedded in the certificate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances, DEFAULT
from .errors import (
    ConstructionFailureError,
    DegenerateDependenceError,
    DimensionMismatchError,
    DuplicatePointError,
    NotPositiveDefiniteError,
    OracleDisagreementError,
)
from .kernels import lu_factor, lu_solve_factored
from .lifting import (
    Ellipsoid,
    EmptySetReport,
    Quadric,
    ellipsoid_form_batch,
    ellipsoid_from_quadric,
    lift_dimension,
    lift_points,
    quadric_to_matrix,
)
from .numerics import sym_eigen, cholesky_pd_check, invert
from .realizability import (
    InfeasibilityReport,
    LabeledPointSet,
    MarginCertificate,
    normalize_points,
    realizable_by_ellipsoid,
)


@dataclass
class SubsetWitness:
    labels: int
    coeffs: np.ndarray          # lifted halfspace vector b
    ellipsoid: Ellipsoid
    lambda_min: float
    slack: float                # min over points of |<b, phi(s)> - 1|


@dataclass
class ShatterWitness:
    dim: int
    points: np.ndarray          # (B, d), unit sphere
    epsilon: float
    delta: float
    minv_norm: float            # ||M^{-1}||_inf of the lifted system
    cond: float                 # ||M||_inf * ||M^{-1}||_inf
    gershgorin_bound: float
    seed: int
    entries: list[SubsetWitness] = field(default_factory=list)

    def entry(self, labels: int) -> SubsetWitness:
        return self.entries[labels]


@dataclass
class RadonCertificate:
    indices_pos: tuple[int, ...]
    indices_neg: tuple[int, ...]
    coeffs_pos: np.ndarray
    coeffs_neg: np.ndarray
    point: np.ndarray
    residual: float             # inf-norm gap between the two combinations
    eigenvalue: float           # smallest eigenvalue of the dependence system


@dataclass
class RefutationCertificate:
    points: np.ndarray
    labels: int
    kind: str                   # "radon" | "equal-projection"
    oracle_report: InfeasibilityReport
    radon: RadonCertificate | None = None
    heights: tuple[float, float] | None = None      # (z, z_prime)
    pair: tuple[int, int] | None = None
    tie: bool = False


class _LiftedSystem:
    """Lifted point matrix with a reusable LU factorization."""

    def __init__(self, points: np.ndarray, tol: Tolerances):
        self.points = points
        self.M = lift_points(points)
        B = self.M.shape[0]
        if self.M.shape[1] != B:
            raise DimensionMismatchError("need exactly B points for a square system")
        LU, piv, ok = lu_factor(np.ascontiguousarray(self.M), tol.solve_pivot_rel)
        if not ok:
            raise ConstructionFailureError("lifted point matrix is singular")
        self._LU, self._piv = LU, piv
        Minv = invert(self.M, tol)
        self.minv_norm = float(np.max(np.sum(np.abs(Minv), axis=1)))
        self.cond = float(np.max(np.sum(np.abs(self.M), axis=1))) * self.minv_norm

    def solve(self, v: np.ndarray) -> np.ndarray:
        return lu_solve_factored(self._LU, self._piv, np.ascontiguousarray(v))


def construct_spanning_sphere_points(d: int, seed: int,
                                     tol: Tolerances = DEFAULT) -> np.ndarray:
    """Seeded unit-sphere points whose lifted matrix is invertible.

    d=1 is deterministic: the only unit points are -1 and +1. Higher d
    samples standard normals, normalizes rows, and retries on (measure
    zero) rank failure.
    """
    if not 1 <= d <= 6:
        raise DimensionMismatchError("dimension must be between 1 and 6")
    if d == 1:
        return np.array([[-1.0], [1.0]])
    B = lift_dimension(d)
    rng = np.random.default_rng([seed, d])
    for _ in range(tol.max_construction_attempts):
        G = rng.standard_normal((B, d))
        norms = np.sqrt(np.sum(G * G, axis=1))
        if np.any(norms < 1e-12):
            continue
        S = G / norms[:, None]
        try:
            _LiftedSystem(S, tol)
        except ConstructionFailureError:
            continue
        return S
    raise ConstructionFailureError(
        "no invertible lifted system in %d attempts" % tol.max_construction_attempts)


def halfspace_witness(S, labels: int, epsilon: float,
                      tol: Tolerances = DEFAULT,
                      system: _LiftedSystem | None = None) -> np.ndarray:
    """Lifted coefficient vector b with <b, phi(s_j)> = 1 - delta on Y
    and 1 + delta off Y, delta = min(eps, 1) / (2 ||M^{-1}||_inf)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if system is None:
        system = _LiftedSystem(normalize_points(S), tol)
    B = system.M.shape[0]
    if not 0 <= labels < (1 << B):
        raise ValueError("label bitmask out of range")
    delta = min(epsilon, 1.0) / (2.0 * system.minv_norm)
    v = np.empty(B)
    for j in range(B):
        v[j] = 1.0 - delta if (labels >> j) & 1 else 1.0 + delta
    return system.solve(v)


def build_shatter_witness(d: int, seed: int,
                          tol: Tolerances = DEFAULT) -> ShatterWitness:
    """Certify all 2^B labelings of a spanning sphere set.

    Demands, per subset: a PD quadratic part clearing the Gershgorin
    floor (1-eps) - (d-1)*eps/2 - 1e-9, an actual ellipsoid after
    conversion, and exact membership E_Y cap S = Y by direct evaluation.
    Any violation is a hard error; these are construction guarantees,
    not input conditions.
    """
    if not 1 <= d <= 4:
        raise DimensionMismatchError("dimension must be between 1 and 4")
    S = construct_spanning_sphere_points(d, seed, tol)
    system = _LiftedSystem(S, tol)
    B = system.M.shape[0]
    epsilon = 1.0 / (d + 1)
    delta = min(epsilon, 1.0) / (2.0 * system.minv_norm)
    floor = (1.0 - epsilon) - (d - 1) * epsilon / 2.0
    witness = ShatterWitness(dim=d, points=S, epsilon=epsilon, delta=delta,
                             minv_norm=system.minv_norm, cond=system.cond,
                             gershgorin_bound=floor, seed=seed)
    for labels in range(1 << B):
        b = halfspace_witness(S, labels, epsilon, tol, system=system)
        quad = Quadric(dim=d, coeffs=b, constant=-1.0)
        A, _, _ = quadric_to_matrix(quad)
        ok, _ = cholesky_pd_check(A, tol)
        if not ok:
            raise NotPositiveDefiniteError(
                "witness quadratic part not PD at labeling %d" % labels)
        w, _ = sym_eigen(A, tol)
        lam_min = float(w[0])
        if lam_min < floor - 1e-9:
            raise NotPositiveDefiniteError(
                "eigenvalue %g under the Gershgorin floor %g" % (lam_min, floor))
        ell = ellipsoid_from_quadric(quad, tol)
        if isinstance(ell, EmptySetReport):
            raise ConstructionFailureError(
                "witness ellipsoid empty at labeling %d" % labels)
        vals = system.M @ b
        slack = float(np.min(np.abs(vals - 1.0)))
        form = ellipsoid_form_batch(ell, S)
        for j in range(B):
            inside = bool(form[j] < 1.0)
            if inside != bool((labels >> j) & 1):
                raise ConstructionFailureError(
                    "membership mismatch at labeling %d point %d" % (labels, j))
        witness.entries.append(SubsetWitness(labels=labels, coeffs=b,
                                             ellipsoid=ell, lambda_min=lam_min,
                                             slack=slack))
    return witness


@dataclass
class SubsetCheck:
    labels: int
    ok: bool
    detail: str


def _oracle_table(points, oracle, tol, threads) -> list:
    m = points.shape[0]
    masks = range(1 << m)

    def run(labels):
        return oracle(LabeledPointSet(points, labels), tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, masks))
    return [run(labels) for labels in masks]


def verify_shattering(points, witness: ShatterWitness | None = None,
                      oracle=None, tol: Tolerances = DEFAULT,
                      threads: int = 1):
    """Check that every labeling of the point set is realizable.

    Witness mode evaluates the stored ellipsoids directly (the points
    must be the witness's own). Oracle mode decides each labeling from
    scratch; indeterminate outcomes count as failures. Returns
    (all_ok, per-labeling report).
    """
    P = normalize_points(points)
    m = P.shape[0]
    if m > 20:
        raise ValueError("at most 20 points (2^20 labelings)")
    if m == 0:
        return True, []
    checks: list[SubsetCheck] = []
    if witness is not None:
        if P.shape != witness.points.shape or not np.array_equal(P, witness.points):
            raise ValueError("witness covers a different point set")
        for entry in witness.entries:
            form = ellipsoid_form_batch(entry.ellipsoid, P)
            ok = all(bool(form[j] < 1.0) == bool((entry.labels >> j) & 1)
                     for j in range(m))
            checks.append(SubsetCheck(entry.labels, ok,
                                      "membership" if ok else "membership mismatch"))
    else:
        if oracle is None:
            oracle = realizable_by_ellipsoid
        results = _oracle_table(P, oracle, tol, threads)
        for labels, res in enumerate(results):
            if isinstance(res, MarginCertificate):
                checks.append(SubsetCheck(labels, True, "margin %g" % res.margin))
            elif getattr(res, "indeterminate", False):
                checks.append(SubsetCheck(labels, False,
                                          "indeterminate t*=%g" % res.t_star))
            else:
                checks.append(SubsetCheck(labels, False, "t*=%g" % res.t_star))
    return all(c.ok for c in checks), checks


def radon_partition(P, tol: Tolerances = DEFAULT) -> RadonCertificate:
    """Split m >= k+2 points in R^k into two sets whose convex hulls meet.

    The affine dependence is the smallest eigenvector of N'N where N
    stacks the homogeneous coordinates; sign of each entry picks the
    side. Entries numerically zero ride along with the negative side at
    coefficient zero.
    """
    P = normalize_points(P)
    m, k = P.shape
    if m < k + 2:
        raise DimensionMismatchError("need at least k+2 points in R^k")
    N = np.vstack([P.T, np.ones(m)])
    w, V = sym_eigen(N.T @ N, tol)
    v = V[:, 0]
    thresh = 1e-12 * float(np.max(np.abs(v)))
    pos = np.nonzero(v > thresh)[0]
    neg = np.nonzero(v <= thresh)[0]
    if pos.size == 0 or neg.size == 0 or not np.any(v[neg] < -thresh):
        raise DegenerateDependenceError("dependence entries have one sign only")
    s_pos = float(np.sum(v[pos]))
    s_neg = float(-np.sum(v[neg]))
    coeffs_pos = v[pos] / s_pos
    coeffs_neg = np.maximum(-v[neg], 0.0) / s_neg
    x_pos = coeffs_pos @ P[pos]
    x_neg = coeffs_neg @ P[neg]
    residual = float(np.max(np.abs(x_pos - x_neg)))
    if residual > 1e-9:
        raise DegenerateDependenceError(
            "convex combinations disagree by %g" % residual)
    return RadonCertificate(indices_pos=tuple(int(i) for i in pos),
                            indices_neg=tuple(int(i) for i in neg),
                            coeffs_pos=coeffs_pos, coeffs_neg=coeffs_neg,
                            point=(x_pos + x_neg) / 2.0, residual=residual,
                            eigenvalue=float(w[0]))


def _trace_rotation(d: int, B: int) -> np.ndarray:
    """Householder reflection sending the trace direction to the last axis."""
    u = np.zeros(B)
    u[:d] = 1.0 / np.sqrt(d)
    w = u.copy()
    w[B - 1] -= 1.0
    return np.eye(B) - 2.0 * np.outer(w, w) / float(w @ w)


def find_unrealizable_labeling(points, tol: Tolerances = DEFAULT) -> RefutationCertificate:
    """Produce a labeling of B+1 points no ellipsoid can realize.

    Any quadric with PD quadratic part has positive inner product with
    the trace direction in lifted space, so after the rotation its
    decision function is strictly increasing in the last coordinate.
    Either two lifted points stack vertically (label the higher one in,
    the lower out) or the Radon partition of the projections yields two
    coinciding convex combinations whose heights order one side out of
    realizability.
    """
    X = normalize_points(points)
    m, d = X.shape
    B = lift_dimension(d)
    if m != B + 1:
        raise DimensionMismatchError("need exactly %d points in R^%d" % (B + 1, d))
    if len({tuple(row) for row in X}) != m:
        raise DuplicatePointError("points must be pairwise distinct")
    Phi = lift_points(X)
    rotated = Phi @ _trace_rotation(d, B)
    proj = rotated[:, :B - 1] if B > 1 else np.zeros((m, 0))
    heights = rotated[:, B - 1]
    scale = max(1.0, float(np.max(np.abs(proj))) if proj.size else 0.0)

    pair = None
    for i in range(m):
        for j in range(i + 1, m):
            gap = float(np.max(np.abs(proj[i] - proj[j]))) if proj.size else 0.0
            if gap <= tol.projection_tie_rel * scale:
                pair = (i, j)
                break
        if pair is not None:
            break

    if pair is not None:
        i, j = pair
        hi = i if heights[i] >= heights[j] else j
        labels = 1 << hi
        kind = "equal-projection"
        radon = None
        zz = None
        tie = abs(heights[i] - heights[j]) <= tol.height_tie_abs * max(
            1.0, abs(heights[i]), abs(heights[j]))
    else:
        radon = radon_partition(proj, tol)
        z = float(radon.coeffs_pos @ heights[list(radon.indices_pos)])
        z_prime = float(radon.coeffs_neg @ heights[list(radon.indices_neg)])
        tie = abs(z - z_prime) <= tol.height_tie_abs * max(1.0, abs(z), abs(z_prime))
        side = radon.indices_pos if (z_prime <= z or tie) else radon.indices_neg
        labels = 0
        for idx in side:
            labels |= 1 << idx
        kind = "radon"
        zz = (z, z_prime)

    report = realizable_by_ellipsoid(LabeledPointSet(X, labels), tol)
    if isinstance(report, MarginCertificate):
        raise OracleDisagreementError(
            "oracle realized labeling %d with margin %g" % (labels, report.margin))
    return RefutationCertificate(points=X, labels=labels, kind=kind,
                                 oracle_report=report, radon=radon,
                                 heights=zz, pair=pair, tie=tie)


def estimate_vc_lower_bound(d: int, oracle=None, trials: int = 3,
                            seed: int = 0, tol: Tolerances = DEFAULT,
                            threads: int = 1):
    """Largest n with some seeded n-point trial set verified shattered.

    The spanning sphere construction is the first trial at n = B, so the
    theoretical bound is reached whenever that build verifies. Returns
    (n, info) with the winning points in info, or (0, {}) when trials
    is zero or nothing verifies.
    """
    if not 1 <= d <= 3:
        raise DimensionMismatchError("dimension must be between 1 and 3")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    B = lift_dimension(d)
    for n in range(B, 0, -1):
        for k in range(trials):
            if n == B and k == 0:
                pts = construct_spanning_sphere_points(d, seed, tol)
            else:
                rng = np.random.default_rng([seed, n, k])
                pts = rng.standard_normal((n, d))
                if len({tuple(row) for row in pts}) != n:
                    continue
            ok, _ = verify_shattering(pts, oracle=oracle, tol=tol, threads=threads)
            if ok:
                return n, {"points": pts, "size": n, "trial": k}
    return 0, {}


def shatter_coefficient(points, oracle=None, tol: Tolerances = DEFAULT,
                        threads: int = 1) -> int:
    """Number of labelings of the point set realizable by an ellipsoid."""
    P = normalize_points(points)
    if P.shape[0] > 16:
        raise ValueError("at most 16 points (2^16 labelings)")
    if oracle is None:
        oracle = realizable_by_ellipsoid
    results = _oracle_table(P, oracle, tol, threads)
    return sum(1 for res in results if isinstance(res, MarginCertificate))
