"""Separation oracle: can a labeled point set be cut out by a quadric,
or by an ellipsoid specifically?

Both deciders run a max-margin LP over lifted coefficients (a, c) and a
margin variable t: in-points need <a, phi(y)> + c <= -t, out-points
need <a, phi(z)> + c >= 0. Scale must be pinned down or t diverges:

  - quadric mode gauges by the box |a_i| <= 1, |c| <= 1;
  - ellipsoid mode gauges by trace(A) = d instead, and enforces positive
    definiteness as the semi-infinite family u'Au >= t over unit
    directions u, approximated by accumulated eigenvector cuts: solve,
    take the minimizing eigenvector of the optimal quadratic part, add
    it as a new cut, repeat until lambda_min >= t* - cut_gap. The seed
    cuts along the coordinate axes keep t bounded by 1 from the start.

The decision is t* > feas_margin; best margin at or below it yields an
infeasibility report, flagged indeterminate when |t*| is inside the
threshold band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, DEFAULT
from .errors import (
    CutLimitError,
    DimensionMismatchError,
    DuplicatePointError,
    LpNumericalError,
)
from .lifting import (
    Ellipsoid,
    EmptySetReport,
    Quadric,
    cross_pairs,
    LiftedIndex,
    ellipsoid_form_batch,
    ellipsoid_from_quadric,
    ellipsoid_to_quadric,
    lift_dimension,
    lift_points,
    quadric_eval_batch,
    quadric_to_matrix,
)
from .numerics import LE, EQ, GE, LinearProgram, lp_solve, sym_eigen, cholesky_pd_check


def normalize_points(points, dim=None) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    if P.ndim != 2:
        raise DimensionMismatchError("points must form an (m, d) array")
    if dim is not None and P.shape[1] != dim:
        raise DimensionMismatchError("points have dimension %d, expected %d"
                                     % (P.shape[1], dim))
    if not np.all(np.isfinite(P)):
        raise ValueError("point coordinates must be finite")
    return P


@dataclass
class LabeledPointSet:
    points: np.ndarray
    labels: int

    def __post_init__(self):
        self.points = normalize_points(self.points)
        m = self.points.shape[0]
        if m > 63:
            raise ValueError("at most 63 points supported (bitmask labels)")
        if len({tuple(row) for row in self.points}) != m:
            raise DuplicatePointError("points must be pairwise distinct")
        self.labels = int(self.labels)
        if not 0 <= self.labels < (1 << m):
            raise ValueError("label bitmask out of range for %d points" % m)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def in_mask(self) -> np.ndarray:
        m = self.size
        return np.array([(self.labels >> j) & 1 == 1 for j in range(m)])

    def is_trivial(self) -> bool:
        return self.labels == 0 or self.labels == (1 << self.size) - 1


@dataclass
class MarginCertificate:
    mode: str                       # "quadric" | "ellipsoid"
    labels: int
    quadric: Quadric
    margin: float
    slacks: np.ndarray              # per point: -eval on Y, +eval off Y
    lambda_min: float
    t_star: float
    ellipsoid: Ellipsoid | None = None
    iterations: int = 0
    cuts: int = 0
    lp_pivots: int = 0
    tolerances: Tolerances = DEFAULT


@dataclass
class InfeasibilityReport:
    labels: int
    t_star: float
    iterations: int
    cuts: int
    indeterminate: bool
    lp_pivots: int = 0
    tolerances: Tolerances = DEFAULT


def _cut_row(dim: int, u: np.ndarray) -> np.ndarray:
    """Coefficients of u'Au in the lifted a-slots: squares get u_i^2,
    cross slots get u_i*u_j (the stored cross coefficient is 2*A_ij)."""
    idx = LiftedIndex(dim)
    B = idx.lifted_dim
    row = np.zeros(B)
    for i in range(dim):
        row[idx.square_slot(i)] = u[i] * u[i]
    for i, j in cross_pairs(dim):
        row[idx.cross_slot(i, j)] = u[i] * u[j]
    return row


def _margin_lp(Phi, in_mask, dim, mode, cuts, tol) -> LinearProgram:
    m, B = Phi.shape
    n = B + 2                                   # a, c, t
    rows, rels, rhs = [], [], []
    for r in range(m):
        row = np.zeros(n)
        row[:B] = Phi[r]
        row[B] = 1.0
        if in_mask[r]:
            row[B + 1] = 1.0
            rels.append(LE)
        else:
            rels.append(GE)
        rows.append(row)
        rhs.append(0.0)
    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    if mode == "quadric":
        lower[:B + 1] = -1.0
        upper[:B + 1] = 1.0
    else:
        trace = np.zeros(n)
        trace[:dim] = 1.0
        rows.append(trace)
        rels.append(EQ)
        rhs.append(float(dim))
        for u in cuts:
            row = np.zeros(n)
            row[:B] = _cut_row(dim, u)
            row[B + 1] = -1.0
            rows.append(row)
            rels.append(GE)
            rhs.append(0.0)
    c = np.zeros(n)
    c[B + 1] = 1.0
    return LinearProgram(objective=c, rows=np.array(rows), rels=rels, rhs=rhs,
                         lower=lower, upper=upper, max_pivots=tol.max_lp_pivots)


def _certificate_from_quadric(ps, quad, mode, t_star, iterations, cuts,
                              pivots, tol) -> MarginCertificate:
    evals = quadric_eval_batch(quad, ps.points)
    in_mask = ps.in_mask()
    slacks = np.where(in_mask, -evals, evals)
    A, _, _ = quadric_to_matrix(quad)
    w, _ = sym_eigen(A, tol)
    lam_min = float(w[0])
    margin = min(t_star, float(np.min(slacks[in_mask])) if in_mask.any() else t_star)
    ellipsoid = None
    if mode == "ellipsoid":
        margin = min(margin, lam_min)
        ok, _ = cholesky_pd_check(A, tol)
        if not ok:
            raise LpNumericalError("certificate quadratic part failed the PD check")
        converted = ellipsoid_from_quadric(quad, tol)
        if isinstance(converted, EmptySetReport):
            raise LpNumericalError("certificate ellipsoid came out empty")
        ellipsoid = converted
        form = ellipsoid_form_batch(ellipsoid, ps.points)
        bad_in = in_mask & ~(form < 1.0)
        bad_out = (~in_mask) & ~(form >= 1.0 - tol.lp_tol)
        if bad_in.any() or bad_out.any():
            raise LpNumericalError("ellipsoid membership recheck failed")
    if margin <= 0.0:
        raise LpNumericalError("nonpositive certificate margin %g" % margin)
    bad_in = in_mask & ~(evals <= -(margin - tol.lp_tol))
    bad_out = (~in_mask) & ~(evals >= -tol.lp_tol)
    if bad_in.any() or bad_out.any():
        raise LpNumericalError("pointwise slack recheck failed")
    return MarginCertificate(mode=mode, labels=ps.labels, quadric=quad,
                             margin=float(margin), slacks=slacks,
                             lambda_min=lam_min, t_star=float(t_star),
                             ellipsoid=ellipsoid, iterations=iterations,
                             cuts=cuts, lp_pivots=pivots, tolerances=tol)


def _trivial_certificate(ps, mode, tol) -> MarginCertificate:
    ell = trivial_witness(ps.points, ps.labels)
    quad = ellipsoid_to_quadric(ell)
    evals = quadric_eval_batch(quad, ps.points)
    in_mask = ps.in_mask()
    slacks = np.where(in_mask, -evals, evals)
    A, _, _ = quadric_to_matrix(quad)
    w, _ = sym_eigen(A, tol)
    lam_min = float(w[0])
    margin = float(min(lam_min, np.min(slacks[in_mask]) if in_mask.any() else lam_min))
    return MarginCertificate(mode=mode, labels=ps.labels, quadric=quad,
                             margin=margin, slacks=slacks, lambda_min=lam_min,
                             t_star=margin, ellipsoid=ell, tolerances=tol)


def realizable_by_quadric(ps: LabeledPointSet, tol: Tolerances = DEFAULT):
    """Max-margin LP over all quadrics, gauge |a_i|, |c| <= 1.

    Trivial labelings short-circuit to the explicit ball construction
    (an ellipsoid witness is in particular a quadric witness).
    """
    if ps.is_trivial():
        return _trivial_certificate(ps, "quadric", tol)
    Phi = lift_points(ps.points)
    lp = _margin_lp(Phi, ps.in_mask(), ps.dim, "quadric", [], tol)
    res = lp_solve(lp, tol)
    if res.status != "optimal":
        raise LpNumericalError("margin LP reported %s" % res.status)
    t_star = float(res.value)
    if t_star > tol.feas_margin:
        B = Phi.shape[1]
        a = res.x[:B].copy()
        if float(np.max(np.abs(a[:B - ps.dim]))) == 0.0:
            # the LP landed on an affine separator; tilt the first square
            # slot to restore a genuine quadric.  Out rows only gain
            # (x_1^2 >= 0 there) and in rows keep at least half of t*.
            sq_max = max(1.0, float(np.max(ps.points[:, 0] ** 2)))
            a[LiftedIndex(ps.dim).square_slot(0)] += min(1.0, 0.5 * t_star / sq_max)
        quad = Quadric(dim=ps.dim, coeffs=a, constant=float(res.x[B]))
        return _certificate_from_quadric(ps, quad, "quadric", t_star, 0, 0,
                                         res.pivots, tol)
    return InfeasibilityReport(labels=ps.labels, t_star=t_star, iterations=0,
                               cuts=0, indeterminate=abs(t_star) <= tol.feas_margin,
                               lp_pivots=res.pivots, tolerances=tol)


def realizable_by_ellipsoid(ps: LabeledPointSet, tol: Tolerances = DEFAULT):
    """Max-margin LP with trace gauge and eigenvector cutting planes."""
    if ps.is_trivial():
        return _trivial_certificate(ps, "ellipsoid", tol)
    Phi = lift_points(ps.points)
    d = ps.dim
    B = Phi.shape[1]
    in_mask = ps.in_mask()
    cuts = [np.eye(d)[i] for i in range(d)]
    pivots = 0
    for iteration in range(tol.max_cuts + 1):
        lp = _margin_lp(Phi, in_mask, d, "ellipsoid", cuts, tol)
        res = lp_solve(lp, tol)
        pivots += res.pivots
        if res.status != "optimal":
            raise LpNumericalError("margin LP reported %s" % res.status)
        t_star = float(res.value)
        if t_star < -tol.feas_margin:
            # each cut LP relaxes the eigenvalue constraint, so its optimum
            # upper-bounds the true margin: a decisively negative t* already
            # refutes, no need to drive lambda_min to convergence
            return InfeasibilityReport(labels=ps.labels, t_star=t_star,
                                       iterations=iteration, cuts=len(cuts),
                                       indeterminate=False,
                                       lp_pivots=pivots, tolerances=tol)
        a = res.x[:B]
        quad_matrix = np.zeros((d, d))
        idx = LiftedIndex(d)
        for i in range(d):
            quad_matrix[i, i] = a[idx.square_slot(i)]
        for i, j in cross_pairs(d):
            quad_matrix[i, j] = quad_matrix[j, i] = a[idx.cross_slot(i, j)] / 2.0
        w, V = sym_eigen(quad_matrix, tol)
        lam_min = float(w[0])
        if lam_min >= t_star - tol.cut_gap:
            n_cuts = len(cuts)
            if t_star > tol.feas_margin:
                quad = Quadric(dim=d, coeffs=a, constant=float(res.x[B]))
                return _certificate_from_quadric(ps, quad, "ellipsoid", t_star,
                                                 iteration, n_cuts, pivots, tol)
            return InfeasibilityReport(labels=ps.labels, t_star=t_star,
                                       iterations=iteration, cuts=n_cuts,
                                       indeterminate=abs(t_star) <= tol.feas_margin,
                                       lp_pivots=pivots, tolerances=tol)
        cuts.append(V[:, 0].copy())
    raise CutLimitError("no convergence after %d eigenvector cuts" % tol.max_cuts)


def trivial_witness(points, labels: int) -> Ellipsoid:
    """Explicit ball for the empty or full labeling.

    Full: centroid-centered ball of radius 2*diam+1 swallows every
    point. Empty: a unit ball displaced (3*diam+3) along the first axis
    clears every point by construction.
    """
    P = normalize_points(points)
    m, d = P.shape
    full = (1 << m) - 1
    if labels not in (0, full):
        raise ValueError("trivial witness needs the empty or full labeling")
    diffs = P[:, None, :] - P[None, :, :]
    diam = float(np.sqrt(np.max(np.sum(diffs * diffs, axis=2)))) if m > 1 else 0.0
    centroid = np.mean(P, axis=0)
    if labels == full:
        radius = 2.0 * diam + 1.0
        ell = Ellipsoid(center=centroid, matrix=np.eye(d) / radius ** 2)
        if not np.all(ellipsoid_form_batch(ell, P) < 1.0):
            raise LpNumericalError("full-labeling ball failed to cover the set")
        return ell
    center = centroid.copy()
    center[0] += 3.0 * diam + 3.0
    ell = Ellipsoid(center=center, matrix=np.eye(d))
    if not np.all(ellipsoid_form_batch(ell, P) >= 1.0):
        raise LpNumericalError("empty-labeling ball failed to clear the set")
    return ell


def analytic_interval_oracle(ps: LabeledPointSet) -> bool:
    """d=1 ground truth: realizable by an open interval iff the in-points
    occupy a contiguous block of the sorted order (or the labeling is
    trivial)."""
    if ps.dim != 1:
        raise DimensionMismatchError("interval oracle is 1-d only")
    if ps.is_trivial():
        return True
    order = np.argsort(ps.points[:, 0])
    flags = ps.in_mask()[order]
    idx = np.nonzero(flags)[0]
    return bool(idx[-1] - idx[0] + 1 == idx.size)
