"""Gaussian-mixture shattering: N translated copies of a shattered
B-point set, shattered by mixture superlevel sets.

A Gaussian with covariance A^{-1} has superlevel set {g > e^{-r}}
exactly equal to the open ellipsoid (x-mu)'A(x-mu) < 1 when
r = (1 + d ln 2pi + ln det Sigma)/2, so every ellipsoid witness on the
base set converts losslessly. Spreading N copies along e_1 far enough
makes cross-copy density leakage smaller than any chosen delta; the
leakage enters decisions only through the correction term
log(1 + exp(u)) where u collects the cross terms, and at valid
spacings u is astronomically negative. Everything here therefore stays
in natural-log space: raw densities across copies underflow double
precision by design, the log-domain values never do.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances, DEFAULT
from .errors import (
    ConstructionFailureError,
    DimensionMismatchError,
    ImpossibleTighteningError,
    NonPositiveSeparationError,
    SpacingSearchExhaustedError,
)
from .kernels import tri_solve_sq
from .lifting import Ellipsoid
from .numerics import as_sym_matrix, as_vector, cholesky_pd_check, invert, sym_eigen
from .realizability import normalize_points, trivial_witness
from .shattering import ShatterWitness, build_shatter_witness

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class GaussianComponent:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = as_vector(self.mean)
        self.cov = as_sym_matrix(self.cov)
        if self.cov.shape[0] != self.mean.shape[0]:
            raise DimensionMismatchError("mean and covariance sizes differ")
        ok, L = cholesky_pd_check(self.cov, DEFAULT)
        if not ok:
            from .errors import NotPositiveDefiniteError
            raise NotPositiveDefiniteError("covariance is not positive definite")
        self.chol = L
        self.logdet = 2.0 * float(np.sum(np.log(np.diag(L))))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def log_density_batch(g: GaussianComponent, X) -> np.ndarray:
    P = normalize_points(X, g.dim)
    sq = tri_solve_sq(g.chol, np.ascontiguousarray(P - g.mean))
    return -0.5 * (g.dim * LOG_2PI + g.logdet + sq)


def log_density(g: GaussianComponent, x) -> float:
    return float(log_density_batch(g, as_vector(x).reshape(1, -1))[0])


@dataclass
class GaussianWitness:
    component: GaussianComponent
    threshold: float            # r on the natural-log scale

    def __post_init__(self):
        self.threshold = float(self.threshold)
        g = self.component
        # {g > e^{-r}} is nonempty iff r exceeds -log g(mean)
        if 2.0 * self.threshold - g.dim * LOG_2PI - g.logdet <= 0.0:
            raise ValueError("threshold at or below the density maximum")


def superlevel_ellipsoid(w: GaussianWitness, tol: Tolerances = DEFAULT) -> Ellipsoid:
    """The open set {x : g(x) > e^{-r}} as an explicit ellipsoid."""
    g = w.component
    rho = 2.0 * w.threshold - g.dim * LOG_2PI - g.logdet
    A = invert(g.cov, tol)
    A = (A + A.T) / 2.0
    return Ellipsoid(center=g.mean.copy(), matrix=A / rho)


def vanishing_radius(g: GaussianComponent, eps: float,
                     tol: Tolerances = DEFAULT) -> float:
    """Distance from the mean beyond which the density is under eps."""
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    w, _ = sym_eigen(g.cov, tol)
    lam_max = float(w[-1])
    peak = -0.5 * (g.dim * LOG_2PI + g.logdet)
    gap = peak - float(np.log(eps))
    return float(np.sqrt(2.0 * lam_max * max(gap, 0.0)))


def gaussian_from_ellipsoid(E: Ellipsoid, tol: Tolerances = DEFAULT) -> GaussianWitness:
    """Gaussian whose superlevel set at e^{-r} is exactly E.

    Sigma = A^{-1} matches the quadratic forms; r is pinned so the
    density on the ellipsoid boundary equals the threshold.
    """
    Sigma = invert(E.matrix, tol)
    Sigma = (Sigma + Sigma.T) / 2.0
    comp = GaussianComponent(mean=E.center.copy(), cov=Sigma)
    r = 0.5 * (1.0 + comp.dim * LOG_2PI + comp.logdet)
    peak_gap = log_density(comp, comp.mean) + r
    if abs(peak_gap - 0.5) > 1e-10:
        raise ConstructionFailureError("threshold calibration drifted: %g" % peak_gap)
    return GaussianWitness(component=comp, threshold=r)


@dataclass
class MixtureModel:
    weights: np.ndarray
    components: list[GaussianComponent]

    def __post_init__(self):
        self.weights = as_vector(self.weights)
        if len(self.components) < 1:
            raise ValueError("a mixture needs at least one component")
        if self.weights.shape[0] != len(self.components):
            raise DimensionMismatchError("weight count differs from component count")
        if np.any(self.weights < 0.0) or abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")


def build_mixture(witnesses, translations):
    """Mixture over translated witness Gaussians, softmax-weighted.

    Weight p_i = exp(r_i) / sum_k exp(r_k) computed with max
    subtraction; r_V = logsumexp of the thresholds, so that
    log p_i = r_i - r_V holds as an identity.
    """
    T = normalize_points(translations)
    if T.shape[0] != len(witnesses):
        raise DimensionMismatchError("need one translation per witness")
    r = np.array([w.threshold for w in witnesses])
    mx = float(np.max(r))
    r_V = mx + float(np.log(np.sum(np.exp(r - mx))))
    weights = np.exp(r - r_V)
    comps = [GaussianComponent(mean=w.component.mean + t, cov=w.component.cov)
             for w, t in zip(witnesses, T)]
    return MixtureModel(weights=weights, components=comps), float(r_V)


def log_mixture_density_batch(f: MixtureModel, X) -> np.ndarray:
    P = normalize_points(X, f.components[0].dim)
    terms = np.stack([np.log(f.weights[i]) + log_density_batch(g, P)
                      for i, g in enumerate(f.components)])
    mx = np.max(terms, axis=0)
    return mx + np.log(np.sum(np.exp(terms - mx[None, :]), axis=0))


def log_mixture_density(f: MixtureModel, x) -> float:
    return float(log_mixture_density_batch(f, as_vector(x).reshape(1, -1))[0])


def _in_out_values(X, w: GaussianWitness, labels: int):
    """Per-point -log g values split against the threshold r."""
    vals = -log_density_batch(w.component, X)
    m = X.shape[0]
    in_mask = np.array([(labels >> j) & 1 == 1 for j in range(m)])
    return vals, in_mask


def tighten_thresholds(X, witnesses: dict, tol: Tolerances = DEFAULT) -> dict:
    """Pull thresholds off any out-point sitting exactly on a boundary.

    A witness may legitimately have -log g(z) = r for an out-point z
    (non-strict clearance); the mixture argument needs strict slack, so
    r drops to the midpoint between the largest in-point value and the
    old r. Witnesses already strict pass through unchanged.
    """
    P = normalize_points(X)
    out = {}
    for labels, w in witnesses.items():
        vals, in_mask = _in_out_values(P, w, labels)
        r = w.threshold
        g = w.component
        in_max = float(np.max(vals[in_mask])) if in_mask.any() else \
            0.5 * (g.dim * LOG_2PI + g.logdet)
        if in_max >= r - 1e-12:
            raise ImpossibleTighteningError(
                "in-point at or above the threshold for labeling %d" % labels)
        out_vals = vals[~in_mask]
        if out_vals.size and float(np.min(out_vals)) < r - 1e-12:
            raise ImpossibleTighteningError(
                "out-point strictly inside the superlevel set for labeling %d" % labels)
        if out_vals.size and float(np.min(out_vals)) <= r + 1e-12:
            new_r = (in_max + r) / 2.0
            if not in_max < new_r < r:
                raise ImpossibleTighteningError(
                    "no room to tighten labeling %d" % labels)
            if float(np.min(out_vals)) <= new_r:
                raise ImpossibleTighteningError(
                    "tightened threshold still touches an out-point (labeling %d)"
                    % labels)
            out[labels] = GaussianWitness(component=w.component, threshold=new_r)
        else:
            out[labels] = w
    return out


def separation_quantities(X, witnesses: dict, tol: Tolerances = DEFAULT):
    """(q, delta): worst out-clearance over proper subsets, and half the
    min of that and the worst in-clearance."""
    P = normalize_points(X)
    m = P.shape[0]
    full = (1 << m) - 1
    q = np.inf
    in_slack = np.inf
    for labels, w in witnesses.items():
        vals, in_mask = _in_out_values(P, w, labels)
        r = w.threshold
        if in_mask.any():
            in_slack = min(in_slack, float(np.min(r - vals[in_mask])))
        if labels != full:
            q = min(q, float(np.min(vals[~in_mask] - r)))
    if not q > 0.0 or not in_slack > 0.0:
        raise NonPositiveSeparationError(
            "q=%g, in-slack=%g; witnesses are not strictly separated" % (q, in_slack))
    return float(q), float(0.5 * min(q, in_slack))


def _diameter(P: np.ndarray) -> float:
    if P.shape[0] < 2:
        return 0.0
    diffs = P[:, None, :] - P[None, :, :]
    return float(np.sqrt(np.max(np.sum(diffs * diffs, axis=2))))


def _offcopy_u_table(X, witnesses: dict, N: int, spacing: float) -> np.ndarray:
    """u[Y_1..Y_N, x, j] = logsumexp_{i != j} of the cross-copy log mass
    relative to the home term, i.e. the value whose log1p is the stored
    correction. -inf means exactly zero cross mass (N = 1)."""
    P = normalize_points(X)
    m = P.shape[0]
    n_masks = 1 << m
    # W[mask, point, k] = r + log g(x + k*spacing*e1), k = -(N-1)..N-1
    W = np.empty((n_masks, m, 2 * N - 1))
    for labels, w in witnesses.items():
        for ki, k in enumerate(range(-(N - 1), N)):
            pts = P.copy()
            pts[:, 0] += k * spacing
            W[labels, :, ki] = w.threshold + log_density_batch(w.component, pts)
    u = np.full((n_masks,) * N + (m, N), -np.inf)
    for j in range(N):
        acc = None
        for i in range(N):
            if i == j:
                continue
            shape = [1] * N + [m]
            shape[i] = n_masks
            term = W[:, :, (j - i) + (N - 1)].reshape(shape)
            acc = term if acc is None else np.logaddexp(acc, term)
        if acc is None:
            continue
        shape = [1] * N + [m]
        shape[j] = n_masks
        base = W[:, :, N - 1].reshape(shape)
        u[..., j] = acc - base
    return u


def _leak_log_from_u(u: np.ndarray) -> np.ndarray:
    """log(log1p(exp(u))) with the three-regime expansion: for deeply
    negative u the value IS u; for large u it is log(u)."""
    out = u.copy()
    mid = (u > -37.0) & (u < 30.0)
    out[mid] = np.log(np.log1p(np.exp(u[mid])))
    hi = u >= 30.0
    out[hi] = np.log(u[hi])
    return out


@dataclass
class SpacingReport:
    spacing: float
    doublings: int
    checks: int
    threshold_u: float          # log(expm1(delta)): u must stay under this
    max_u: float
    rejected: list = field(default_factory=list)   # (spacing, max_u) pairs


def choose_translations(X, witnesses: dict, N: int, delta: float,
                        tol: Tolerances = DEFAULT):
    """Collinear translations (i-1)*s*e_1 with s found by doubling.

    A spacing is accepted when every cross-copy correction term is
    under delta for every subset tuple, point, and component at once;
    the exact acceptance test works on u = log of the raw cross mass,
    so corrections far below double-precision underflow stay decidable.
    """
    if N < 1:
        raise ValueError("component count must be at least 1")
    if delta < 0.0 or not np.isfinite(delta):
        raise ValueError("delta must be positive and finite")
    P = normalize_points(X)
    d = P.shape[1]
    # log1p(exp(u)) < delta  <=>  u < log(expm1(delta)); a delta that
    # underflowed to zero gives threshold -inf, so the search runs its
    # course and reports exhaustion honestly
    with np.errstate(over="ignore", divide="ignore"):
        threshold_u = float(np.log(np.expm1(delta)))
    s = 2.0 * _diameter(P) + 1.0
    rejected = []
    for doublings in range(tol.max_doublings + 1):
        u = _offcopy_u_table(P, witnesses, N, s)
        if np.any(np.isnan(u)) or np.any(u == np.inf):
            raise ConstructionFailureError("cross-copy table is not finite")
        max_u = float(np.max(u))
        # max_u of -inf means zero cross mass exactly (single component)
        if max_u == -np.inf or max_u < threshold_u:
            translations = np.zeros((N, d))
            translations[:, 0] = s * np.arange(N)
            report = SpacingReport(spacing=s, doublings=doublings,
                                   checks=int(u.size), threshold_u=threshold_u,
                                   max_u=max_u, rejected=rejected)
            return translations, report
        rejected.append((s, max_u))
        s *= 2.0
    raise SpacingSearchExhaustedError(
        "no spacing under %d doublings kept the correction below delta=%g; "
        "try a larger delta or a smaller component count"
        % (tol.max_doublings, delta))


@dataclass
class SubsetMixture:
    labels: int                 # bitmask over U
    masks: tuple[int, ...]      # per-copy base subsets Y_1..Y_N
    model: MixtureModel
    r_V: float


@dataclass
class MixtureShatterWitness:
    dim: int
    n_components: int
    base: ShatterWitness
    base_witnesses: dict
    translations: np.ndarray
    points: np.ndarray          # U, copy-major: u_{iB+j} = x_j + t_i
    q: float
    delta: float
    spacing: float
    spacing_report: SpacingReport
    leak_log: np.ndarray         # (2^{NB}, |X|, N) stored correction values
    entries: list[SubsetMixture] = field(default_factory=list)

    def entry(self, labels: int) -> SubsetMixture:
        return self.entries[labels]


@dataclass
class MixtureCheck:
    labels: int
    ok: bool
    min_in_margin: float
    min_out_margin: float


def verify_mixture_shattering(w: MixtureShatterWitness, tol: Tolerances = DEFAULT):
    """Recompute every mixture decision on U from the stored models.

    u in V must give log f_V(u) + r_V > 0 and the complement < 0, each
    with margin at least min(delta/2, q/2). Returns (ok, reports).
    """
    U = w.points
    nb = U.shape[0]
    floor = min(w.delta / 2.0, w.q / 2.0)
    reports = []
    for entry in w.entries:
        vals = log_mixture_density_batch(entry.model, U) + entry.r_V
        in_mask = np.array([(entry.labels >> j) & 1 == 1 for j in range(nb)])
        min_in = float(np.min(vals[in_mask])) if in_mask.any() else np.inf
        min_out = float(np.min(-vals[~in_mask])) if (~in_mask).any() else np.inf
        ok = bool(min_in >= floor and min_out >= floor)
        reports.append(MixtureCheck(labels=entry.labels, ok=ok,
                                    min_in_margin=min_in, min_out_margin=min_out))
    return all(r.ok for r in reports), reports


def build_mixture_shatter_witness(d: int, N: int, seed: int,
                                  tol: Tolerances = DEFAULT) -> MixtureShatterWitness:
    """Full pipeline: base shattered set, Gaussian conversion, threshold
    tightening, separation, spacing search, and all 2^{NB} mixtures.

    Empty and full base subsets take their ellipsoids from the explicit
    ball construction; every other subset reuses the halfspace witness
    ellipsoid. The returned witness has already passed verification.
    """
    if not 1 <= d <= 2:
        raise DimensionMismatchError("dimension must be 1 or 2")
    if not 1 <= N <= 3:
        raise ValueError("component count must be between 1 and 3")
    base = build_shatter_witness(d, seed, tol)
    X = base.points
    B = X.shape[0]
    full = (1 << B) - 1
    witnesses = {}
    for labels in range(1 << B):
        if labels in (0, full):
            ell = trivial_witness(X, labels)
        else:
            ell = base.entry(labels).ellipsoid
        witnesses[labels] = gaussian_from_ellipsoid(ell, tol)
    witnesses = tighten_thresholds(X, witnesses, tol)
    q, delta = separation_quantities(X, witnesses, tol)
    translations, report = choose_translations(X, witnesses, N, delta, tol)
    U = np.vstack([X + t for t in translations])
    if len({tuple(row) for row in U}) != N * B:
        raise ConstructionFailureError("translated copies overlap")

    u_table = _offcopy_u_table(X, witnesses, N, report.spacing)
    leak = _leak_log_from_u(u_table)
    # reorder tuple axes so the flat index is the V bitmask (copy 1 in
    # the low B bits)
    perm = list(reversed(range(N))) + [N, N + 1]
    leak_by_mask = leak.transpose(perm).reshape((1 << (N * B), B, N))

    witness = MixtureShatterWitness(dim=d, n_components=N, base=base,
                                    base_witnesses=witnesses,
                                    translations=translations, points=U,
                                    q=q, delta=delta, spacing=report.spacing,
                                    spacing_report=report, leak_log=leak_by_mask)
    for V in range(1 << (N * B)):
        masks = tuple((V >> (i * B)) & full for i in range(N))
        model, r_V = build_mixture([witnesses[m] for m in masks], translations)
        witness.entries.append(SubsetMixture(labels=V, masks=masks,
                                             model=model, r_V=r_V))
    ok, reports = verify_mixture_shattering(witness, tol)
    if not ok:
        bad = [r.labels for r in reports if not r.ok]
        raise ConstructionFailureError(
            "mixture verification failed on %d subsets (first: %d)"
            % (len(bad), bad[0]))
    return witness
