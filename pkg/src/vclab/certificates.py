"""Certificate files: canonical JSON with 17-significant-digit reals.

Emission is deterministic byte for byte: keys sorted, no whitespace, no
timestamps, every real printed with %.17g (which round-trips doubles
exactly), negative zero normalized away. Verification re-runs pointwise
checks from the stored numbers alone; it never re-solves an LP or
re-runs a search, so a verified file certifies itself.
"""

from __future__ import annotations

import json

import numpy as np

from .config import Tolerances, DEFAULT
from .errors import CertificateFormatError
from .lifting import (
    Ellipsoid,
    ellipsoid_form_batch,
    lift_dimension,
    lift_points,
)
from .numerics import cholesky_pd_check, sym_eigen

SCHEMA_VERSION = "1"
KINDS = ("shatter-witness", "refutation", "mixture-witness", "oracle-result")


def _canon(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not np.isfinite(x):
            raise CertificateFormatError("non-finite real %r in certificate" % x)
        if x == 0.0:
            x = 0.0
        return "%.17g" % x
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    if isinstance(value, np.ndarray):
        return _canon(value.tolist())
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise CertificateFormatError("certificate keys must be strings")
            parts.append(json.dumps(key) + ":" + _canon(value[key]))
        return "{" + ",".join(parts) + "}"
    raise CertificateFormatError("cannot serialize %r" % type(value).__name__)


def render_certificate(kind: str, seed: int, tolerances: Tolerances,
                       payload: dict) -> str:
    if kind not in KINDS:
        raise CertificateFormatError("unknown certificate kind %r" % kind)
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "seed": int(seed),
           "tolerances": tolerances.as_dict(), "payload": payload}
    return _canon(doc) + "\n"


def write_certificate(path: str, kind: str, seed: int, tolerances: Tolerances,
                      payload: dict) -> str:
    text = render_certificate(kind, seed, tolerances, payload)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def load_certificate(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    for field in ("schema_version", "kind", "seed", "tolerances", "payload"):
        if field not in doc:
            raise CertificateFormatError("missing field %r" % field)
    if doc["schema_version"] != SCHEMA_VERSION:
        raise CertificateFormatError("unsupported schema %r" % doc["schema_version"])
    if doc["kind"] not in KINDS:
        raise CertificateFormatError("unknown kind %r" % doc["kind"])
    return doc


# ---------------------------------------------------------------- encoders

def encode_shatter_witness(w) -> dict:
    return {
        "dim": w.dim,
        "epsilon": w.epsilon,
        "delta": w.delta,
        "minv_norm": w.minv_norm,
        "cond": w.cond,
        "gershgorin_bound": w.gershgorin_bound,
        "points": w.points,
        "entries": [{
            "labels": e.labels,
            "coeffs": e.coeffs,
            "center": e.ellipsoid.center,
            "matrix": e.ellipsoid.matrix,
            "lambda_min": e.lambda_min,
            "slack": e.slack,
        } for e in w.entries],
    }


def encode_refutation(c) -> dict:
    radon = None
    if c.radon is not None:
        radon = {
            "indices_pos": list(c.radon.indices_pos),
            "indices_neg": list(c.radon.indices_neg),
            "coeffs_pos": c.radon.coeffs_pos,
            "coeffs_neg": c.radon.coeffs_neg,
            "point": c.radon.point,
            "residual": c.radon.residual,
            "eigenvalue": c.radon.eigenvalue,
        }
    return {
        "points": c.points,
        "labels": c.labels,
        "kind": c.kind,
        "tie": c.tie,
        "pair": list(c.pair) if c.pair is not None else None,
        "heights": list(c.heights) if c.heights is not None else None,
        "radon": radon,
        "oracle": {
            "t_star": c.oracle_report.t_star,
            "iterations": c.oracle_report.iterations,
            "cuts": c.oracle_report.cuts,
            "indeterminate": c.oracle_report.indeterminate,
            "lp_pivots": c.oracle_report.lp_pivots,
        },
    }


def encode_mixture_witness(w) -> dict:
    finite = w.leak_log[np.isfinite(w.leak_log)]
    return {
        "dim": w.dim,
        "n_components": w.n_components,
        "q": w.q,
        "delta": w.delta,
        "spacing": w.spacing,
        "doublings": w.spacing_report.doublings,
        "base_points": w.base.points,
        "translations": w.translations,
        "points": w.points,
        "witnesses": [{
            "labels": labels,
            "mean": gw.component.mean,
            "cov": gw.component.cov,
            "threshold": gw.threshold,
        } for labels, gw in sorted(w.base_witnesses.items())],
        "entries": [{
            "labels": e.labels,
            "masks": list(e.masks),
            "r_v": e.r_V,
        } for e in w.entries],
        "leak_log_min": float(finite.min()) if finite.size else None,
        "leak_log_max": float(finite.max()) if finite.size else None,
    }


def encode_oracle_result(ps, res) -> dict:
    from .realizability import MarginCertificate
    doc = {
        "points": ps.points,
        "labels": ps.labels,
        "t_star": res.t_star,
        "iterations": res.iterations,
        "cuts": res.cuts,
    }
    if isinstance(res, MarginCertificate):
        doc["outcome"] = "realizable"
        doc["mode"] = res.mode
        doc["margin"] = res.margin
        doc["lambda_min"] = res.lambda_min
        doc["slacks"] = res.slacks
        doc["quadric"] = {"coeffs": res.quadric.coeffs,
                          "constant": res.quadric.constant}
        doc["ellipsoid"] = None if res.ellipsoid is None else {
            "center": res.ellipsoid.center, "matrix": res.ellipsoid.matrix}
    else:
        doc["outcome"] = "indeterminate" if res.indeterminate else "infeasible"
        doc["mode"] = "ellipsoid"
    return doc


# --------------------------------------------------------------- verifiers

def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def _check(messages: list, ok: bool, text: str) -> bool:
    if not ok:
        messages.append(text)
    return ok


def _verify_shatter(payload, tol, messages) -> bool:
    from .lifting import Quadric, quadric_to_matrix
    P = _arr(payload["points"])
    Phi = lift_points(P)
    B = P.shape[0]
    delta = float(payload["delta"])
    floor = float(payload["gershgorin_bound"])
    ok = _check(messages, len(payload["entries"]) == (1 << B),
                "entry count is not 2^B")
    for e in payload["entries"]:
        labels = int(e["labels"])
        vals = Phi @ _arr(e["coeffs"])
        ell = Ellipsoid(center=_arr(e["center"]), matrix=_arr(e["matrix"]))
        form = ellipsoid_form_batch(ell, P)
        for j in range(B):
            bit = (labels >> j) & 1
            if not _check(messages, (vals[j] < 1.0) == bool(bit),
                          "labeling %d: halfspace side wrong at point %d" % (labels, j)):
                ok = False
            if not _check(messages, (form[j] < 1.0) == bool(bit),
                          "labeling %d: ellipsoid side wrong at point %d" % (labels, j)):
                ok = False
        slack = float(np.min(np.abs(vals - 1.0)))
        if not _check(messages, slack >= delta - 1e-9,
                      "labeling %d: slack %g under delta" % (labels, slack)):
            ok = False
        if not _check(messages, abs(slack - float(e["slack"])) <= 1e-9,
                      "labeling %d: stored slack drifted" % labels):
            ok = False
        A = ell.matrix
        pd_ok, _ = cholesky_pd_check(A, tol)
        if not _check(messages, pd_ok, "labeling %d: matrix not PD" % labels):
            ok = False
        # lambda_min recorded for the quadric's own quadratic part; the
        # ellipsoid matrix is that matrix rescaled, so re-derive from
        # the coefficient vector directly
        Aq, _, _ = quadric_to_matrix(Quadric(dim=P.shape[1],
                                             coeffs=_arr(e["coeffs"]),
                                             constant=-1.0))
        w_eig, _ = sym_eigen(Aq, tol)
        lam = float(w_eig[0])
        if not _check(messages, abs(lam - float(e["lambda_min"])) <= 1e-9,
                      "labeling %d: lambda_min drifted" % labels):
            ok = False
        if not _check(messages, lam >= floor - 1e-9,
                      "labeling %d: lambda_min %g under Gershgorin floor" % (labels, lam)):
            ok = False
    return ok


def _verify_refutation(payload, tol, messages) -> bool:
    from .shattering import _trace_rotation
    P = _arr(payload["points"])
    m, d = P.shape
    B = lift_dimension(d)
    ok = _check(messages, m == B + 1, "point count is not B+1")
    oracle = payload["oracle"]
    if not _check(messages, float(oracle["t_star"]) <= tol.feas_margin,
                  "oracle did not report infeasibility"):
        ok = False
    labels = int(payload["labels"])
    rotated = lift_points(P) @ _trace_rotation(d, B)
    proj = rotated[:, :B - 1]
    heights = rotated[:, B - 1]
    if payload["kind"] == "equal-projection":
        i, j = (int(v) for v in payload["pair"])
        scale = max(1.0, float(np.max(np.abs(proj))))
        gap = float(np.max(np.abs(proj[i] - proj[j])))
        if not _check(messages, gap <= tol.projection_tie_rel * scale,
                      "pair projections do not collide"):
            ok = False
        hi = i if heights[i] >= heights[j] else j
        if not _check(messages, labels == (1 << hi),
                      "labeling is not the higher point of the pair"):
            ok = False
        return ok
    radon = payload["radon"]
    if not _check(messages, radon is not None, "radon data missing"):
        return False
    ip = [int(v) for v in radon["indices_pos"]]
    ineg = [int(v) for v in radon["indices_neg"]]
    cp = _arr(radon["coeffs_pos"])
    cn = _arr(radon["coeffs_neg"])
    if not _check(messages, sorted(ip + ineg) == list(range(m)),
                  "radon sides do not partition the index set"):
        ok = False
    for name, coeffs in (("pos", cp), ("neg", cn)):
        if not _check(messages, bool(np.all(coeffs >= 0.0))
                      and abs(float(np.sum(coeffs)) - 1.0) <= 1e-12,
                      "radon %s coefficients not convex" % name):
            ok = False
    x_pos = cp @ proj[ip]
    x_neg = cn @ proj[ineg]
    if not _check(messages, float(np.max(np.abs(x_pos - x_neg))) <= 1e-9,
                  "radon combinations disagree"):
        ok = False
    z, z_prime = (float(v) for v in payload["heights"])
    if not _check(messages, abs(float(cp @ heights[ip]) - z) <= 1e-9
                  and abs(float(cn @ heights[ineg]) - z_prime) <= 1e-9,
                  "stored heights drifted"):
        ok = False
    side = ip if (z_prime <= z or bool(payload["tie"])) else ineg
    want = 0
    for idx in side:
        want |= 1 << idx
    if not _check(messages, labels == want, "labeling does not match the heights"):
        ok = False
    return ok


def _verify_mixture(payload, tol, messages) -> bool:
    from .gmm import (GaussianComponent, GaussianWitness, MixtureModel,
                      build_mixture, log_mixture_density_batch)
    U = _arr(payload["points"])
    T = _arr(payload["translations"])
    N = int(payload["n_components"])
    q = float(payload["q"])
    delta = float(payload["delta"])
    floor = min(delta / 2.0, q / 2.0)
    witnesses = {}
    for wd in payload["witnesses"]:
        witnesses[int(wd["labels"])] = GaussianWitness(
            component=GaussianComponent(mean=_arr(wd["mean"]), cov=_arr(wd["cov"])),
            threshold=float(wd["threshold"]))
    nb = U.shape[0]
    ok = _check(messages, len(payload["entries"]) == (1 << nb),
                "entry count is not 2^|U|")
    if not _check(messages, 0.0 < delta < q, "delta outside (0, q)"):
        ok = False
    for e in payload["entries"]:
        V = int(e["labels"])
        masks = [int(v) for v in e["masks"]]
        model, r_V = build_mixture([witnesses[m] for m in masks], T)
        if not _check(messages, abs(r_V - float(e["r_v"])) <= 1e-12,
                      "subset %d: threshold drifted" % V):
            ok = False
        vals = log_mixture_density_batch(model, U) + r_V
        for j in range(nb):
            inside = (V >> j) & 1
            margin = vals[j] if inside else -vals[j]
            if not _check(messages, margin >= floor,
                          "subset %d: margin %g under floor at point %d"
                          % (V, margin, j)):
                ok = False
    return ok


def _verify_oracle(payload, tol, messages) -> bool:
    from .lifting import Quadric, quadric_eval_batch, quadric_to_matrix
    P = _arr(payload["points"])
    labels = int(payload["labels"])
    m = P.shape[0]
    outcome = payload["outcome"]
    t_star = float(payload["t_star"])
    if outcome == "realizable":
        ok = _check(messages, t_star > tol.feas_margin,
                    "realizable outcome with t* under the threshold")
        quad = Quadric(dim=P.shape[1], coeffs=_arr(payload["quadric"]["coeffs"]),
                       constant=float(payload["quadric"]["constant"]))
        evals = quadric_eval_batch(quad, P)
        margin = float(payload["margin"])
        for j in range(m):
            if (labels >> j) & 1:
                good = evals[j] <= -(margin - 1e-9)
            else:
                good = evals[j] >= -1e-9
            if not _check(messages, bool(good),
                          "point %d violates the stored margin" % j):
                ok = False
        if payload["mode"] == "ellipsoid":
            A, _, _ = quadric_to_matrix(quad)
            pd_ok, _ = cholesky_pd_check(A, tol)
            if not _check(messages, pd_ok, "quadratic part not PD"):
                ok = False
            if payload.get("ellipsoid"):
                ell = Ellipsoid(center=_arr(payload["ellipsoid"]["center"]),
                                matrix=_arr(payload["ellipsoid"]["matrix"]))
                form = ellipsoid_form_batch(ell, P)
                for j in range(m):
                    if not _check(messages,
                                  (form[j] < 1.0) == bool((labels >> j) & 1),
                                  "ellipsoid side wrong at point %d" % j):
                        ok = False
        return ok
    if outcome == "indeterminate":
        return _check(messages, abs(t_star) <= tol.feas_margin,
                      "indeterminate outcome with |t*| over the threshold")
    if outcome == "infeasible":
        return _check(messages, t_star <= tol.feas_margin,
                      "infeasible outcome with positive margin")
    messages.append("unknown outcome %r" % outcome)
    return False


def verify_certificate(doc: dict, tol: Tolerances | None = None):
    """Re-check a parsed certificate pointwise. Returns (ok, messages)."""
    if tol is None:
        tol = Tolerances(**{k: v for k, v in doc["tolerances"].items()})
    messages: list[str] = []
    kind = doc["kind"]
    payload = doc["payload"]
    if kind == "shatter-witness":
        ok = _verify_shatter(payload, tol, messages)
    elif kind == "refutation":
        ok = _verify_refutation(payload, tol, messages)
    elif kind == "mixture-witness":
        ok = _verify_mixture(payload, tol, messages)
    elif kind == "oracle-result":
        ok = _verify_oracle(payload, tol, messages)
    else:
        raise CertificateFormatError("unknown kind %r" % kind)
    return ok, messages
