"""Command-line surface.

Exit codes form a contract for shell harnesses:
  0  success (realizable / certified / verified)
  1  usage or internal error
  2  refuted or infeasible (the expected success path of `refute`)
  3  verification failure or indeterminate outcome

Every randomized command takes --seed (default 0); there is no implicit
entropy anywhere, so identical invocations give byte-identical output
files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT
from .errors import OracleDisagreementError, VclabError
from .lifting import lift_dimension
from .certificates import (
    encode_mixture_witness,
    encode_oracle_result,
    encode_refutation,
    encode_shatter_witness,
    load_certificate,
    render_certificate,
    verify_certificate,
    write_certificate,
)
from .gmm import build_mixture_shatter_witness, verify_mixture_shattering
from .realizability import (
    InfeasibilityReport,
    LabeledPointSet,
    MarginCertificate,
    realizable_by_ellipsoid,
)
from .shattering import (
    build_shatter_witness,
    find_unrealizable_labeling,
    verify_shattering,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the exit-code contract
    reserves 2 for refutations, so usage problems raise instead."""

    def error(self, message):
        raise UsageError(message)


def _load_points(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read point file %s: %s" % (path, exc))
    if not isinstance(doc, dict) or "dim" not in doc or "points" not in doc:
        raise UsageError('point file must look like {"dim": d, "points": [[...]]}')
    P = np.asarray(doc["points"], dtype=np.float64)
    if P.size == 0:
        raise UsageError("point file contains no points")
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    if P.ndim != 2 or P.shape[1] != int(doc["dim"]):
        raise UsageError("points do not match the declared dimension")
    return P


def _parse_labels(text: str, m: int) -> int:
    if len(text) != m or set(text) - {"0", "1"}:
        raise UsageError("labels must be a %d-character string of 0s and 1s" % m)
    labels = 0
    for i, ch in enumerate(text):
        if ch == "1":
            labels |= 1 << i
    return labels


def _tolerances(args):
    tol = DEFAULT
    if getattr(args, "tolerance", None) is not None:
        if not args.tolerance > 0.0:
            raise UsageError("--tolerance must be positive")
        tol = tol.with_feas_margin(args.tolerance)
    return tol


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_vcdim(args) -> int:
    d = args.dim
    if not 1 <= d <= 4:
        raise UsageError("--dim must be between 1 and 4")
    B = lift_dimension(d)
    print("dim %d: VC dimension of ellipsoids = %d" % (d, B))
    if not args.certify:
        return 0
    tol = _tolerances(args)
    witness = build_shatter_witness(d, args.seed, tol)
    ok, checks = verify_shattering(witness.points, witness=witness, tol=tol)
    print("lower bound: %d/%d subsets certified (delta=%.6g, cond=%.3g)"
          % (sum(c.ok for c in checks), len(checks), witness.delta, witness.cond))
    if not ok:
        return 3
    for k in range(args.refute_trials):
        rng = np.random.default_rng([args.seed, 1000 + k])
        X = rng.standard_normal((B + 1, d))
        cert = find_unrealizable_labeling(X, tol)
        print("upper bound trial %d: labeling %d refuted (kind=%s, t*=%.3g)"
              % (k, cert.labels, cert.kind, cert.oracle_report.t_star))
    if args.refute_trials:
        print("upper bound: %d/%d instances refuted" % (args.refute_trials,
                                                        args.refute_trials))
    return 0


def cmd_witness(args) -> int:
    if not 1 <= args.dim <= 4:
        raise UsageError("--dim must be between 1 and 4")
    tol = _tolerances(args)
    witness = build_shatter_witness(args.dim, args.seed, tol)
    text = render_certificate("shatter-witness", args.seed, tol,
                              encode_shatter_witness(witness))
    _emit(text, args.out)
    if args.out:
        print("wrote %s (%d subsets)" % (args.out, len(witness.entries)))
    return 0


def cmd_refute(args) -> int:
    tol = _tolerances(args)
    if args.points:
        X = _load_points(args.points)
        d = X.shape[1]
    else:
        if args.dim is None:
            raise UsageError("need --points or --dim")
        d = args.dim
        if not 1 <= d <= 4:
            raise UsageError("--dim must be between 1 and 4")
        rng = np.random.default_rng([args.seed, 1000])
        X = rng.standard_normal((lift_dimension(d) + 1, d))
    B = lift_dimension(d)
    if X.shape[0] != B + 1:
        raise UsageError("refutation needs exactly %d points in dimension %d, got %d"
                         % (B + 1, d, X.shape[0]))
    cert = find_unrealizable_labeling(X, tol)
    text = render_certificate("refutation", args.seed, tol, encode_refutation(cert))
    _emit(text, args.out)
    print("labeling %d unrealizable (kind=%s, t*=%.6g%s)"
          % (cert.labels, cert.kind, cert.oracle_report.t_star,
             ", tie" if cert.tie else ""))
    return 2


def cmd_oracle(args) -> int:
    tol = _tolerances(args)
    X = _load_points(args.points)
    labels = _parse_labels(args.labels, X.shape[0])
    ps = LabeledPointSet(X, labels)
    res = realizable_by_ellipsoid(ps, tol)
    text = render_certificate("oracle-result", args.seed, tol,
                              encode_oracle_result(ps, res))
    if args.out:
        _emit(text, args.out)
    if isinstance(res, MarginCertificate):
        print("realizable: margin %.6g (t*=%.6g, lambda_min=%.6g, cuts=%d)"
              % (res.margin, res.t_star, res.lambda_min, res.cuts))
        return 0
    if res.indeterminate:
        print("indeterminate: |t*|=%.3g within the decision band %.3g"
              % (abs(res.t_star), tol.feas_margin))
        return 3
    print("infeasible: t*=%.6g" % res.t_star)
    return 2


def cmd_gmm_shatter(args) -> int:
    if not 1 <= args.dim <= 2:
        raise UsageError("--dim must be 1 or 2 for mixtures")
    if not 1 <= args.components <= 3:
        raise UsageError("--components must be between 1 and 3 (2^{NB} subsets)")
    tol = _tolerances(args)
    witness = build_mixture_shatter_witness(args.dim, args.components,
                                            args.seed, tol)
    ok, reports = verify_mixture_shattering(witness, tol)
    min_in = min((r.min_in_margin for r in reports), default=np.inf)
    min_out = min((r.min_out_margin for r in reports), default=np.inf)
    print("|U| = %d, %d subsets verified; spacing %.6g, q %.6g, delta %.6g"
          % (witness.points.shape[0], len(reports), witness.spacing,
             witness.q, witness.delta))
    print("min margins: in %.6g, out %.6g (floor %.6g)"
          % (min_in, min_out, min(witness.delta, witness.q) / 2.0))
    text = render_certificate("mixture-witness", args.seed, tol,
                              encode_mixture_witness(witness))
    if args.out:
        _emit(text, args.out)
        print("wrote %s" % args.out)
    return 0 if ok else 3


def cmd_shatter_fn(args) -> int:
    tol = _tolerances(args)
    X = _load_points(args.points)
    m = X.shape[0]
    if m > 16:
        raise UsageError("at most 16 points")
    from .realizability import InfeasibilityReport as _IR  # noqa: F401
    from .shattering import _oracle_table
    results = _oracle_table(X, realizable_by_ellipsoid, tol, args.threads)
    by_size_total = [0] * (m + 1)
    by_size_good = [0] * (m + 1)
    for labels, res in enumerate(results):
        size = bin(labels).count("1")
        by_size_total[size] += 1
        if isinstance(res, MarginCertificate):
            by_size_good[size] += 1
    lines = ["subset-size,realizable-count,total-count"]
    for size in range(m + 1):
        lines.append("%d,%d,%d" % (size, by_size_good[size], by_size_total[size]))
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    doc = load_certificate(args.file)
    ok, messages = verify_certificate(doc)
    for msg in messages:
        print("FAIL %s" % msg)
    print("%s: %s" % (doc["kind"], "verified" if ok else "verification failed"))
    return 0 if ok else 3


def _build_parser() -> _Parser:
    p = _Parser(prog="vclab",
                description="certified shattering bounds for ellipsoids and "
                            "Gaussian-mixture superlevel sets")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("vcdim", help="print (d^2+3d)/2 and optionally certify it")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--certify", action="store_true")
    q.add_argument("--refute-trials", type=int, default=0)
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_vcdim)

    q = sub.add_parser("witness", help="build and serialize a shatter witness")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_witness)

    q = sub.add_parser("refute", help="emit an unrealizable labeling for B+1 points")
    q.add_argument("--points")
    q.add_argument("--dim", type=int)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_refute)

    q = sub.add_parser("oracle", help="decide one labeling of a point file")
    q.add_argument("--points", required=True)
    q.add_argument("--labels", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("gmm-shatter", help="certify mixture shattering of N copies")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--components", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_gmm_shatter)

    q = sub.add_parser("shatter-fn", help="realizable-count table by subset size")
    q.add_argument("--points", required=True)
    q.add_argument("--out")
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--tolerance", type=float)
    q.set_defaults(func=cmd_shatter_fn)

    q = sub.add_parser("verify", help="re-check a certificate file pointwise")
    q.add_argument("file")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except OracleDisagreementError as exc:
        print("oracle disagreement: %s" % exc, file=sys.stderr)
        return 3
    except VclabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
