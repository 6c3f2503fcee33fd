"""Central tolerance and budget settings.

One frozen record travels through every construction and ends up embedded
in certificate files, so a verifier re-checks against the same numbers the
builder used.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class Tolerances:
    # positive definiteness: Cholesky pivots must exceed pd_rel * max diagonal
    pd_rel: float = 1e-12
    # realizability decision threshold on the LP margin t*
    feas_margin: float = 1e-7
    # eigenvector cutting-plane loop stops once lambda_min >= t* - cut_gap
    cut_gap: float = 1e-9
    # simplex reduced-cost / ratio-test slack
    lp_tol: float = 1e-9
    # entries below this are unusable as simplex pivots
    lp_pivot_tol: float = 1e-10
    # scaled singularity threshold for Gaussian elimination
    solve_pivot_rel: float = 1e-12
    # Jacobi sweep target: off-diagonal Frobenius mass relative to ||M||
    eig_offdiag_rel: float = 1e-12
    # relative tolerance for projection collisions in the refuter
    projection_tie_rel: float = 1e-9
    # absolute tolerance when comparing Radon heights for the tie rule
    height_tie_abs: float = 1e-12
    # budgets
    max_lp_pivots: int = 10_000
    max_cuts: int = 200
    max_doublings: int = 60
    max_construction_attempts: int = 100

    def with_feas_margin(self, value: float) -> "Tolerances":
        return replace(self, feas_margin=float(value))

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
