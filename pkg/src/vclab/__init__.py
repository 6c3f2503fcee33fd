"""Certified shattering constructions for ellipsoid and Gaussian-mixture
concept classes: explicit witnesses for the lower bounds, Radon-based
refutations for the upper bound, and a margin oracle tying them together.
"""

from .config import Tolerances, DEFAULT
from .errors import (
    VclabError,
    DimensionMismatchError,
    DuplicatePointError,
    SingularMatrixError,
    NotPositiveDefiniteError,
    LpIterationLimitError,
    LpNumericalError,
    CutLimitError,
    ConstructionFailureError,
    DegenerateDependenceError,
    OracleDisagreementError,
    ImpossibleTighteningError,
    NonPositiveSeparationError,
    SpacingSearchExhaustedError,
    CertificateFormatError,
)
from .lifting import (
    Ellipsoid,
    EmptySetReport,
    Quadric,
    LiftedIndex,
    ellipsoid_contains,
    ellipsoid_form_value,
    ellipsoid_from_quadric,
    ellipsoid_to_quadric,
    lift_dimension,
    lift_point,
    lift_points,
    quadric_eval,
    quadric_from_matrix,
    quadric_to_matrix,
)
from .realizability import (
    InfeasibilityReport,
    LabeledPointSet,
    MarginCertificate,
    analytic_interval_oracle,
    realizable_by_ellipsoid,
    realizable_by_quadric,
    trivial_witness,
)
from .shattering import (
    RadonCertificate,
    RefutationCertificate,
    ShatterWitness,
    build_shatter_witness,
    construct_spanning_sphere_points,
    estimate_vc_lower_bound,
    find_unrealizable_labeling,
    halfspace_witness,
    radon_partition,
    shatter_coefficient,
    verify_shattering,
)
from .gmm import (
    GaussianComponent,
    GaussianWitness,
    MixtureModel,
    MixtureShatterWitness,
    build_mixture,
    build_mixture_shatter_witness,
    choose_translations,
    gaussian_from_ellipsoid,
    log_density,
    log_mixture_density,
    separation_quantities,
    superlevel_ellipsoid,
    tighten_thresholds,
    vanishing_radius,
    verify_mixture_shattering,
)

__version__ = "0.1.0"
