"""Exception types shared across the package.

Everything raised on purpose derives from VclabError so callers can catch
one base class at the CLI boundary.
"""


class VclabError(Exception):
    pass


class DimensionMismatchError(VclabError):
    """Input shapes disagree with the declared ambient dimension."""


class DuplicatePointError(VclabError):
    """A point set contains two identical points."""


class SingularMatrixError(VclabError):
    """Gaussian elimination hit a pivot below the scaled threshold."""


class NotPositiveDefiniteError(VclabError):
    """A matrix required to be positive definite failed the pivot test."""


class LpIterationLimitError(VclabError):
    """The simplex loop exceeded its pivot cap."""


class LpNumericalError(VclabError):
    """An LP solution failed the post-solve feasibility recheck."""


class CutLimitError(VclabError):
    """The eigenvector cutting-plane loop exceeded its cut cap."""


class ConstructionFailureError(VclabError):
    """Randomized construction failed after the retry budget."""


class DegenerateDependenceError(VclabError):
    """An affine dependence had one-sided signs; input is degenerate."""


class OracleDisagreementError(VclabError):
    """A labeling predicted unrealizable was accepted by the oracle."""


class ImpossibleTighteningError(VclabError):
    """A threshold cannot be tightened: some excluded point sits at or
    above the current threshold with no room below the included ones."""


class NonPositiveSeparationError(VclabError):
    """Separation quantities for a mixture witness were not positive."""


class SpacingSearchExhaustedError(VclabError):
    """Translation spacing search hit its doubling cap."""


class CertificateFormatError(VclabError):
    """A certificate file is malformed or fails schema validation."""
