"""Exception types shared across the library."""


class AnnulusError(Exception):
    """Base class for all library-specific failures."""


class DomainError(AnnulusError):
    """A point lies outside the region where the operation is defined."""


class AliasingError(AnnulusError):
    """Too few samples for the requested frequency order."""


class TruncationOrderError(AnnulusError):
    """Frequency order too large for stable radial powers at this inner radius."""


class ResourceLimitError(AnnulusError):
    """A requested grid or dense materialization exceeds the configured cap."""


class PeakPointError(AnnulusError):
    """Peaking functions exist only at distinguished-boundary points."""


class RationalPoleError(AnnulusError):
    """Denominator vanishes (or nearly vanishes) on the closed domain."""


class MatrixPoleError(AnnulusError):
    """Denominator evaluated on a matrix tuple is singular."""


class SingularityError(AnnulusError):
    """Matrix inversion required but the matrix is (numerically) singular."""


class PreconditionError(AnnulusError):
    """Structural precondition (normality, commutation, ...) violated.

    ``witness`` carries a diagnostic value, typically the offending norm.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDoublyCommutingError(PreconditionError):
    """A pair of matrices fails commutation or adjoint-commutation."""

    def __init__(self, message, pair, witness):
        super().__init__(message, witness)
        self.pair = pair


class StructureError(AnnulusError):
    """Triangular structure inconsistent with double commutation."""


class PositivityError(AnnulusError):
    """An operator weight that must be positive semidefinite is not."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotContractionError(AnnulusError):
    """Spectrum or an explicit certificate rules the matrix out as a contraction."""
