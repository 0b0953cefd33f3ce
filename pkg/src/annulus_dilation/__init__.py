"""Boundary-unitary dilations of commuting normal matrix tuples over the annulus.

The library solves the Dirichlet problem on the annulus and its products by
frequency matching, derives discrete harmonic measures, pushes spectral
measures to the distinguished boundary, and assembles a finite Naimark
dilation whose coordinate unitaries have spectrum exactly on the two boundary
circles.  A Laurent functional calculus and classification utilities
(contraction tests, the 2x2 kernel criterion, von Neumann sampling) round out
the toolkit; the ``annulus-dilation`` CLI exposes the main pipelines.
"""

from .calculus import (
    LaurentSeries,
    MatrixTuple,
    RationalFunction,
    eval_rational_matrix,
    eval_series_matrix,
    eval_series_scalar,
    laurent_coeffs,
    monomial,
    tail_bound,
    tuple_norms,
)
from .dilation import (
    BoundaryOVM,
    DC2Reduction,
    Dilation,
    NotConstructive,
    OvmComponent,
    VerificationReport,
    boundary_ovm,
    build_ar_unitaries,
    dc2_reduce,
    dilate_dc2,
    dilate_normal_tuple,
    naimark,
    verify_dilation,
)
from .errors import (
    AliasingError,
    AnnulusError,
    DomainError,
    MatrixPoleError,
    NotContractionError,
    NotDoublyCommutingError,
    PeakPointError,
    PositivityError,
    PreconditionError,
    RationalPoleError,
    ResourceLimitError,
    SingularityError,
    StructureError,
    TruncationOrderError,
)
from .geometry import (
    AnnulusParams,
    BoundaryAtom,
    PolyGrid,
    boundary_grid,
    classify_point,
    peak_function,
    poly_boundary_grid,
)
from .harmonic import (
    BoundaryData1D,
    DiscreteBoundaryMeasure,
    HarmonicFunction1D,
    eval_harmonic_1d,
    fourier_coeffs,
    harmonic_measure,
    radial_response,
    solve_dirichlet_1d,
)
from .polyharmonic import (
    BoundaryDataMD,
    DiscretePolyMeasure,
    HarmonicFunctionMD,
    SupNormReport,
    eval_md,
    moment,
    pushforward,
    solve_dirichlet_md,
    sup_norm_report,
)
from .spectral import (
    ArClassification,
    ArUnitaryDecomposition,
    MisraBound,
    SpectralDecomposition,
    VonNeumannReport,
    ar_unitary_decompose,
    classify_ar,
    involution_r_inverse,
    is_normal,
    joint_diagonalize,
    misra_bound,
    misra_check,
    monomial_box_functions,
    von_neumann_sample,
)

__version__ = "0.1.0"
