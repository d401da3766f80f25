"""
Geometric coherence and geometric entanglement of quantum states.

The measures are computed by maximizing the Uhlmann fidelity over a convex
set of free states with a self-contained semidefinite-programming solver;
closed-form values and bounds for checking them live alongside.
"""

from .errors import (
    BadParameter,
    DimensionMismatch,
    GeoMeasuresError,
    InconsistentConstraints,
    NoConvergence,
    NonHermitian,
    NotPsd,
    ParseError,
    SolverError,
    ValidationError,
)
from .linalg import DensityMatrix, PureState, eigh, kron, partial_transpose, sqrt_psd
from .measures import (
    DiagonalIncoherent,
    Fixed,
    MeasureResult,
    PptBipartite,
    coherence_bounds,
    coherence_mcms_analytic,
    coherence_pure_analytic,
    coherence_qubit_analytic,
    concurrence,
    fidelity_direct,
    fidelity_pure,
    fidelity_sdp,
    geometric_coherence,
    gme_ppt,
    gme_pure_product_oracle,
    gme_two_qubit_analytic,
    werner_gme_analytic,
)
from .sdp import SdpProblem, SdpSolution, SolverConfig, Status, solve
from .states import (
    StateFamilySpec,
    make_isotropic,
    make_mcms,
    make_werner,
    random_ginibre_density,
    random_pure,
)

__version__ = "0.1.0"
