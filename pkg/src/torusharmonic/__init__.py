"""Harmonic embeddings of weighted graphs on the torus.

Given a cell decomposition of the torus with (possibly signed) edge weights,
find the flat unit-area torus on which the weighted Dirichlet energy of a
straight-line realization is smallest, the minimizing map itself, and its
reciprocal diagram on the dual complex.
"""

from .embedding import (
    DelaunayReport,
    DualEmbedding,
    TorusEmbedding,
    conjugate_defect,
    conjugate_embedding,
    delaunay_report,
    dirichlet_energy,
    harmonic_embedding,
)
from .errors import (
    BoundaryEscapeError,
    ConsistencyError,
    DegenerateWeightsError,
    InvalidComplexError,
    NotClosedError,
    ParseError,
    ResponseMatrixError,
    SideMismatchError,
    TorusError,
)
from .forms import (
    OneForm,
    PeriodPair,
    bracket,
    exterior_derivative,
    hodge_star,
    integrate,
    is_closed,
    is_coclosed,
    is_exact,
    label_form,
    pairing,
    periods,
)
from .moduli import (
    J,
    Modulus,
    OptimalStructure,
    ResponseMatrix,
    conjugate_periods,
    energy_at,
    extract_modulus,
    optimal_structure,
    proportionality_defect,
    response_matrix,
    schur_complement,
)
from .oracle import OracleResult, minimize_energy, random_instance
from .solver import (
    OperatorBundle,
    build_operators,
    check_nondegenerate,
    det0,
    det_ratio_routes,
    harmonic_form,
    k_from_det_ratio,
    require_nondegenerate,
)
from .topology import (
    DualComplex,
    EdgeWeights,
    ToroidalComplex,
    ValidationReport,
    complex_from_dict,
    complex_to_dict,
    load_json,
    one_vertex_triangulation,
    square_grid,
    triangulated_grid,
    validate_complex,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
