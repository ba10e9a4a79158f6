"""Exact minimal Laplace transform of parabolic connections on P^1."""

from .connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    dmodule_degrees,
    extend_filtration,
    parabolic_degree,
    slope_of_subdata,
    validate_admissible,
    validate_resonance_free,
)
from .documents import DocumentError, load_connection, parse_connection
from .exact import GaussianRational, Poly, RationalFunction, laurent_coefficients
from .laplace import (
    build_model,
    fiber_cokernel,
    formal_data_at_infinity,
    inverse_transform,
    reduce_section,
    residue_data_at,
    transform_connection,
)
from .linalg import Matrix, kernel_basis, solve_linear
from .sections import MeromorphicSection
from .stationary import harvest, predict, verify_involution, verify_stationary_phase

__all__ = [
    "EigenDatum",
    "InvalidConnectionError",
    "IrregularData",
    "ParabolicConnection",
    "RegularSingularity",
    "dmodule_degrees",
    "extend_filtration",
    "parabolic_degree",
    "slope_of_subdata",
    "validate_admissible",
    "validate_resonance_free",
    "DocumentError",
    "load_connection",
    "parse_connection",
    "GaussianRational",
    "Poly",
    "RationalFunction",
    "laurent_coefficients",
    "build_model",
    "fiber_cokernel",
    "formal_data_at_infinity",
    "inverse_transform",
    "reduce_section",
    "residue_data_at",
    "transform_connection",
    "Matrix",
    "kernel_basis",
    "solve_linear",
    "MeromorphicSection",
    "harvest",
    "predict",
    "verify_involution",
    "verify_stationary_phase",
]
