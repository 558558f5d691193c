"""Tensor-product Bezier patches with prescribed diagonal curves.

Extraction of the two diagonal curves of a square patch, the parity
admissibility conditions a prescribed pair must satisfy, repair strategies
for pairs that violate them, and exact affine solution spaces of nets
realizing a prescription (diagonals alone, with the boundary, or with the
boundary and its adjacent rings).
"""

from .bezier import (
    ControlNet,
    CurvePolygon,
    bernstein,
    binomial,
    bounding_box_diagonal,
    degree_elevate,
    eval_curve,
    eval_surface,
)
from .diagonals import (
    DEFAULT_TOL,
    CompatibilityReport,
    DiagonalPair,
    anti_diagonal_sum,
    check_compatibility,
    default_repair_mode,
    extract_diagonals,
    main_diagonal_sum,
    midpoint_gap,
    project_to_admissible,
    repair,
    repair_by_elevation,
    repair_central,
    sign_flip,
)
from .formats import Document, DocumentError, export_mesh, read_document, write_document
from .solver import (
    BoundaryData,
    C1BoundaryData,
    ConstraintSystem,
    CornerMismatchError,
    InadmissiblePairError,
    InconsistentSystemError,
    ModeDegreeError,
    Prescription,
    PrescriptionMode,
    RingMismatchError,
    SolutionSpace,
    SolverError,
    SpaceDimension,
    build_system,
    dimension_formula,
    fill_free,
    realize,
    solve_prescription,
    solve_space,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ControlNet",
    "CurvePolygon",
    "binomial",
    "bernstein",
    "eval_curve",
    "eval_surface",
    "degree_elevate",
    "bounding_box_diagonal",
    "DEFAULT_TOL",
    "DiagonalPair",
    "CompatibilityReport",
    "main_diagonal_sum",
    "anti_diagonal_sum",
    "extract_diagonals",
    "midpoint_gap",
    "sign_flip",
    "check_compatibility",
    "repair_central",
    "repair_by_elevation",
    "project_to_admissible",
    "repair",
    "default_repair_mode",
    "PrescriptionMode",
    "BoundaryData",
    "C1BoundaryData",
    "Prescription",
    "ConstraintSystem",
    "SolutionSpace",
    "SpaceDimension",
    "SolverError",
    "ModeDegreeError",
    "InadmissiblePairError",
    "CornerMismatchError",
    "RingMismatchError",
    "InconsistentSystemError",
    "build_system",
    "solve_space",
    "solve_prescription",
    "realize",
    "fill_free",
    "dimension_formula",
    "Document",
    "DocumentError",
    "read_document",
    "write_document",
    "export_mesh",
]
