"""Fast structured QZ eigensolver for companion-like pencils."""

from .backward import (
    coefficient_deviations,
    expand_from_roots,
    measured_backward_error,
    pencil_perturbation_poly,
    predicted_backward_error_table,
)
from .compress import compress_pencil
from .dense import dense_eigenvalues, dense_qz_sweep
from .generators import (
    GivensRotation,
    PencilGenerators,
    Polynomial,
    QuasiseparableGenerators,
    TriangularGenerators,
    build_companion_pencil,
    diag_entries_A,
    make_givens,
    reconstruct_dense,
    trailing_block,
)
from .structured import (
    ConvergenceError,
    EigenResult,
    NumericalError,
    SweepScratch,
    deflation_scan,
    eigenvalues,
    qz_sweep,
    wilkinson_shift,
)

__all__ = [
    "ConvergenceError",
    "EigenResult",
    "GivensRotation",
    "NumericalError",
    "PencilGenerators",
    "Polynomial",
    "QuasiseparableGenerators",
    "SweepScratch",
    "TriangularGenerators",
    "build_companion_pencil",
    "coefficient_deviations",
    "compress_pencil",
    "deflation_scan",
    "dense_eigenvalues",
    "dense_qz_sweep",
    "diag_entries_A",
    "eigenvalues",
    "expand_from_roots",
    "make_givens",
    "measured_backward_error",
    "pencil_perturbation_poly",
    "predicted_backward_error_table",
    "qz_sweep",
    "reconstruct_dense",
    "trailing_block",
    "wilkinson_shift",
]

__version__ = "0.1.0"
