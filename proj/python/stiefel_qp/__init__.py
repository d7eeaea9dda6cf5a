"""Quadratic problems on the Stiefel manifold solved by generalized power iteration."""

from ._core import (
    InvalidInput,
    OlsrSolution,
    SolveReport,
    SolverError,
    UoppReport,
    balanced_procrustes,
    gen_instance,
    gpi_solve,
    grid_minimize,
    kkt_residual,
    objective,
    olsr_solve,
    polar_project,
    random_qpsm,
    uopp_solve,
)

__all__ = [
    "InvalidInput",
    "OlsrSolution",
    "SolveReport",
    "SolverError",
    "UoppReport",
    "balanced_procrustes",
    "gen_instance",
    "gpi_solve",
    "grid_minimize",
    "kkt_residual",
    "objective",
    "olsr_solve",
    "polar_project",
    "random_qpsm",
    "uopp_solve",
]
