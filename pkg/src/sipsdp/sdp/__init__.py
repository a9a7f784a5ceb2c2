"""Semidefinite programming: data model, interior-point backend, SDPA files."""

from .ipm import solve, svec, smat
from .problem import (
    Key,
    LinearConstraint,
    SdpBuilder,
    SdpProblem,
    Settings,
    SolveReport,
)
from .sdpa import export_sdpa, import_sdpa

__all__ = [
    "Key",
    "LinearConstraint",
    "SdpBuilder",
    "SdpProblem",
    "Settings",
    "SolveReport",
    "export_sdpa",
    "import_sdpa",
    "smat",
    "solve",
    "svec",
]
