"""Semidefinite relaxations for convex semi-infinite polynomial programs.

Minimize a polynomial ``f(x)`` subject to ``p(x, y) >= 0`` for every ``y`` in a
basic semialgebraic index set, via moment and sum-of-squares hierarchies.
"""

from .io import ProblemFileError, load_problem, problem_from_dict, problem_to_dict, save_problem
from .moments import (
    Atom,
    ExtractionError,
    MomentVector,
    extract_atoms,
    flat_extension_check,
    localizing_matrix,
    moment_matrix,
)
from .poly import X, Y, Polynomial, Space, monomial_basis, perturbation_polynomial
from .preprocess import (
    discretization_oracle,
    extended_slater_check,
    homogenize_instance,
    slater_margin,
)
from .problem import PreconditionError, SipProblem
from .relax import (
    build_dsdp,
    build_lambda,
    build_psdp,
    build_relaxation,
    membership_sdp,
    run_hierarchy,
    solve_relaxation,
    support_value,
)
from .sdp import Settings, SolveReport, export_sdpa, import_sdpa, solve
from .sos import SolverError, eps_star, is_sos_convex, qmodule_membership, sos_decompose

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ExtractionError",
    "MomentVector",
    "Polynomial",
    "PreconditionError",
    "ProblemFileError",
    "Settings",
    "SipProblem",
    "SolveReport",
    "SolverError",
    "Space",
    "X",
    "Y",
    "build_dsdp",
    "build_lambda",
    "build_psdp",
    "build_relaxation",
    "discretization_oracle",
    "eps_star",
    "export_sdpa",
    "extended_slater_check",
    "extract_atoms",
    "flat_extension_check",
    "homogenize_instance",
    "import_sdpa",
    "is_sos_convex",
    "load_problem",
    "localizing_matrix",
    "membership_sdp",
    "moment_matrix",
    "monomial_basis",
    "perturbation_polynomial",
    "problem_from_dict",
    "problem_to_dict",
    "qmodule_membership",
    "run_hierarchy",
    "save_problem",
    "slater_margin",
    "solve",
    "solve_relaxation",
    "sos_decompose",
    "support_value",
]
