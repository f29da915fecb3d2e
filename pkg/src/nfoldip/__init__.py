"""Exact n-fold integer programming via Graver-best augmentation.

The package solves min { f(x) : A x = b, l <= x <= u, x integer } where
A is the n-fold product of a fixed bimatrix and f is linear or separable
convex piecewise affine.  The augmentation engine finds Graver-best
steps through a layered dynamic program over a finite state set of
bottom-block Graver sums, so each improving step is found in time
quadratic in n and the whole solve stays polynomial.

Modules: matrices (exact types), graver (bases and complexity),
statespace (DP state sets), dp (the layered dynamic program), solver
(two-phase solve and certification), models (transportation and table
applications), oracle (independent brute-force references), cli, jsonio.
"""

from .errors import (
    InputError,
    IterationLimitError,
    NFoldError,
    ResourceLimitError,
)
from .matrices import Bimatrix, IntegerMatrix
from .graver import (
    GraverBasis,
    graver_basis,
    graver_complexity,
    kernel_lattice_basis,
    n_fold_product,
)
from .statespace import StateSpace, TerminalStates, build_state_space, terminal_states
from .objective import EvaluatorObjective, LinearObjective, PiecewiseObjective
from .dp import (
    DpResult,
    DpStats,
    GraverBestStep,
    critical_step_sizes,
    graver_best_step,
    solve_dp,
)
from .solver import (
    Certificate,
    NFoldInstance,
    SolveReport,
    augment_to_optimal,
    certify_optimal,
    find_feasible,
    solve,
    state_space_for,
)
from .models import (
    TableInstance,
    TransportationInstance,
    entry_bounds,
    entry_value_range,
    table_to_nfold,
    transportation_to_nfold,
    universal_bimatrix,
)

__version__ = "0.1.0"

__all__ = [
    "Bimatrix", "Certificate", "DpResult", "DpStats", "EvaluatorObjective",
    "GraverBasis", "GraverBestStep", "InputError", "IntegerMatrix",
    "IterationLimitError", "LinearObjective", "NFoldError", "NFoldInstance",
    "PiecewiseObjective", "ResourceLimitError", "SolveReport", "StateSpace",
    "TableInstance", "TerminalStates", "TransportationInstance",
    "augment_to_optimal", "build_state_space", "certify_optimal",
    "critical_step_sizes", "entry_bounds", "entry_value_range",
    "find_feasible", "graver_basis", "graver_best_step", "graver_complexity",
    "kernel_lattice_basis", "n_fold_product", "solve", "solve_dp",
    "state_space_for", "table_to_nfold", "terminal_states",
    "transportation_to_nfold", "universal_bimatrix",
]
