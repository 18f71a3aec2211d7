"""Correct-cascade probabilities, simulation and budget allocation for
sequential Bayesian observational learning with a binary asymmetric channel."""

from ._backend import BACKEND
from .analytic import (
    CascadeProbabilities,
    Mode,
    pcc,
    rational_census,
    rational_gap,
    solve_p2_for_a,
    ycas_irrational,
    ycas_rational,
)
from .core import (
    Action,
    CascadeConstant,
    SignalQualities,
    Status,
    TruthState,
    WalkState,
    cascade_constant,
    classify_rationality,
    k_index,
    region_of,
    step,
    validate_qualities,
)
from .optimize import BudgetProblem, grid_search, monotonicity_check, optimize
from .simulate import estimate, estimate_pcc, simulate_path

__version__ = "0.1.0"
