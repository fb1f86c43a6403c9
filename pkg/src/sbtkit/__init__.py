"""Sorting by transpositions: 3DT-instances, gadget assemblings and the SAT reduction."""

from .emit import EmittedPermutation, Layout, check_emission, compute_layout, emit_permutation, is_three_permutation
from .errors import BudgetExhausted, FormatError, SbtError
from .gadgets import Assembling, BlockSpec, activation_orders, assemble, behavior_graph, make_harness
from .perm import (
    Permutation,
    Transposition,
    apply_transposition,
    breakpoint_count,
    breakpoint_lower_bound,
    breakpoints,
    three_bp_moves,
)
from .reduction import (
    Assignment,
    CnfFormula,
    ReductionOutput,
    dpll,
    extract_assignment,
    guided_collapse,
    normalize,
    reduce,
)
from .search import (
    SearchConfig,
    SearchStats,
    StepTrace,
    bfs_distance_oracle,
    collapse_search,
    db3_sort_decision,
    exact_distance,
)
from .tdt import TdtInstance, Triple, apply_step, enabled_triples, is_equivalent, step_transposition

__version__ = "0.1.0"

__all__ = [
    "activation_orders",
    "apply_step",
    "apply_transposition",
    "assemble",
    "Assembling",
    "Assignment",
    "behavior_graph",
    "bfs_distance_oracle",
    "BlockSpec",
    "breakpoint_count",
    "breakpoint_lower_bound",
    "breakpoints",
    "BudgetExhausted",
    "check_emission",
    "CnfFormula",
    "collapse_search",
    "compute_layout",
    "db3_sort_decision",
    "dpll",
    "emit_permutation",
    "EmittedPermutation",
    "enabled_triples",
    "exact_distance",
    "extract_assignment",
    "FormatError",
    "guided_collapse",
    "is_equivalent",
    "is_three_permutation",
    "Layout",
    "make_harness",
    "normalize",
    "Permutation",
    "reduce",
    "ReductionOutput",
    "SbtError",
    "SearchConfig",
    "SearchStats",
    "step_transposition",
    "StepTrace",
    "TdtInstance",
    "three_bp_moves",
    "Transposition",
    "Triple",
]
