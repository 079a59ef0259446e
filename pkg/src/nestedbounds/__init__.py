"""Nested level-m second-order upper bounds on the probability of a union of events."""

from .bounds import LevelBounds, bound, bound_all_levels, bounds_for_orderings, line_deduction
from .conditions import (
    ConditionWitness,
    condition1,
    condition2_any,
    condition2_at,
    count_orderings_condition1,
)
from .matrix import (
    DeltaModel,
    ProbabilityMatrix,
    ValidationReport,
    generate_conditional_uniform,
    generate_delta,
    load_matrix,
    reorder,
    validate,
)
from .oracle import AtomSystem, atom_union_probability, project_second_order, random_system
from .search import SearchSummary, exhaustive_search, greedy_ordering, optimal_bound, summary_stats

__all__ = [
    "AtomSystem",
    "ConditionWitness",
    "DeltaModel",
    "LevelBounds",
    "ProbabilityMatrix",
    "SearchSummary",
    "ValidationReport",
    "atom_union_probability",
    "bound",
    "bound_all_levels",
    "bounds_for_orderings",
    "condition1",
    "condition2_any",
    "condition2_at",
    "count_orderings_condition1",
    "exhaustive_search",
    "generate_conditional_uniform",
    "generate_delta",
    "greedy_ordering",
    "line_deduction",
    "load_matrix",
    "optimal_bound",
    "project_second_order",
    "random_system",
    "reorder",
    "summary_stats",
    "validate",
]
