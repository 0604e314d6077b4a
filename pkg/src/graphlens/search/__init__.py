"""Keyword search: answer-tree operations and the parallel engine."""

from .engine import (
    SearchResult,
    SearchStats,
    count_sources,
    rank_solutions,
    run_search,
)
from .trees import (
    PartialTree,
    Query,
    QueryContext,
    grow,
    is_solution,
    make_seed,
    merge,
)

__all__ = [
    "PartialTree",
    "Query",
    "QueryContext",
    "SearchResult",
    "SearchStats",
    "count_sources",
    "grow",
    "is_solution",
    "make_seed",
    "merge",
    "rank_solutions",
    "run_search",
]
