"""Lazy A* and Rational Lazy A* over two admissible heuristics."""

from .search import (
    Counters,
    NoSolution,
    OpenList,
    ResourceLimit,
    SearchNode,
    SearchResult,
    TieBreakRule,
    classify_nodes,
    solve,
)
from .strategies import (
    CostModel,
    Decision,
    EnhancementOptions,
    EvaluationStrategy,
    PhEstimator,
    Rule,
    Variant,
)

__all__ = [
    "CostModel", "Counters", "Decision", "EnhancementOptions", "EvaluationStrategy",
    "NoSolution", "OpenList", "PhEstimator", "ResourceLimit", "Rule", "SearchNode",
    "SearchResult", "TieBreakRule", "Variant", "classify_nodes", "solve",
]
