"""Logic-based model reconciliation for explainable planning."""

from .logic import (
    KnowledgeBase,
    Model,
    entails_credulous,
    entails_skeptical,
    enumerate_models,
    is_consistent,
    parse_formula,
)
from .planning import PlanningProblem, bfs_optimal_plan, parse_problem
from .encoding import encode_bounded, solve_with_deepening
from .reconcile import check_plan_optimality, check_plan_validity, find_explanation, update_kb

__all__ = [
    "KnowledgeBase",
    "Model",
    "PlanningProblem",
    "bfs_optimal_plan",
    "check_plan_optimality",
    "check_plan_validity",
    "encode_bounded",
    "entails_credulous",
    "entails_skeptical",
    "enumerate_models",
    "find_explanation",
    "is_consistent",
    "parse_formula",
    "parse_problem",
    "solve_with_deepening",
    "update_kb",
]
