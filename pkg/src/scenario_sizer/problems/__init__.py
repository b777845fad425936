"""Scenario problems: samplers, solvers and risk oracles."""

from .base import FEASIBLE, INFEASIBLE, UNBOUNDED, ScenarioProblem, Solution
from .benchmarks import (
    AtomMixture,
    GaussianLpProblem,
    HalfLineProblem,
    MaxCoordinateProblem,
    SyntheticBetaProblem,
    UniformDistribution,
    gaussian_lp_problem,
    half_line_problem,
    max_coordinate_problem,
    synthetic_beta_problem,
)
from .lp import LpProblem, LpResult, solve_lp
from .path_planning import PathConfig, PathPlanningProblem, obstacle_values, path_planning_problem

__all__ = [
    "AtomMixture",
    "FEASIBLE",
    "GaussianLpProblem",
    "HalfLineProblem",
    "INFEASIBLE",
    "LpProblem",
    "LpResult",
    "MaxCoordinateProblem",
    "PathConfig",
    "PathPlanningProblem",
    "ScenarioProblem",
    "Solution",
    "SyntheticBetaProblem",
    "UNBOUNDED",
    "UniformDistribution",
    "gaussian_lp_problem",
    "half_line_problem",
    "max_coordinate_problem",
    "obstacle_values",
    "path_planning_problem",
    "solve_lp",
    "synthetic_beta_problem",
]
