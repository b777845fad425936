from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Solution", "ScenarioProblem", "FEASIBLE", "UNBOUNDED", "INFEASIBLE"]

FEASIBLE = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass
class Solution:
    """Decision returned by a scenario solver.

    ``x`` is ``None`` when the solver produced no decision (unbounded or
    infeasible); the controller then records the step with risk 1.
    """

    x: Any
    status: str = FEASIBLE
    objective: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == FEASIBLE and self.x is not None


class ScenarioProblem(ABC):
    """A sampler, a scenario solver and a risk oracle, possibly indexed by step ``t``.

    Scenarios are stored as numpy arrays, one row per sampled constraint.
    """

    name: str = "problem"
    #: number of sampled constraints the solver is allowed to leave violated
    discarded: int = 0

    @abstractmethod
    def sample_batch(self, rng: np.random.Generator, n: int, t: int = 1) -> np.ndarray:
        """Draw ``n`` i.i.d. constraints from the step-``t`` distribution."""

    def sample(self, rng: np.random.Generator, t: int = 1):
        return self.sample_batch(rng, 1, t)[0]

    @abstractmethod
    def solve(self, scenarios: np.ndarray, t: int = 1) -> Solution:
        """Deterministic scenario solution for the given constraints."""

    @abstractmethod
    def constraint_values(self, solution: Solution, scenarios: np.ndarray, t: int = 1) -> np.ndarray:
        """``g_i(x)`` for each scenario row; positive means violated."""

    def violated(self, solution: Solution, scenarios: np.ndarray, t: int = 1) -> np.ndarray:
        if not solution.ok:
            return np.ones(len(scenarios), dtype=bool)
        return self.constraint_values(solution, scenarios, t) > 0.0

    def exact_risk(self, solution: Solution, t: int = 1) -> float | None:
        """Exact violation probability, or ``None`` if not available in closed form."""
        return None
