"""Benchmark scenario problems with known (or exactly computable) risk."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import INFEASIBLE, UNBOUNDED, ScenarioProblem, Solution
from .lp import LpProblem, solve_lp

__all__ = [
    "SyntheticBetaProblem",
    "HalfLineProblem",
    "GaussianLpProblem",
    "MaxCoordinateProblem",
    "UniformDistribution",
    "AtomMixture",
    "synthetic_beta_problem",
    "half_line_problem",
    "gaussian_lp_problem",
    "max_coordinate_problem",
]


def _normal_sf(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


class SyntheticBetaProblem(ScenarioProblem):
    """Fixed-complexity problem whose risk is exactly Beta(d, N - d + 1).

    Scenarios are U(0, 1) thresholds ``u`` with constraint ``x >= u``. The
    solver takes the ``d``-th largest threshold, i.e. it discards the top
    ``d - 1`` scenarios. The risk ``P[u > x] = 1 - x`` is then distributed as
    Beta(d, N - d + 1) by the order-statistics law, and the top-``d`` subset
    determines the solution uniquely. With fewer than ``d`` scenarios
    ``x = 0`` and the risk is exactly one.
    """

    name = "synthetic_beta"

    def __init__(self, d: int):
        if int(d) != d or d < 1:
            raise ValueError(f"d must be a positive integer, got {d!r}")
        self.d = int(d)
        self.discarded = self.d - 1

    def sample_batch(self, rng, n, t=1):
        return rng.random(n)

    def solve(self, scenarios, t=1):
        u = np.asarray(scenarios, dtype=float)
        if u.size < self.d:
            return Solution(x=0.0, objective=0.0, meta={"n": int(u.size)})
        x = float(np.partition(u, u.size - self.d)[u.size - self.d])
        return Solution(x=x, objective=x, meta={"n": int(u.size)})

    def constraint_values(self, solution, scenarios, t=1):
        return np.asarray(scenarios, dtype=float) - solution.x

    def exact_risk(self, solution, t=1):
        return 1.0 - solution.x


class HalfLineProblem(ScenarioProblem):
    """``min x  s.t.  x >= u``, ``u ~ Normal(mu, sigma^2)``; complexity 1."""

    name = "half_line"

    def __init__(self, mu: float = 1.0, sigma: float = math.sqrt(2.0)):
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def sample_batch(self, rng, n, t=1):
        return self.mu + self.sigma * rng.standard_normal(n)

    def solve(self, scenarios, t=1):
        u = np.asarray(scenarios, dtype=float)
        if u.size == 0:
            raise ValueError("half-line problem needs at least one scenario")
        x = float(u.max())
        return Solution(x=x, objective=x)

    def constraint_values(self, solution, scenarios, t=1):
        return np.asarray(scenarios, dtype=float) - solution.x

    def exact_risk(self, solution, t=1):
        if not solution.ok:
            return 1.0
        return _normal_sf((solution.x - self.mu) / self.sigma)


class GaussianLpProblem(ScenarioProblem):
    """``min sum(x)  s.t.  u.x <= 1``, ``u ~ Normal(0, I)``; complexity ``dim``.

    With fewer than ``dim`` scenarios (and, with small probability, somewhat
    more) the LP is unbounded; such steps come back with ``status="unbounded"``.
    """

    name = "gaussian_lp"

    def __init__(self, dim: int = 20):
        if int(dim) != dim or dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = int(dim)

    def sample_batch(self, rng, n, t=1):
        return rng.standard_normal((n, self.dim))

    def solve(self, scenarios, t=1):
        U = np.asarray(scenarios, dtype=float).reshape(-1, self.dim)
        res = solve_lp(LpProblem(np.ones(self.dim), U, np.ones(len(U))))
        if res.status == "unbounded":
            return Solution(x=None, status=UNBOUNDED, meta={"pivots": res.pivots})
        if res.status == "infeasible":
            return Solution(x=None, status=INFEASIBLE, meta={"pivots": res.pivots})
        return Solution(
            x=res.x,
            objective=res.objective,
            meta={"pivots": res.pivots, "active": res.active},
        )

    def constraint_values(self, solution, scenarios, t=1):
        U = np.asarray(scenarios, dtype=float).reshape(-1, self.dim)
        return U @ solution.x - 1.0

    def exact_risk(self, solution, t=1):
        # u.x ~ Normal(0, |x|^2)
        if not solution.ok:
            return 1.0
        norm = float(np.linalg.norm(solution.x))
        if norm == 0.0:
            return 0.0
        return _normal_sf(1.0 / norm)


@dataclass(frozen=True)
class UniformDistribution:
    low: float = 0.0
    high: float = 1.0

    def sample(self, rng, n):
        return rng.uniform(self.low, self.high, n)

    def sf(self, m: float) -> float:
        """``P[u > m]``."""
        return min(1.0, max(0.0, (self.high - m) / (self.high - self.low)))


@dataclass(frozen=True)
class AtomMixture:
    """Point mass ``atom`` with probability ``mass``, otherwise ``base``.

    The defaults put a sizable atom just below the top of the uniform base.
    Whenever the maximum lands on it the risk is tiny but nonzero, which drags
    the fitted ``theta`` (and hence ``N``) below what the continuous part
    needs, so the long-run frequency of ``risk <= 0.1`` falls short of 0.9.
    """

    atom: float = 0.99
    mass: float = 0.1
    base: UniformDistribution = UniformDistribution()

    def sample(self, rng, n):
        hit = rng.random(n) < self.mass
        draws = self.base.sample(rng, n)
        return np.where(hit, self.atom, draws)

    def sf(self, m: float) -> float:
        return self.mass * (self.atom > m) + (1.0 - self.mass) * self.base.sf(m)


class MaxCoordinateProblem(ScenarioProblem):
    """``min sum(x)  s.t.  min_i x_i >= u`` over ``x`` in R^dim.

    The solution is ``max(u) * ones``; its risk is ``P[u > max(u)]`` under
    ``dist`` (strict inequality, so an atom at the maximum is not a violation).
    """

    name = "max_coordinate"

    def __init__(self, dim: int = 400, dist=None):
        self.dim = int(dim)
        self.dist = dist if dist is not None else UniformDistribution()

    def sample_batch(self, rng, n, t=1):
        return self.dist.sample(rng, n)

    def solve(self, scenarios, t=1):
        u = np.asarray(scenarios, dtype=float)
        if u.size == 0:
            raise ValueError("max-coordinate problem needs at least one scenario")
        m = float(u.max())
        return Solution(x=np.full(self.dim, m), objective=m * self.dim)

    def constraint_values(self, solution, scenarios, t=1):
        return np.asarray(scenarios, dtype=float) - float(np.min(solution.x))

    def exact_risk(self, solution, t=1):
        if not solution.ok:
            return 1.0
        return float(self.dist.sf(float(np.min(solution.x))))


def synthetic_beta_problem(d: int) -> SyntheticBetaProblem:
    return SyntheticBetaProblem(d)


def half_line_problem(mu: float = 1.0, sigma: float = math.sqrt(2.0)) -> HalfLineProblem:
    return HalfLineProblem(mu, sigma)


def gaussian_lp_problem(dim: int = 20) -> GaussianLpProblem:
    return GaussianLpProblem(dim)


def max_coordinate_problem(dim: int = 400, dist=None) -> MaxCoordinateProblem:
    return MaxCoordinateProblem(dim, dist)
