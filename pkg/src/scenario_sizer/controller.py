"""Closed-loop repetitive scenario design.

Each step draws ``N_t`` scenarios, solves, measures the risk of the solution
(exactly or with a Bernoulli test), appends ``(risk, N_t, weight)`` to the
dataset, refits ``theta`` and sets the next sample size to the sizer's answer
clamped at ``n_max``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .mle import DataPoint, Dataset, FitResult, fit
from .problems.base import ScenarioProblem, Solution
from .sizer import DEFAULT_N_MAX, SizerQuery, optimal_sample_size

__all__ = [
    "ControllerConfig",
    "ControllerState",
    "TraceRecord",
    "step",
    "run",
    "bernoulli_risk",
    "hoeffding_confidence",
    "empirical_frequency",
]

log = logging.getLogger(__name__)

UNIFORM = "uniform"
LINEAR = "linear"
EXACT = "exact"
BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class ControllerConfig:
    epsilon: float = 0.1
    beta: float = 0.9
    n_initial: int = 1
    n_max: int = DEFAULT_N_MAX
    weighting: str = UNIFORM
    risk_mode: str = EXACT
    #: number of fresh samples for the Bernoulli risk test
    bernoulli_samples: int = 10_000

    def __post_init__(self):
        if not (0.0 < self.epsilon < self.beta < 1.0):
            raise ValueError(
                f"need 0 < epsilon < beta < 1, got {self.epsilon!r}, {self.beta!r}"
            )
        if int(self.n_initial) != self.n_initial or not (1 <= self.n_initial <= self.n_max):
            raise ValueError(f"need 1 <= n_initial <= n_max, got {self.n_initial}, {self.n_max}")
        if self.weighting not in (UNIFORM, LINEAR):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.risk_mode not in (EXACT, BERNOULLI):
            raise ValueError(f"unknown risk mode {self.risk_mode!r}")
        if self.bernoulli_samples < 1:
            raise ValueError("bernoulli_samples must be positive")


@dataclass
class ControllerState:
    dataset: Dataset = field(default_factory=Dataset)
    fit: FitResult | None = None
    n_next: int = 1
    step: int = 0

    @classmethod
    def initial(cls, config: ControllerConfig) -> "ControllerState":
        return cls(n_next=int(config.n_initial))

    @property
    def theta(self) -> float | None:
        return None if self.fit is None else self.fit.theta


@dataclass(frozen=True)
class TraceRecord:
    t: int
    N: int
    theta: float | None
    risk: float
    violation: bool
    solver_status: str
    elapsed: float  # seconds


def hoeffding_confidence(S: int, eta: float) -> float:
    """Upper bound ``2 exp(-2 eta^2 S)`` on ``P[|empirical risk - risk| > eta]``."""
    if S < 1 or not eta > 0:
        raise ValueError("need S >= 1 and eta > 0")
    return 2.0 * math.exp(-2.0 * eta * eta * S)


def bernoulli_risk(
    problem: ScenarioProblem,
    solution: Solution,
    t: int,
    S: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of ``S`` fresh scenarios violated by ``solution``."""
    if S < 1:
        raise ValueError("S must be positive")
    fresh = problem.sample_batch(rng, S, t)
    return float(np.mean(problem.violated(solution, fresh, t)))


def _risk(problem, solution, t, config, rng) -> float:
    if not solution.ok:
        return 1.0
    if config.risk_mode == EXACT:
        v = problem.exact_risk(solution, t)
        if v is not None:
            return float(v)
    return bernoulli_risk(problem, solution, t, config.bernoulli_samples, rng)


def step(
    state: ControllerState,
    problem: ScenarioProblem,
    config: ControllerConfig,
    rng: np.random.Generator,
) -> tuple[ControllerState, TraceRecord]:
    """One iteration of the loop. ``state`` is updated in place and returned."""
    t = state.step + 1
    N = state.n_next
    start = time.perf_counter()

    scenarios = problem.sample_batch(rng, N, t)
    try:
        solution = problem.solve(scenarios, t)
    except Exception as exc:  # a failed solve is a maximal-risk step, not an abort
        log.warning("solver failed at step %d: %s", t, exc)
        solution = Solution(x=None, status="error")
    v = _risk(problem, solution, t, config, rng)

    w = float(t) if config.weighting == LINEAR else 1.0
    state.dataset.append(DataPoint(v, N, w))
    result = fit(state.dataset)
    state.fit = result
    if result.is_flat:
        n_next = N
    else:
        n_next = optimal_sample_size(
            SizerQuery(result.theta, config.epsilon, config.beta, config.n_max), hint=N
        )
    state.n_next = n_next
    state.step = t

    record = TraceRecord(
        t=t,
        N=N,
        theta=result.theta,
        risk=v,
        violation=v > config.epsilon,
        solver_status=solution.status,
        elapsed=time.perf_counter() - start,
    )
    log.debug("t=%d N=%d theta=%s risk=%.6g", t, N, result.theta, v)
    return state, record


def run(
    problem: ScenarioProblem,
    config: ControllerConfig,
    T: int,
    seed: int | np.random.Generator | None = 0,
) -> list[TraceRecord]:
    """Run ``T`` steps from a fresh state; deterministic for a given integer seed."""
    if T < 1:
        raise ValueError("T must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    state = ControllerState.initial(config)
    trace = []
    for _ in range(T):
        state, rec = step(state, problem, config, rng)
        trace.append(rec)
    return trace


def empirical_frequency(trace, epsilon: float) -> float:
    """Fraction of steps whose risk is at most ``epsilon``."""
    if not trace:
        return float("nan")
    return sum(r.risk <= epsilon for r in trace) / len(trace)
