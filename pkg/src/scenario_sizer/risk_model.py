"""Extended Beta family for the risk of a scenario solution.

For sample size ``N`` and shape ``theta`` the density on ``v in [0, 1]`` is::

    1                                            if v == 0 or N == 0
    v**(theta-1) (1-v)**(N-theta) / B(theta, N-theta+1)   if v != 0 and N > theta
    N v**(N-1)                                   otherwise

so that for ``N > theta`` it is the Beta(theta, N - theta + 1) density, and
for ``N <= theta`` the mass piles up at ``v = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .specfun import DomainError, log_beta, reg_inc_beta

__all__ = ["BetaRiskModel", "pdf", "log_pdf", "cdf_at"]


@dataclass(frozen=True)
class BetaRiskModel:
    theta: float

    def __post_init__(self):
        t = float(self.theta)
        if not (t > 0.0) or math.isinf(t):
            raise DomainError(f"theta must be finite and positive, got {self.theta!r}")
        object.__setattr__(self, "theta", t)

    def pdf(self, v: float, N: int) -> float:
        return pdf(self, v, N)

    def log_pdf(self, v: float, N: int) -> float:
        return log_pdf(self, v, N)

    def cdf_at(self, epsilon: float, N: int) -> float:
        return cdf_at(self, epsilon, N)


def _theta(model) -> float:
    if isinstance(model, BetaRiskModel):
        return model.theta
    return BetaRiskModel(model).theta


def _check_v(v: float) -> float:
    v = float(v)
    if not (0.0 <= v <= 1.0):
        raise DomainError(f"risk value must lie in [0, 1], got {v!r}")
    return v


def _check_n(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 0:
        raise DomainError(f"sample size must be a nonnegative integer, got {N!r}")
    return int(N)


def log_pdf(model, v: float, N: int) -> float:
    """Log-density; ``-inf`` exactly where the density vanishes.

    ``model`` may be a :class:`BetaRiskModel` or a bare positive ``theta``.
    """
    theta = _theta(model)
    v = _check_v(v)
    N = _check_n(N)
    if v == 0.0 or N == 0:
        return 0.0
    if N > theta:
        if v == 1.0:
            return -math.inf
        return (
            (theta - 1.0) * math.log(v)
            + (N - theta) * math.log1p(-v)
            - log_beta(theta, N - theta + 1.0)
        )
    if v == 1.0:
        return math.log(N)
    return math.log(N) + (N - 1) * math.log(v)


def pdf(model, v: float, N: int) -> float:
    theta = _theta(model)
    v = _check_v(v)
    N = _check_n(N)
    if v == 0.0 or N == 0:
        return 1.0
    if N > theta:
        return math.exp(log_pdf(theta, v, N))
    return N * v ** (N - 1)


def cdf_at(model, epsilon: float, N: int) -> float:
    """Probability mass of ``[0, epsilon]`` under the density for sample size ``N``."""
    theta = _theta(model)
    epsilon = _check_v(epsilon)
    N = _check_n(N)
    if N == 0:
        return epsilon
    if N <= theta:
        return epsilon**N
    return reg_inc_beta(epsilon, theta, N - theta + 1.0)
