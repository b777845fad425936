"""Smallest sample size whose predicted confidence reaches ``beta``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .risk_model import cdf_at
from .specfun import DomainError

__all__ = ["SizerQuery", "optimal_sample_size", "DEFAULT_N_MAX"]

DEFAULT_N_MAX = 10**6


@dataclass(frozen=True)
class SizerQuery:
    theta: float
    epsilon: float
    beta: float
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if not (self.theta > 0.0) or math.isinf(self.theta):
            raise DomainError(f"theta must be finite and positive, got {self.theta!r}")
        if not (0.0 < self.epsilon < self.beta < 1.0):
            raise DomainError(
                f"need 0 < epsilon < beta < 1, got epsilon={self.epsilon!r}, beta={self.beta!r}"
            )
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be a positive integer, got {self.n_max!r}")


def optimal_sample_size(
    query: SizerQuery | float,
    epsilon: float | None = None,
    beta: float | None = None,
    n_max: int = DEFAULT_N_MAX,
    *,
    hint: int | None = None,
) -> int:
    """``min(N_hat, n_max)`` with ``N_hat = min{N : cdf_at(theta, epsilon, N) >= beta}``.

    Accepts either a :class:`SizerQuery` or ``(theta, epsilon, beta, n_max)``.

    For ``N <= theta`` the predicted confidence is ``epsilon**max(1, N) < beta``,
    so the search starts at ``floor(theta) + 1``, or at ``hint`` if given. A
    bracket is galloped outwards from the start until it straddles the
    threshold, then integer bisection finds the smallest qualifying ``N``;
    this relies on the confidence being non-decreasing in ``N``. The hint
    only changes the cost, never the answer.
    """
    if not isinstance(query, SizerQuery):
        query = SizerQuery(float(query), epsilon, beta, n_max)
    theta, eps, beta, n_max = query.theta, query.epsilon, query.beta, int(query.n_max)

    def ok(n: int) -> bool:
        return cdf_at(theta, eps, n) >= beta

    floor_n = math.floor(theta) + 1
    if floor_n >= n_max:
        return n_max
    start = floor_n if hint is None else min(max(int(hint), floor_n), n_max)

    if ok(start):
        # gallop down; invariant ok(hi)
        hi, step = start, 1
        while True:
            lo = hi - step
            if lo < floor_n:
                lo = floor_n - 1  # known to fail
                break
            if not ok(lo):
                break
            hi, step = lo, step * 2
    else:
        # gallop up; invariant not ok(lo)
        lo, step = start, 1
        while True:
            hi = lo + step
            if hi >= n_max:
                if not ok(n_max):
                    return n_max
                hi = n_max
                break
            if ok(hi):
                break
            lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
