"""Weighted maximum-likelihood fitting of the risk-model shape ``theta``.

The log-likelihood is upper semi-continuous in ``theta`` and, between
consecutive distinct sample sizes of the data, either constant or smooth and
strictly concave. :func:`fit` exploits this: it evaluates every breakpoint,
runs a safeguarded Newton iteration inside each interval whose endpoint slopes
bracket a maximum, and keeps the best candidate.

Only per-sample-size sums are needed for this, and :class:`Dataset` keeps them
up to date as points are appended, so refitting after each new observation
costs O(number of distinct sample sizes) rather than O(number of points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np
from scipy.special import gammaln, psi, zeta

from .risk_model import log_pdf
from .specfun import DomainError, digamma, log_gamma

__all__ = [
    "DataPoint",
    "Dataset",
    "Candidate",
    "FitResult",
    "weighted_loglik",
    "fit",
    "asymptotic_loglik",
]

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
GUESS_MARGIN = 1e-6


@dataclass(frozen=True)
class DataPoint:
    v: float
    N: int
    w: float = 1.0

    def __post_init__(self):
        v = float(self.v)
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"risk must lie in [0, 1], got {self.v!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 0:
            raise DomainError(f"sample size must be a nonnegative integer, got {self.N!r}")
        w = float(self.w)
        if not (w > 0.0) or math.isinf(w):
            raise DomainError(f"weight must be finite and positive, got {self.w!r}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "w", w)


class Dataset:
    """Append-only collection of weighted (risk, sample size) observations."""

    def __init__(self, points: Iterable = ()):
        self._points: list[DataPoint] = []
        # N -> [sum w, sum w ln v, sum w ln(1-v), sum w v] over 0 < v < 1
        self._interior: dict[int, list[float]] = {}
        # N -> sum w over v == 1
        self._at_one: dict[int, float] = {}
        self._total_w = 0.0
        for p in points:
            self.append(p)

    def append(self, point) -> DataPoint:
        if not isinstance(point, DataPoint):
            point = DataPoint(*point)
        self._points.append(point)
        self._total_w += point.w
        if point.N > 0 and 0.0 < point.v < 1.0:
            acc = self._interior.setdefault(point.N, [0.0, 0.0, 0.0, 0.0])
            acc[0] += point.w
            acc[1] += point.w * math.log(point.v)
            acc[2] += point.w * math.log1p(-point.v)
            acc[3] += point.w * point.v
        elif point.N > 0 and point.v == 1.0:
            self._at_one[point.N] = self._at_one.get(point.N, 0.0) + point.w
        return point

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self) -> Iterator[DataPoint]:
        return iter(self._points)

    def __getitem__(self, i):
        return self._points[i]

    def __repr__(self) -> str:
        return f"Dataset({len(self)} points)"

    @property
    def points(self) -> tuple[DataPoint, ...]:
        return tuple(self._points)

    @property
    def weights(self) -> np.ndarray:
        return np.array([p.w for p in self._points])

    @property
    def total_weight(self) -> float:
        return self._total_w

    def _stats(self):
        if self._interior:
            keys = sorted(self._interior)
            table = np.array([self._interior[k] for k in keys])
            interior = (np.array(keys, dtype=float), *table.T)
        else:
            e = np.empty(0)
            interior = (e, e, e, e, e)
        if self._at_one:
            keys = sorted(self._at_one)
            ones = (np.array(keys, dtype=float), np.array([self._at_one[k] for k in keys]))
        else:
            ones = (np.empty(0), np.empty(0))
        return interior, ones


def _as_dataset(data) -> Dataset:
    return data if isinstance(data, Dataset) else Dataset(data)


def weighted_loglik(theta: float, data) -> float:
    """``sum_j w_j log f_theta(v_j, N_j) / sum_j w_j``, evaluated point by point."""
    data = _as_dataset(data)
    if len(data) == 0:
        raise ValueError("dataset is empty")
    total = 0.0
    for p in data:
        lp = log_pdf(theta, p.v, p.N)
        if lp == -math.inf:
            return -math.inf
        total += p.w * lp
    return total / data.total_weight


class Candidate(NamedTuple):
    theta: float
    loglik: float
    source: str  # "endpoint", "newton" or "bisection"
    iterations: int = 0


@dataclass
class FitResult:
    """Outcome of :func:`fit`.

    ``theta`` is ``None`` when the likelihood is flat over all of ``(0, inf)``
    (every observation has ``v == 0`` or ``N == 0``); callers must pick their
    own fallback then.
    """

    theta: float | None
    loglik: float
    candidates: tuple[Candidate, ...] = ()
    fallbacks: int = 0
    max_iter_hits: int = 0

    @property
    def is_flat(self) -> bool:
        return self.theta is None


class _Stats:
    def __init__(self, data: Dataset):
        (self.N, self.W, self.S1, self.S2, self.SV), (self.N1, self.W1) = data._stats()
        self.total_w = data.total_weight

    def loglik(self, thetas: np.ndarray) -> np.ndarray:
        """Weighted mean log-likelihood at each theta (vectorized over thetas)."""
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        out = np.zeros_like(thetas)
        if self.N.size:
            t = thetas[:, None]
            N = self.N[None, :]
            beta_branch = N > t
            # max() keeps the masked-out arguments inside gammaln's domain
            b = np.maximum(N - t + 1.0, 1.0)
            smooth = (
                (t - 1.0) * self.S1
                + (N - t) * self.S2
                - self.W * (gammaln(t) + gammaln(b) - gammaln(N + 1.0))
            )
            flat = self.W * np.log(N) + (N - 1.0) * self.S1
            out += np.where(beta_branch, smooth, flat).sum(axis=1)
        if self.N1.size:
            t = thetas[:, None]
            dead = (self.N1[None, :] > t).any(axis=1)
            out += (self.W1 * np.log(self.N1)).sum() * np.ones_like(thetas)
            out[dead] = -np.inf
        return out / self.total_w

    def endpoint_slopes(self, lo: np.ndarray, hi: np.ndarray):
        """Slopes at both ends of each interval ``(lo[k], hi[k])``.

        On interval k the smooth terms are the groups with ``N >= hi[k]``,
        a suffix of the sorted groups, so all slopes come from one
        digamma evaluation. Intervals with no smooth term get slope 0.
        """
        K = lo.size
        if K == 0 or self.N.size == 0:
            return np.zeros(K), np.zeros(K)
        mask = self.N[None, :] >= hi[:, None]  # (K, G)
        W = np.where(mask, self.W, 0.0)
        base = np.where(mask, self.S1 - self.S2, 0.0).sum(axis=1)
        wsum = W.sum(axis=1)
        thetas = np.concatenate([lo, hi])
        Wt = np.vstack([W, W])
        arg = np.where(Wt > 0.0, self.N[None, :] - thetas[:, None] + 1.0, 1.0)
        psi_theta = psi(np.where(thetas > 0.0, thetas, 1.0))
        slopes = np.concatenate([base, base]) - np.concatenate([wsum, wsum]) * psi_theta
        slopes += (Wt * psi(arg)).sum(axis=1)
        # the slope tends to +inf as theta -> 0 whenever a smooth term exists
        slopes[:K][(lo <= 0.0) & (wsum > 0.0)] = np.inf
        return slopes[:K], slopes[K:]

    def slope(self, theta: float, mask: np.ndarray) -> float:
        N, W = self.N[mask], self.W[mask]
        if theta <= 0.0:
            return math.inf
        g = (self.S1[mask] - self.S2[mask]).sum() - W.sum() * psi(theta) + (W * psi(N - theta + 1.0)).sum()
        return float(g)

    def curvature(self, theta: float, mask: np.ndarray) -> float:
        N, W = self.N[mask], self.W[mask]
        return float(-(W.sum() * zeta(2.0, theta) + (W * zeta(2.0, N - theta + 1.0)).sum()))

    def slope_curvature(self, theta: float, mask: np.ndarray) -> tuple[float, float]:
        """slope() and curvature() together, one digamma and one trigamma call."""
        N, W = self.N[mask], self.W[mask]
        arg = np.concatenate(([theta], N - theta + 1.0))
        ps, tg = psi(arg), zeta(2.0, arg)
        wsum = W.sum()
        g = (self.S1[mask] - self.S2[mask]).sum() - wsum * ps[0] + (W * ps[1:]).sum()
        h = -(wsum * tg[0] + (W * tg[1:]).sum())
        return float(g), float(h)

    def guess(self, mask: np.ndarray) -> float:
        W = self.W[mask]
        vbar = self.SV[mask].sum() / W.sum()
        nbar = (W * self.N[mask]).sum() / W.sum()
        return vbar * (nbar + 1.0)


def _maximize_interval(stats: _Stats, lo: float, hi: float, mask: np.ndarray):
    """Safeguarded Newton on the slope inside ``(lo, hi)``; slope(lo) > 0 > slope(hi)."""
    theta = min(max(stats.guess(mask), lo + GUESS_MARGIN), hi - GUESS_MARGIN)
    fallbacks = 0
    for it in range(1, NEWTON_MAX_ITER + 1):
        g, h = stats.slope_curvature(theta, mask)
        if g > 0.0:
            lo = theta
        elif g < 0.0:
            hi = theta
        else:
            return theta, it, fallbacks, False
        step = -g / h
        new = theta + step
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
            fallbacks += 1
        if abs(new - theta) <= NEWTON_TOL:
            return new, it, fallbacks, False
        theta = new
    return theta, NEWTON_MAX_ITER, fallbacks, True


def fit(data) -> FitResult:
    """Global maximizer of the weighted log-likelihood over ``theta > 0``.

    Among equal maxima the smallest ``theta`` is returned.
    """
    data = _as_dataset(data)
    if len(data) == 0:
        raise ValueError("cannot fit an empty dataset")
    stats = _Stats(data)
    if stats.N.size == 0 and stats.N1.size == 0:
        return FitResult(theta=None, loglik=0.0)

    lower = float(stats.N1.max()) if stats.N1.size else 0.0
    breaks = np.union1d(stats.N, stats.N1)
    edges = [lower] + [float(b) for b in breaks if b > lower]

    cand_thetas = [e for e in edges if e > 0.0]
    kinds = ["endpoint"] * len(cand_thetas)
    iters_used = [0] * len(cand_thetas)

    fallbacks = 0
    max_hits = 0
    lo_edges, hi_edges = np.array(edges[:-1]), np.array(edges[1:])
    lo_slope, hi_slope = stats.endpoint_slopes(lo_edges, hi_edges)
    for k in np.flatnonzero((lo_slope > 0.0) & (hi_slope < 0.0)):
        a, b = float(lo_edges[k]), float(hi_edges[k])
        mask = stats.N >= b
        theta, iters, fb, hit = _maximize_interval(stats, a, b, mask)
        fallbacks += fb
        max_hits += hit
        cand_thetas.append(theta)
        kinds.append("bisection" if fb else "newton")
        iters_used.append(iters)

    # one vectorized pass scores every endpoint and interior stationary point
    vals = stats.loglik(np.array(cand_thetas)) if cand_thetas else []
    candidates = [
        Candidate(t, float(v), kind, it)
        for t, v, kind, it in zip(cand_thetas, vals, kinds, iters_used)
    ]

    candidates.sort(key=lambda c: c.theta)
    best = candidates[0]
    for c in candidates[1:]:
        if c.loglik > best.loglik:
            best = c
    return FitResult(
        theta=float(best.theta),
        loglik=best.loglik,
        candidates=tuple(candidates),
        fallbacks=fallbacks,
        max_iter_hits=max_hits,
    )


def asymptotic_loglik(theta: float, theta_circ: float, N: int) -> float:
    """Limit of the mean log-likelihood for i.i.d. Beta(theta_circ, N - theta_circ + 1) risks."""
    if not theta > 0 or not theta_circ > 0:
        raise DomainError("theta and theta_circ must be positive")
    if N < theta_circ:
        raise DomainError(f"N={N} must be at least theta_circ={theta_circ}")
    tt = min(theta, N)
    return (
        (tt - 1.0) * digamma(theta_circ)
        + (N - tt) * digamma(N - theta_circ + 1.0)
        - log_gamma(tt)
        - log_gamma(N - tt + 1.0)
        + log_gamma(N + 1.0)
        - (N - 1.0) * digamma(N + 1.0)
    )
