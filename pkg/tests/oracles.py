"""Independent reference computations used by the tests.

Nothing here calls into the package's likelihood or sizing code; the
densities are written out again with scipy.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special, stats


def loglik_grid(thetas, v, N, w) -> np.ndarray:
    """Weighted mean log-likelihood of the extended Beta family at every theta."""
    thetas = np.asarray(thetas, dtype=float)[:, None]
    v = np.asarray(v, dtype=float)[None, :]
    N = np.asarray(N, dtype=float)[None, :]
    w = np.asarray(w, dtype=float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.maximum(N - thetas + 1.0, 1e-300)
        beta_branch = (
            special.xlogy(thetas - 1.0, v)
            + special.xlog1py(b - 1.0, -v)
            - special.betaln(thetas, b)
        )
        # at v=1 with N > theta the density is 0 since (1-v)^(N-theta) vanishes
        beta_branch = np.where(v == 1.0, -np.inf, beta_branch)
        top = np.log(N) + special.xlogy(N - 1.0, v)
    logf = np.where((v == 0.0) | (N == 0.0), 0.0, np.where(N > thetas, beta_branch, top))
    logf = np.where(np.isnan(logf), -np.inf, logf)
    with np.errstate(invalid="ignore"):
        total = (w * logf).sum(axis=1)
    return total / w.sum()


def grid_search_mle(v, N, w, step: float = 1e-5, coarse: float = 1e-2):
    """Exhaustive maximizer of the likelihood over ``(1e-4, max N + 5]``.

    Every interval between consecutive sample sizes is scanned at ``coarse``
    spacing and the best point is refined by factors of ten down to ``step``,
    each time scanning one coarse step either side. Within an interval the
    likelihood is concave, so this finds the same point as a full ``step``
    grid. All breakpoints are candidates too. Returns ``(theta, loglik)``,
    the smallest theta among ties, or ``(None, 0)`` if the likelihood is flat.
    """
    N = np.asarray(N, dtype=float)
    if _flat(v, N):
        return None, 0.0
    hi = float(N.max()) + 5.0
    breaks = sorted(set(float(n) for n in N if 1e-4 < n <= hi))
    edges = [1e-4] + breaks + [hi]
    thetas = list(breaks) + [hi]
    for a, b in zip(edges[:-1], edges[1:]):
        h = coarse
        g = np.arange(a, b, h)[1:]
        while g.size:
            vals = loglik_grid(g, v, N, w)
            if not np.isfinite(vals).any():
                break
            best = g[int(np.argmax(vals))]
            if h <= step * 1.0001:
                thetas.append(best)
                break
            lo, up = max(a, best - h), min(b, best + h)
            h /= 10.0
            g = np.arange(lo, up + h / 2, h)
            g = g[(g > a) & (g < b)]
    thetas = np.array(sorted(thetas))
    vals = loglik_grid(thetas, v, N, w)
    best = np.max(vals)
    k = int(np.flatnonzero(vals >= best)[0])
    return float(thetas[k]), float(best)


def _flat(v, N) -> bool:
    return all(x == 0.0 or n == 0 for x, n in zip(v, N))


def linear_scan_size(theta: float, eps: float, beta: float, n_max: int = 10**6) -> int:
    """Smallest N with confidence >= beta by scanning N = 1, 2, ...; capped at n_max."""
    for n in range(1, n_max + 1):
        if n <= theta:
            conf = eps**n
        else:
            conf = special.betainc(theta, n - theta + 1.0, eps)
        if conf >= beta:
            return n
    return n_max


def ks_statistic(samples, cdf) -> float:
    return float(stats.kstest(np.asarray(samples), cdf).statistic)


def binomial_tail(N: int, eps: float, d: int) -> float:
    return float(sum(math.comb(N, k) * eps**k * (1 - eps) ** (N - k) for k in range(d, N + 1)))


def random_dataset(rng: np.random.Generator):
    """Small mixed dataset: interior risks, exact zeros and ones, N in [1, 60]."""
    M = int(rng.integers(1, 51))
    N = rng.integers(1, 61, M)
    theta = rng.uniform(0.3, 10.0)
    v = np.empty(M)
    for j in range(M):
        u = rng.uniform()
        if u < 0.08:
            v[j] = 0.0
        elif u < 0.13 and N[j] <= 12:
            v[j] = 1.0
        else:
            a = min(theta, N[j] - 0.5) if N[j] > 1 else 0.7
            v[j] = rng.beta(a, N[j] - a + 1.0)
            v[j] = min(max(v[j], 1e-12), 1 - 1e-12)
    w = rng.choice([1.0, 1.0, 2.0, 0.5, 3.7], M)
    return v, N, w
