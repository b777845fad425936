"""Viapoint path planning among randomly placed square obstacles.

A path is ``H`` viapoints in the box ``[0, 5] x [0, 3]`` starting next to the
source, with consecutive spacing at most ``delta``; the objective is the
distance from the last viapoint to the target. Each scenario is a pair of
axis-aligned unit squares (lower and upper obstacle) centred at
``(xc(t), y - offset)`` and ``(xc(t), y + offset)`` with ``y`` Gaussian. A
viapoint collides with a square when its L-infinity distance to the centre is
below one half.

The solver is a heuristic:

1. occupancy grid (nodes strictly inside any sampled square are blocked),
   8-connected, no corner cutting;
2. Dijkstra from the source (scipy's C implementation);
3. goal = reachable node closest to the target within the length budget
   ``H * delta``;
4. greedy string pulling with exact segment/square tests;
5. arc-length resampling into ``H`` viapoints, truncated at the budget.

Every viapoint is re-checked against every scenario; on failure the grid is
refined once before the step is reported infeasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .base import INFEASIBLE, ScenarioProblem, Solution

__all__ = ["PathConfig", "PathPlanningProblem", "path_planning_problem", "obstacle_values"]

_SQRT2 = math.sqrt(2.0)
# octile paths are at most this much longer than the straight line
_OCTILE_FACTOR = math.sqrt(4.0 - 2.0 * _SQRT2)
_HALF = 0.5


@dataclass(frozen=True)
class PathConfig:
    horizon: int = 100
    delta: float = 0.045
    box: tuple[float, float, float, float] = (0.0, 5.0, 0.0, 3.0)
    source: tuple[float, float] = (0.5, 0.5)
    target: tuple[float, float] = (4.5, 0.5)
    y_mean: float = 1.5
    #: y ~ N(1.5, 0.05) with 0.05 read as the variance
    y_std: float = math.sqrt(0.05)
    offset: float = 0.8
    x_center: float = 2.5
    #: if nonzero, the obstacles move sideways by ``x_shift * sin(x_freq * t)``
    x_shift: float = 0.0
    x_freq: float = 0.1
    resolution: float = 0.025
    refine_resolution: float = 0.0125

    @classmethod
    def steady(cls, **kw) -> "PathConfig":
        return cls(**kw)

    @classmethod
    def time_varying(cls, **kw) -> "PathConfig":
        kw.setdefault("offset", 0.3)
        kw.setdefault("x_shift", 1.0)
        return cls(**kw)

    def obstacle_x(self, t: int) -> float:
        return self.x_center + self.x_shift * math.sin(self.x_freq * t)


def obstacle_values(points: np.ndarray, scenarios: np.ndarray) -> np.ndarray:
    """``g`` for every (scenario, point) pair: ``max(1/2 - |p - c_l|_inf, 1/2 - |p - c_u|_inf)``.

    ``points`` is ``(H, 2)``, ``scenarios`` is ``(N, 4)`` rows ``[xl, yl, xu, yu]``.
    Returns an ``(N, H)`` array; positive entries are collisions.
    """
    P = np.asarray(points, dtype=float)[None, :, :]
    S = np.asarray(scenarios, dtype=float)[:, None, :]
    d_low = np.maximum(np.abs(P[..., 0] - S[..., 0]), np.abs(P[..., 1] - S[..., 1]))
    d_up = np.maximum(np.abs(P[..., 0] - S[..., 2]), np.abs(P[..., 1] - S[..., 3]))
    return _HALF - np.minimum(d_low, d_up)


def _segment_hits(p0, p1, lo: np.ndarray, hi: np.ndarray) -> bool:
    """True if the segment p0-p1 enters the interior of any box ``(lo, hi)``."""
    d = p1 - p0
    t_in = np.zeros(len(lo))
    t_out = np.ones(len(lo))
    for k in range(2):
        if abs(d[k]) < 1e-15:
            inside = (lo[:, k] < p0[k]) & (p0[k] < hi[:, k])
            t_out = np.where(inside, t_out, -1.0)
            continue
        a = (lo[:, k] - p0[k]) / d[k]
        b = (hi[:, k] - p0[k]) / d[k]
        t_in = np.maximum(t_in, np.minimum(a, b))
        t_out = np.minimum(t_out, np.maximum(a, b))
    return bool(np.any(t_out - t_in > 1e-12))


def _union_probability(intervals: list[tuple[float, float]], mu: float, sigma: float) -> float:
    if not intervals:
        return 0.0
    intervals.sort()
    merged = [list(intervals[0])]
    for a, b in intervals[1:]:
        if a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    cdf = lambda y: 0.5 * math.erfc(-(y - mu) / (sigma * _SQRT2))
    return min(1.0, sum(cdf(b) - cdf(a) for a, b in merged))


class PathPlanningProblem(ScenarioProblem):
    name = "path_planning"

    def __init__(self, config: PathConfig | None = None):
        self.config = config or PathConfig()

    def sample_batch(self, rng, n, t=1):
        c = self.config
        y = c.y_mean + c.y_std * rng.standard_normal(n)
        xc = np.full(n, c.obstacle_x(t))
        return np.column_stack([xc, y - c.offset, xc, y + c.offset])

    def constraint_values(self, solution, scenarios, t=1):
        S = np.asarray(scenarios, dtype=float).reshape(-1, 4)
        return obstacle_values(solution.x, S).max(axis=1)

    def violated(self, solution, scenarios, t=1):
        if not solution.ok:
            return np.ones(len(scenarios), dtype=bool)
        S = np.asarray(scenarios, dtype=float).reshape(-1, 4)
        out = np.empty(len(S), dtype=bool)
        for start in range(0, len(S), 2000):
            chunk = S[start : start + 2000]
            out[start : start + 2000] = (obstacle_values(solution.x, chunk) > 0.0).any(axis=1)
        return out

    def exact_risk(self, solution, t=1):
        """Probability over ``y`` that some viapoint collides, by merging y-intervals."""
        if not solution.ok:
            return 1.0
        c = self.config
        P = np.asarray(solution.x)
        xc = c.obstacle_x(t)
        near = P[np.abs(P[:, 0] - xc) < _HALF]
        intervals = []
        for py in near[:, 1]:
            intervals.append((py + c.offset - _HALF, py + c.offset + _HALF))
            intervals.append((py - c.offset - _HALF, py - c.offset + _HALF))
        return _union_probability(intervals, c.y_mean, c.y_std)

    def solve(self, scenarios, t=1):
        S = np.asarray(scenarios, dtype=float).reshape(-1, 4)
        c = self.config
        for res in (c.resolution, c.refine_resolution):
            path = self._plan(S, res)
            if path is None:
                continue
            if len(S) == 0 or obstacle_values(path, S).max() <= 0.0:
                end = path[-1]
                dist = float(np.hypot(*(end - np.asarray(c.target))))
                return Solution(x=path, objective=dist, meta={"resolution": res})
        return Solution(x=None, status=INFEASIBLE)

    # -- planner -------------------------------------------------------------

    def _plan(self, S: np.ndarray, res: float) -> np.ndarray | None:
        c = self.config
        x0, x1, y0, y1 = c.box
        xs = np.linspace(x0, x1, int(round((x1 - x0) / res)) + 1)
        ys = np.linspace(y0, y1, int(round((y1 - y0) / res)) + 1)
        nx, ny = len(xs), len(ys)

        lo = np.vstack([S[:, 0:2], S[:, 2:4]]) - _HALF
        hi = lo + 2 * _HALF
        blocked = np.zeros((nx, ny), dtype=bool)
        for (ax, ay), (bx, by) in zip(lo, hi):
            i0, i1 = np.searchsorted(xs, ax, "right"), np.searchsorted(xs, bx, "left")
            j0, j1 = np.searchsorted(ys, ay, "right"), np.searchsorted(ys, by, "left")
            blocked[i0:i1, j0:j1] = True

        def node(p):
            return int(round((p[0] - x0) / res)), int(round((p[1] - y0) / res))

        si, sj = node(c.source)
        if blocked[si, sj]:
            return None

        free = ~blocked
        idx = np.arange(nx * ny).reshape(nx, ny)
        rows, cols, wts = [], [], []

        def link(a_sl, b_sl, ok, w):
            rows.append(idx[a_sl][ok])
            cols.append(idx[b_sl][ok])
            wts.append(np.full(int(ok.sum()), w))

        right = free[:-1, :] & free[1:, :]
        link((slice(None, -1), slice(None)), (slice(1, None), slice(None)), right, res)
        up = free[:, :-1] & free[:, 1:]
        link((slice(None), slice(None, -1)), (slice(None), slice(1, None)), up, res)
        # diagonals only if both orthogonal neighbours are free (no corner cutting)
        cell = free[:-1, :-1] & free[1:, :-1] & free[:-1, 1:] & free[1:, 1:]
        link((slice(None, -1), slice(None, -1)), (slice(1, None), slice(1, None)), cell, res * _SQRT2)
        link((slice(1, None), slice(None, -1)), (slice(None, -1), slice(1, None)), cell, res * _SQRT2)

        graph = coo_matrix(
            (np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nx * ny, nx * ny),
        ).tocsr()
        src = idx[si, sj]
        dist, pred = dijkstra(graph, directed=False, indices=src, return_predecessors=True)

        budget = c.horizon * c.delta
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        to_target = np.hypot(gx - c.target[0], gy - c.target[1]).ravel()
        reach = np.isfinite(dist) & (dist <= budget * _OCTILE_FACTOR + 1e-9)
        # nearest to target, then shortest
        order = np.lexsort((dist[reach], to_target[reach]))
        goal = np.flatnonzero(reach)[order[0]]

        chain = [goal]
        while chain[-1] != src:
            chain.append(pred[chain[-1]])
        chain.reverse()
        ii, jj = np.unravel_index(np.array(chain), (nx, ny))
        grid_path = np.column_stack([xs[ii], ys[jj]])
        grid_path[0] = c.source

        taut = self._pull_string(grid_path, lo, hi)
        return self._resample(taut, c.horizon, budget)

    @staticmethod
    def _pull_string(path: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        if len(lo) == 0:
            return path[[0, -1]]
        if len(path) <= 2:
            return path
        out = [path[0]]
        anchor = 0
        j = 1
        while j < len(path):
            if j + 1 < len(path) and not _segment_hits(path[anchor], path[j + 1], lo, hi):
                j += 1
                continue
            out.append(path[j])
            anchor = j
            j += 1
        return np.array(out)

    @staticmethod
    def _resample(poly: np.ndarray, H: int, budget: float) -> np.ndarray:
        seg = np.hypot(*np.diff(poly, axis=0).T)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        length = min(cum[-1], budget)
        s = length * np.arange(1, H + 1) / H
        x = np.interp(s, cum, poly[:, 0])
        y = np.interp(s, cum, poly[:, 1])
        return np.column_stack([x, y])


def path_planning_problem(config: PathConfig | None = None) -> PathPlanningProblem:
    return PathPlanningProblem(config)
