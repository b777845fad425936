"""Dense two-phase simplex for small LPs ``min c.x  s.t.  A x <= b`` with free x.

Bland's rule is used for both entering and leaving variables, so the method
cannot cycle on degenerate instances. Intended for tens of variables and up to
a few thousand rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LpProblem", "LpResult", "solve_lp", "OPTIMAL", "UNBOUNDED", "INFEASIBLE"]

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

_TOL = 1e-9


@dataclass
class LpProblem:
    """``min c.x`` subject to ``A x <= b`` and optionally ``lower <= x <= upper``."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n) if n else np.empty((0, 0))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.size} entries")
        for name in ("lower", "upper"):
            bound = getattr(self, name)
            if bound is not None:
                bound = np.broadcast_to(np.asarray(bound, dtype=float), (n,)).copy()
                setattr(self, name, bound)

    @property
    def dim(self) -> int:
        return self.c.size

    def inequality_form(self) -> tuple[np.ndarray, np.ndarray]:
        """All constraints, box included, as one ``A x <= b`` system."""
        rows, rhs = [self.A], [self.b]
        eye = np.eye(self.dim)
        if self.upper is not None:
            keep = np.isfinite(self.upper)
            rows.append(eye[keep])
            rhs.append(self.upper[keep])
        if self.lower is not None:
            keep = np.isfinite(self.lower)
            rows.append(-eye[keep])
            rhs.append(-self.lower[keep])
        return np.vstack(rows), np.concatenate(rhs)


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    active: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: np.ndarray) -> bool:
        """Minimize the objective in the last row. Returns False if unbounded."""
        T = self.T
        m = T.shape[0] - 1
        while True:
            costs = T[-1, :-1]
            enter = np.flatnonzero((costs < -_TOL) & allowed)
            if enter.size == 0:
                return True
            j = int(enter[0])
            col = T[:m, j]
            pos = col > _TOL
            if not pos.any():
                return False
            ratios = np.full(m, np.inf)
            ratios[pos] = T[:m, -1][pos] / col[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + _TOL * max(1.0, abs(best)))
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)


def solve_lp(lp: LpProblem) -> LpResult:
    """Solve ``lp``; returns a vertex solution or an ``unbounded``/``infeasible`` status."""
    A, b = lp.inequality_form()
    m, n = A.shape
    c = lp.c
    if m == 0:
        if np.any(np.abs(c) > _TOL):
            return LpResult(UNBOUNDED)
        return LpResult(OPTIMAL, x=np.zeros(n), objective=0.0)

    # columns: x+ (n), x- (n), slacks (m), artificials (one per negative-rhs row), rhs
    neg = b < 0
    n_art = int(neg.sum())
    n_cols = 2 * n + m + n_art
    T = np.zeros((m + 1, n_cols + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:m, :n] = A * sign[:, None]
    T[:m, n : 2 * n] = -A * sign[:, None]
    T[:m, 2 * n : 2 * n + m] = np.diag(sign)
    T[:m, -1] = b * sign
    basis = [2 * n + i for i in range(m)]
    art_rows = np.flatnonzero(neg)
    for k, i in enumerate(art_rows):
        T[i, 2 * n + m + k] = 1.0
        basis[i] = 2 * n + m + k

    tab = _Tableau(T, basis)
    all_cols = np.ones(n_cols, dtype=bool)

    if n_art:
        # phase 1: minimize the sum of artificials
        T[-1, 2 * n + m :-1] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        tab.run(all_cols)
        if -T[-1, -1] > 1e-7:
            return LpResult(INFEASIBLE, pivots=tab.pivots)
        structural = np.zeros(n_cols, dtype=bool)
        structural[: 2 * n + m] = True
        for r in range(m):
            if tab.basis[r] >= 2 * n + m:
                cands = np.flatnonzero(structural & (np.abs(T[r, :-1]) > _TOL))
                if cands.size:
                    tab.pivot(r, int(cands[0]))
        allowed = structural
    else:
        allowed = all_cols

    # phase 2
    T[-1] = 0.0
    T[-1, :n] = c
    T[-1, n : 2 * n] = -c
    for r, j in enumerate(tab.basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    if not tab.run(allowed):
        return LpResult(UNBOUNDED, pivots=tab.pivots)

    values = np.zeros(n_cols)
    for r, j in enumerate(tab.basis):
        values[j] = T[r, -1]
    x = values[:n] - values[n : 2 * n]

    slack = b - A @ x
    active = np.flatnonzero(np.abs(slack) <= 1e-7 * np.maximum(1.0, np.abs(b)))
    # re-solve the active system to shed pivoting round-off
    if active.size >= n:
        sub = A[active]
        if np.linalg.matrix_rank(sub) == n:
            polished, *_ = np.linalg.lstsq(sub, b[active], rcond=None)
            if np.all(A @ polished <= b + 1e-9 * np.maximum(1.0, np.abs(b))):
                x = polished
    return LpResult(OPTIMAL, x=x, objective=float(c @ x), active=active, pivots=tab.pivots)
