"""Dense bounded-variable primal simplex.

Solves ``max c@x  s.t.  A@x = b,  0 <= x <= ub`` (``ub`` may hold ``inf``).
Phase 1 drives one artificial per row to zero; afterwards the artificials are
fixed at ``[0, 0]``, so rows that turn out redundant just keep a zero-valued
artificial in the basis.  Pricing is Dantzig's rule until a streak of
degenerate pivots, then Bland's rule until the objective moves again.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
DEGENERACY_STREAK = 50


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    status: str  # "optimal" or "iteration_limit"
    iterations: int


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, ub: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        sign = np.where(b < 0, -1.0, 1.0)
        # columns: structural 0..n-1, artificials n..n+m-1
        self.T = np.hstack([A * sign[:, None], np.eye(m)])
        self.beta = b * sign
        self.lb = np.zeros(n + m)
        self.ub = np.concatenate([ub.astype(float), np.full(m, np.inf)])
        self.basis = np.arange(n, n + m)
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.is_basic = np.zeros(n + m, dtype=bool)
        self.is_basic[self.basis] = True
        self.iterations = 0

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.ub, self.lb)
        x[self.is_basic] = 0.0
        x[self.basis] = self.beta
        return x

    def run(self, cost: np.ndarray, max_iter: int) -> str:
        d = cost - cost[self.basis] @ self.T
        streak = 0
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            movable = ~self.is_basic & (self.ub - self.lb > FEAS_TOL)
            up = movable & ~self.at_upper & (d > FEAS_TOL)
            down = movable & self.at_upper & (d < -FEAS_TOL)
            eligible = np.flatnonzero(up | down)
            if eligible.size == 0:
                fresh = cost - cost[self.basis] @ self.T
                if np.max(np.abs(fresh - d), initial=0.0) <= FEAS_TOL:
                    return "optimal"
                d[:] = fresh
                continue
            bland = streak >= DEGENERACY_STREAK
            if bland:
                j = int(eligible[0])
            else:
                j = int(eligible[np.argmax(np.abs(d[eligible]))])
            direction = 1.0 if up[j] else -1.0
            col = self.T[:, j] * direction
            # basic values move by -col * theta
            theta = self.ub[j] - self.lb[j]
            leave = -1
            leave_to_upper = False
            ratios = np.full(self.m, np.inf)
            targets = np.zeros(self.m, dtype=bool)
            ub_b = self.ub[self.basis]
            lb_b = self.lb[self.basis]
            dec = col > PIVOT_TOL
            ratios[dec] = (self.beta[dec] - lb_b[dec]) / col[dec]
            inc = (col < -PIVOT_TOL) & np.isfinite(ub_b)
            ratios[inc] = (ub_b[inc] - self.beta[inc]) / (-col[inc])
            targets[inc] = True
            ratios = np.maximum(ratios, 0.0)
            rmin = ratios.min() if self.m else np.inf
            if rmin < theta - PIVOT_TOL or (rmin <= theta and rmin < np.inf and not np.isfinite(theta)):
                ties = np.flatnonzero(ratios <= rmin + PIVOT_TOL)
                if bland:
                    leave = int(ties[np.argmin(self.basis[ties])])
                else:
                    leave = int(ties[np.argmax(np.abs(col[ties]))])
                theta = ratios[leave]
                leave_to_upper = bool(targets[leave])
            if not np.isfinite(theta):
                raise LPError("LP is unbounded")
            self.iterations += 1
            streak = streak + 1 if theta <= PIVOT_TOL else 0
            self.beta -= col * theta
            if leave < 0:
                # bound flip of the entering variable, no basis change
                self.at_upper[j] = not self.at_upper[j]
                continue
            out = self.basis[leave]
            entering_value = (self.ub[j] if self.at_upper[j] else self.lb[j]) + direction * theta
            self._pivot(leave, j, d)
            self.beta[leave] = entering_value
            self.is_basic[out] = False
            self.at_upper[out] = leave_to_upper
            self.is_basic[j] = True
            self.at_upper[j] = False
            self.basis[leave] = j

    def _pivot(self, r: int, j: int, d: np.ndarray) -> None:
        T = self.T
        piv = T[r, j]
        T[r] /= piv
        colj = T[:, j].copy()
        colj[r] = 0.0
        nz = np.flatnonzero(np.abs(colj) > 0)
        if nz.size:
            T[nz] -= np.outer(colj[nz], T[r])
            # beta of the other rows was already moved by the ratio step
        d -= d[j] * T[r]


def solve(c: np.ndarray, A: np.ndarray, b: np.ndarray, ub: np.ndarray,
          max_iter: int | None = None) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    tab = _Tableau(A, b, ub)
    if np.any(np.abs(tab.beta) > FEAS_TOL):
        phase1 = np.concatenate([np.zeros(n), -np.ones(m)])
        status = tab.run(phase1, max_iter)
        if status != "optimal":
            raise LPError("iteration limit reached in phase 1")
        if tab.values()[n:].sum() > FEAS_TOL * max(1, m):
            raise LPError("LP is infeasible")
    tab.ub[n:] = 0.0
    tab.beta[np.abs(tab.beta) < FEAS_TOL * 1e-2] = 0.0
    cost = np.concatenate([c, np.zeros(m)])
    status = tab.run(cost, max_iter)
    x = tab.values()[:n]
    x = np.clip(x, 0.0, ub)
    return LPResult(x, float(c @ x), status, tab.iterations)
