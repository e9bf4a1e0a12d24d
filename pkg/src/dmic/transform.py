"""Solving for degradation tables and the closed-form weak-interference gap surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Dmic, classify_one_sided
from .channels import compose_weak
from .errors import NonIdentifiableError, PreconditionError
from .probcore import PROB_TOL, CondDist, h2

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class SignedCondTable:
    """Candidate p'(y1 | x1, y2) whose entries may be negative.

    ``entries[x1, y2, y1]``; ``residual`` is the largest absolute misfit of
    the linear system (zero for square systems), ``consistent`` says whether
    it is within tolerance.
    """

    entries: np.ndarray
    feasible: bool
    min_entry: float
    residual: float = 0.0
    consistent: bool = True

    def offending(self) -> list[tuple[tuple[int, int, int], float]]:
        """Negative entries as ((x1, y2, y1), value), most negative first."""
        idx = np.argwhere(self.entries < -FEASIBILITY_TOL)
        out = [(tuple(int(i) for i in ix), float(self.entries[tuple(ix)])) for ix in idx]
        return sorted(out, key=lambda kv: kv[1])

    def compose(self, py2) -> Dmic:
        """Rebuild t = p(y2|x2) p'(y1|x1,y2); only valid for feasible tables."""
        if not self.feasible:
            raise ValueError(f"table is infeasible (min entry {self.min_entry:.6g})")
        return compose_weak(np.asarray(py2), np.clip(self.entries, 0.0, None))


def solve_degradation_table(py1, py2, tol: float = PROB_TOL) -> SignedCondTable:
    """Solve p(y1|x1,x2) = sum_y2 p(y2|x2) p'(y1|x1,y2) for p'.

    ``py1`` has shape (nx1, nx2, ny1) and ``py2`` shape (nx2, ny2); ``CondDist``
    values are accepted. Each x1 block is one linear system with coefficient
    matrix p(y2|x2). Square systems are solved exactly, taller ones by least
    squares. Raises ``NonIdentifiableError`` when p(y2|x2) has rank below ny2.
    """
    a = np.asarray(py2.table if isinstance(py2, CondDist) else py2, dtype=float)
    f = np.asarray(py1.table if isinstance(py1, CondDist) else py1, dtype=float)
    nx1, nx2, ny1 = f.shape
    if a.shape[0] != nx2:
        raise ValueError(f"p(y2|x2) has {a.shape[0]} rows but p(y1|x1,x2) has nx2={nx2}")
    ny2 = a.shape[1]
    if np.linalg.matrix_rank(a) < ny2:
        raise NonIdentifiableError(
            f"p(y2|x2) has rank {np.linalg.matrix_rank(a)} < |Y2|={ny2}; degradation table not identifiable"
        )
    entries = np.empty((nx1, ny2, ny1))
    residual = 0.0
    for x1 in range(nx1):
        if nx2 == ny2:
            sol = np.linalg.solve(a, f[x1])
        else:
            sol, *_ = np.linalg.lstsq(a, f[x1], rcond=None)
            residual = max(residual, float(np.abs(a @ sol - f[x1]).max()))
        entries[x1] = sol
    min_entry = float(entries.min())
    consistent = residual <= tol
    entries.setflags(write=False)
    return SignedCondTable(
        entries=entries,
        feasible=bool(consistent and min_entry >= -FEASIBILITY_TOL),
        min_entry=min_entry,
        residual=residual,
        consistent=consistent,
    )


@dataclass(frozen=True)
class GapSurface:
    """Gap I(X2;Y2) - I(X2;Y1|X1) on a grid; ``gaps[i, j]`` at (p1[i], p2[j])."""

    p1: np.ndarray
    p2: np.ndarray
    gaps: np.ndarray

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmin(self.gaps)), self.gaps.shape)
        return float(self.p1[i]), float(self.p2[j])


def weak_alt_gap_surface(c: Dmic, step: float = 0.001) -> GapSurface:
    """Closed-form weak-interference gap for binary one-sided channels.

    With f_ij = p(y1=1|x1=i,x2=j), g_j = p(y2=1|x2=j) and p_i = P(X_i=1):
    I(X2;Y2) = h(p2' g0 + p2 g1) - p2' h(g0) - p2 h(g1) and
    I(X2;Y1|X1) = sum_i P(x1=i) [h(p2' f_i0 + p2 f_i1) - p2' h(f_i0) - p2 h(f_i1)],
    where p2' = 1 - p2.
    """
    if not c.is_binary:
        raise ValueError("weak_alt_gap_surface needs binary alphabets")
    if not classify_one_sided(c):
        raise PreconditionError("weak_alt_gap_surface requires a one-sided channel", verdict=False)
    n = max(1, int(np.ceil(1.0 / step - 1e-9)))
    grid = np.linspace(0.0, 1.0, n + 1)
    f = c.y1_table[:, :, 1]
    g = c.y2_table[0, :, 1]
    p2 = grid[None, :]
    q2 = 1.0 - p2
    lhs = h2(q2 * g[0] + p2 * g[1]) - q2 * h2(g[0]) - p2 * h2(g[1])

    def per_x1(i):
        return h2(q2 * f[i, 0] + p2 * f[i, 1]) - q2 * h2(f[i, 0]) - p2 * h2(f[i, 1])

    p1 = grid[:, None]
    rhs = (1.0 - p1) * per_x1(0) + p1 * per_x1(1)
    return GapSurface(grid, grid, lhs - rhs)
