"""Rate pairs and downward-closed convex rate regions in the plane."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np


class RatePoint(NamedTuple):
    r1: float
    r2: float


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain; counterclockwise, collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(p[0] - ax, p[1] - ay)
    s = min(1.0, max(0.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2))
    return math.hypot(p[0] - ax - s * dx, p[1] - ay - s * dy)


@dataclass(frozen=True)
class RateRegion:
    """Convex polygon containing the origin and closed under decreasing rates.

    ``vertices`` run counterclockwise from (max r1, 0) and end at the origin.
    ``meta`` records how the region was sampled.
    """

    vertices: tuple[RatePoint, ...]
    meta: dict = field(default_factory=dict, compare=False)
    points: np.ndarray | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], meta: dict | None = None) -> "RateRegion":
        pts = [(max(0.0, float(a)), max(0.0, float(b))) for a, b in points]
        pts = [p for p in pts if math.isfinite(p[0]) and math.isfinite(p[1])]
        xmax = max((p[0] for p in pts), default=0.0)
        ymax = max((p[1] for p in pts), default=0.0)
        cand = pts + [(0.0, 0.0), (xmax, 0.0), (0.0, ymax)]
        hull = convex_hull(cand)
        start = hull.index((xmax, 0.0))
        ordered = hull[start:] + hull[:start]
        raw = np.array(pts, dtype=float).reshape(-1, 2)
        return cls(tuple(RatePoint(*p) for p in ordered), dict(meta or {}), raw)

    @property
    def max_r1(self) -> float:
        return max(v.r1 for v in self.vertices)

    @property
    def max_r2(self) -> float:
        return max(v.r2 for v in self.vertices)

    @property
    def max_sum(self) -> float:
        return max(v.r1 + v.r2 for v in self.vertices)

    def edges(self):
        vs = self.vertices
        if len(vs) == 1:
            return [(vs[0], vs[0])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def distance(self, point) -> float:
        """Euclidean distance from ``point`` to the region (0 inside)."""
        p = (float(point[0]), float(point[1]))
        vs = self.vertices
        if len(vs) >= 3 and all(_cross(a, b, p) >= 0 for a, b in self.edges()):
            return 0.0
        return min(_segment_distance(p, a, b) for a, b in self.edges())

    def contains(self, point, tol: float = 1e-9) -> bool:
        return self.distance(point) <= tol

    def contains_region(self, other: "RateRegion", tol: float = 1e-9) -> bool:
        return all(self.contains(v, tol) for v in other.vertices)

    def r1_limit(self, r2: float) -> float:
        """Largest r1 with (r1, r2) in the region; ``nan`` above max r2."""
        if r2 < 0 or r2 > self.max_r2 + 1e-15:
            return float("nan")
        best = 0.0
        for a, b in self.edges():
            lo, hi = sorted((a.r2, b.r2))
            if not lo <= r2 <= hi:
                continue
            if hi == lo:
                best = max(best, a.r1, b.r1)
            else:
                s = (r2 - a.r2) / (b.r2 - a.r2)
                best = max(best, a.r1 + s * (b.r1 - a.r1))
        return best

    def hausdorff(self, other: "RateRegion") -> float:
        # distance to a convex set is convex, so the sup sits at a vertex
        d1 = max(other.distance(v) for v in self.vertices)
        d2 = max(self.distance(v) for v in other.vertices)
        return max(d1, d2)

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(-1, 2)
