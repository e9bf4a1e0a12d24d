"""Finite probability tables and Shannon information measures in bits.

Two layers live here. The typed layer (``Dist``, ``CondDist``, ``JointDist``
and the functions taking them) validates its inputs and is what callers
normally use. The array layer (``joint_entropy``, ``information``) works on
raw ``numpy`` tables with optional leading batch axes so the optimizers can
evaluate thousands of candidate input laws in one call; it does no
validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ProbabilityError

PROB_TOL = 1e-9
MARKOV_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_table(table: np.ndarray, sum_axes, what: str, tol: float = PROB_TOL):
    if not np.all(np.isfinite(table)):
        raise ProbabilityError(f"{what}: non-finite entry")
    if table.size and table.min() < 0:
        idx = np.unravel_index(int(np.argmin(table)), table.shape)
        raise ProbabilityError(f"{what}: negative entry {table[idx]!r} at index {tuple(int(i) for i in idx)}")
    sums = table.sum(axis=sum_axes)
    bad = np.abs(sums - 1.0) > tol
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0]) if np.ndim(sums) else ()
        s = sums[idx] if idx else float(sums)
        raise ProbabilityError(f"{what}: mass {s!r} != 1 at {idx}")


@dataclass(frozen=True)
class Dist:
    """Probability vector over a finite alphabet."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size == 0:
            raise ProbabilityError("Dist needs a non-empty 1-D vector")
        _check_table(v, None, "Dist")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.size

    @classmethod
    def uniform(cls, n: int) -> "Dist":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point(cls, n: int, i: int) -> "Dist":
        v = np.zeros(n)
        v[i] = 1.0
        return cls(v)

    @classmethod
    def bernoulli(cls, p: float) -> "Dist":
        return cls([1.0 - p, p])

    def __array__(self, dtype=None, copy=None):
        return self.values.astype(dtype) if dtype is not None else self.values


@dataclass(frozen=True)
class CondDist:
    """Conditional law p(out | cond).

    ``table`` has one or more leading conditioning axes and the output
    alphabet on the last axis, e.g. shape ``(nx1, nx2, ny1)`` for p(y1|x1,x2).
    """

    table: np.ndarray

    def __post_init__(self):
        t = _frozen(self.table)
        if t.ndim < 2:
            raise ProbabilityError("CondDist needs at least one conditioning axis")
        _check_table(t, -1, "CondDist row")
        object.__setattr__(self, "table", t)

    @property
    def row_alphabet(self) -> tuple[int, ...]:
        return self.table.shape[:-1]

    @property
    def col_alphabet(self) -> int:
        return self.table.shape[-1]

    def row(self, *index) -> Dist:
        return Dist(self.table[index])

    def __array__(self, dtype=None, copy=None):
        return self.table.astype(dtype) if dtype is not None else self.table


@dataclass(frozen=True)
class JointDist:
    """Joint law over named finite axes."""

    table: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        t = _frozen(self.table)
        if t.ndim == 0:
            raise ProbabilityError("JointDist needs at least one axis")
        _check_table(t, None, "JointDist")
        names = tuple(self.names) or tuple(f"A{i}" for i in range(t.ndim))
        if len(names) != t.ndim or len(set(names)) != len(names):
            raise ProbabilityError(f"axis names {names!r} do not match {t.ndim} axes")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "names", names)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.table.shape

    def axis(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            return int(key)
        return self.names.index(key)

    def marginal(self, keep: Sequence) -> "JointDist":
        """Marginal over ``keep`` (names or indices), in the given order."""
        idx = [self.axis(k) for k in keep]
        drop = tuple(a for a in range(self.table.ndim) if a not in idx)
        m = self.table.sum(axis=drop) if drop else self.table
        remaining = [a for a in range(self.table.ndim) if a in idx]
        m = np.transpose(m, [remaining.index(a) for a in idx])
        return JointDist(m, tuple(self.names[a] for a in idx))

    def group(self, groups: Sequence[Sequence]) -> "JointDist":
        """Merge axes into composite axes, one per group (all axes must be used)."""
        idx = [[self.axis(k) for k in g] for g in groups]
        flat = [a for g in idx for a in g]
        if sorted(flat) != list(range(self.table.ndim)):
            raise ValueError("groups must partition the axes")
        t = np.transpose(self.table, flat)
        shape = [int(np.prod([self.table.shape[a] for a in g])) for g in idx]
        names = tuple("".join(self.names[a] for a in g) for g in idx)
        return JointDist(t.reshape(shape), names)

    def dist(self) -> Dist:
        if self.table.ndim != 1:
            raise ValueError("only a one-axis joint converts to Dist")
        return Dist(self.table)


# ---------------------------------------------------------------------------
# array layer


def _plogp(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


def joint_entropy(table: np.ndarray, axes: Sequence[int], batch_ndim: int = 0) -> np.ndarray:
    """H of the marginal on ``axes``; axis numbers skip the batch axes."""
    nvar = table.ndim - batch_ndim
    keep = {int(a) for a in axes}
    if not keep:
        return np.zeros(table.shape[:batch_ndim])
    drop = tuple(batch_ndim + a for a in range(nvar) if a not in keep)
    m = table.sum(axis=drop) if drop else table
    return -_plogp(m).sum(axis=tuple(range(batch_ndim, m.ndim)))


def information(table, a: Sequence[int], b: Sequence[int], given: Sequence[int] = (), batch_ndim: int = 0):
    """I(A;B|C) from entropies of the marginal tables (no clamping)."""
    a, b, c = set(a), set(b), set(given)
    out = (
        joint_entropy(table, a | c, batch_ndim)
        + joint_entropy(table, b | c, batch_ndim)
        - joint_entropy(table, a | b | c, batch_ndim)
    )
    if c:
        out = out - joint_entropy(table, c, batch_ndim)
    return out


def h2(p):
    """Vectorised binary entropy with no range check."""
    p = np.asarray(p, dtype=float)
    return -(_plogp(p) + _plogp(1.0 - p))


def _clamp(v: float) -> float:
    # tiny negative values are float cancellation, anything larger is a bug
    return 0.0 if -1e-12 < v < 0 else float(v)


# ---------------------------------------------------------------------------
# typed layer


def entropy(d) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    if not isinstance(d, Dist):
        d = Dist(d)
    return _clamp(float(-_plogp(d.values).sum()))


def binary_entropy(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ProbabilityError(f"binary_entropy: p={p!r} outside [0, 1]")
    return float(h2(p))


def _as_joint(j) -> JointDist:
    return j if isinstance(j, JointDist) else JointDist(j)


def mutual_information(j) -> float:
    j = _as_joint(j)
    if j.table.ndim != 2:
        raise ValueError(f"mutual_information needs 2 axes, got {j.table.ndim}")
    return _clamp(float(information(j.table, [0], [1])))


def conditional_mutual_information(j, given=2) -> float:
    """I(A;B|C) for a three-axis joint; ``given`` names the conditioning axis."""
    j = _as_joint(j)
    if j.table.ndim != 3:
        raise ValueError(f"conditional_mutual_information needs 3 axes, got {j.table.ndim}")
    c = j.axis(given) % 3
    a, b = (x for x in range(3) if x != c)
    return _clamp(float(information(j.table, [a], [b], [c])))


class MarkovCheck(NamedTuple):
    holds: bool
    max_violation: float


def is_markov_chain(j, tol: float = MARKOV_TOL) -> MarkovCheck:
    """Test X - Y - Z on a three-axis joint ordered (X, Y, Z).

    Compares p(z|x,y) with p(z|y) on every cell with p(x,y) > 0. Group axes
    with ``JointDist.group`` first to test composite variables.
    """
    j = _as_joint(j)
    if j.table.ndim != 3:
        raise ValueError("is_markov_chain needs a joint ordered (X, Y, Z)")
    t = j.table
    pxy = t.sum(axis=2)
    pyz = t.sum(axis=0)
    py = pyz.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_given_xy = t / pxy[:, :, None]
        z_given_y = pyz / py[:, None]
    diff = np.abs(z_given_xy - z_given_y[None, :, :])
    diff = np.where((pxy > 0)[:, :, None], diff, 0.0)
    worst = float(diff.max()) if diff.size else 0.0
    return MarkovCheck(worst <= tol, worst)
