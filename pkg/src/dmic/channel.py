"""Two-user discrete memoryless interference channels and their classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import PreconditionError, ProbabilityError
from .optimize import OptimizerConfig, maximize_product_input
from .probcore import PROB_TOL, CondDist, Dist, JointDist, information

# variable axes of an induced joint table p(x1, x2, y1, y2)
X1, X2, Y1, Y2 = 0, 1, 2, 3

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Dmic:
    """Transition tensor ``t[x1, x2, y1, y2] = p(y1, y2 | x1, x2)``."""

    t: np.ndarray
    name: str = ""
    description: str = ""

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.ndim != 4 or min(t.shape) < 1:
            raise ProbabilityError(f"transition tensor must be 4-D, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ProbabilityError("transition tensor has non-finite entries")
        if t.min() < 0:
            idx = tuple(int(i) for i in np.unravel_index(int(np.argmin(t)), t.shape))
            raise ProbabilityError(f"negative transition probability at (x1,x2,y1,y2)={idx}")
        sums = t.sum(axis=(2, 3))
        bad = np.argwhere(np.abs(sums - 1.0) > PROB_TOL)
        if len(bad):
            x1, x2 = (int(i) for i in bad[0])
            raise ProbabilityError(f"row (x1,x2)=({x1},{x2}) sums to {sums[x1, x2]!r}")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def nx1(self) -> int:
        return self.t.shape[0]

    @property
    def nx2(self) -> int:
        return self.t.shape[1]

    @property
    def ny1(self) -> int:
        return self.t.shape[2]

    @property
    def ny2(self) -> int:
        return self.t.shape[3]

    @property
    def y1_table(self) -> np.ndarray:
        """p(y1 | x1, x2) as an array of shape (nx1, nx2, ny1)."""
        return self.t.sum(axis=3)

    @property
    def y2_table(self) -> np.ndarray:
        """p(y2 | x1, x2) as an array of shape (nx1, nx2, ny2)."""
        return self.t.sum(axis=2)

    @property
    def is_binary(self) -> bool:
        return self.t.shape == (2, 2, 2, 2)


@dataclass(frozen=True)
class ProductInput:
    p1: Dist
    p2: Dist

    def __post_init__(self):
        if not isinstance(self.p1, Dist):
            object.__setattr__(self, "p1", Dist(self.p1))
        if not isinstance(self.p2, Dist):
            object.__setattr__(self, "p2", Dist(self.p2))

    @classmethod
    def from_blocks(cls, blocks) -> "ProductInput":
        return cls(*blocks)

    def blocks(self) -> list[np.ndarray]:
        return [self.p1.values, self.p2.values]


def marginal_channels(c: Dmic) -> tuple[CondDist, CondDist]:
    return CondDist(c.y1_table), CondDist(c.y2_table)


def induced_tables(c: Dmic, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Batched joint p(x1,x2,y1,y2) for input batches of shape (N, nx1), (N, nx2)."""
    return (p1[:, :, None] * p2[:, None, :])[:, :, :, None, None] * c.t[None]


def induced_joint(c: Dmic, inp: ProductInput) -> JointDist:
    if inp.p1.size != c.nx1 or inp.p2.size != c.nx2:
        raise ValueError(
            f"input sizes ({inp.p1.size}, {inp.p2.size}) do not match channel ({c.nx1}, {c.nx2})"
        )
    t = np.einsum("a,b,abcd->abcd", inp.p1.values, inp.p2.values, c.t)
    return JointDist(t, ("X1", "X2", "Y1", "Y2"))


def classify_one_sided(c: Dmic, tol: float = DEFAULT_TOL) -> bool:
    """True when p(y2 | x1, x2) does not depend on x1."""
    y2 = c.y2_table
    return bool(np.max(np.abs(y2 - y2[:1])) <= tol)


def factorize_weak(c: Dmic, tol: float = DEFAULT_TOL) -> CondDist | None:
    """Recover p'(y1 | x1, y2) with t = p(y2|x2) p'(y1|x1,y2), or ``None``.

    Raises ``PreconditionError`` on a channel that is not one-sided. Rows of
    p' that no x2 reaches with positive p(y2|x2) are filled uniformly.
    """
    if not classify_one_sided(c, tol):
        raise PreconditionError("factorize_weak requires a one-sided channel", verdict=False)
    py2 = c.y2_table[0]  # (x2, y2)
    pinned = py2 > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        # ratio[x1, x2, y2, y1]
        ratio = np.transpose(c.t, (0, 1, 3, 2)) / py2[None, :, :, None]
    mask = np.broadcast_to(pinned[None, :, :, None], ratio.shape)
    hi = np.where(mask, ratio, -np.inf).max(axis=1)
    lo = np.where(mask, ratio, np.inf).min(axis=1)
    reached = pinned.any(axis=0)  # per y2
    spread = np.where(reached[None, :, None], hi - lo, 0.0)
    if np.max(spread) > tol:
        return None
    count = pinned.sum(axis=0)
    mean = np.where(mask, ratio, 0.0).sum(axis=1) / np.maximum(count, 1)[None, :, None]
    table = np.where(reached[None, :, None], mean, 1.0 / c.ny1)
    table = table / table.sum(axis=2, keepdims=True)
    return CondDist(table)


def degraded_violation(c: Dmic, tol: float = DEFAULT_TOL) -> float:
    """Largest spread over x2 of p(y1 | x1, x2, y2) on cells with p(y2|x1,x2) > tol."""
    y2 = c.y2_table
    ok = y2 > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.transpose(c.t, (0, 1, 3, 2)) / y2[..., None]  # [x1, x2, y2, y1]
    mask = np.broadcast_to(ok[..., None], cond.shape)
    hi = np.where(mask, cond, -np.inf).max(axis=1)
    lo = np.where(mask, cond, np.inf).min(axis=1)
    spread = np.where(np.isfinite(hi) & np.isfinite(lo), hi - lo, 0.0)
    return float(spread.max())


def check_degraded(c: Dmic, tol: float = DEFAULT_TOL) -> bool:
    """Channel-structural test of the Markov chain X2 - (X1, Y2) - Y1."""
    return degraded_violation(c, tol) <= tol


# ---------------------------------------------------------------------------
# mutual-information conditions over all product inputs


def _cond_gaps() -> dict[str, Callable[[np.ndarray], np.ndarray]]:
    def mi(a, b, given=()):
        return lambda j: information(j, a, b, given, batch_ndim=1)

    def diff(f, g):
        return lambda j: f(j) - g(j)

    return {
        "very-strong-1": diff(mi([X1], [Y2]), mi([X1], [Y1], [X2])),
        "very-strong-2": diff(mi([X2], [Y1]), mi([X2], [Y2], [X1])),
        "strong-1": diff(mi([X1], [Y2], [X2]), mi([X1], [Y1], [X2])),
        "strong-2": diff(mi([X2], [Y1], [X1]), mi([X2], [Y2], [X1])),
        "weak-alt": diff(mi([X2], [Y2]), mi([X2], [Y1], [X1])),
        "mixed-mi": diff(mi([X1], [Y2], [X2]), mi([X1], [Y1], [X2])),
    }


CONDITION_GAPS = _cond_gaps()
CONDITIONS = tuple(CONDITION_GAPS)


def condition_gap(c: Dmic, condition: str) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Batched gap (right side minus left side, bits) of a named MI condition."""
    try:
        gap = CONDITION_GAPS[condition]
    except KeyError:
        raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}") from None
    return lambda p1, p2: gap(induced_tables(c, p1, p2))


@dataclass(frozen=True)
class ConditionRecord:
    condition: str
    min_gap: float
    witness: ProductInput
    holds: bool
    tol: float
    grid_step: float

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "min_gap": self.min_gap,
            "witness": {"p1": self.witness.p1.values.tolist(), "p2": self.witness.p2.values.tolist()},
            "holds": self.holds,
            "tol": self.tol,
            "grid_step": self.grid_step,
        }


def mi_condition_report(
    c: Dmic, condition: str, opt: OptimizerConfig | None = None, tol: float = DEFAULT_TOL
) -> ConditionRecord:
    """Minimize a condition's gap over product inputs and report the verdict."""
    opt = opt or OptimizerConfig()
    gap = condition_gap(c, condition)
    res = maximize_product_input(lambda p1, p2: -gap(p1, p2), (c.nx1, c.nx2), opt)
    min_gap = -res.value
    return ConditionRecord(
        condition=condition,
        min_gap=min_gap,
        witness=ProductInput(*res.argopt),
        holds=bool(min_gap >= -tol),
        tol=tol,
        grid_step=float(res.certified_grid_step),
    )


@dataclass(frozen=True)
class ClassificationReport:
    one_sided: bool
    weak_factorization: CondDist | None
    degraded: bool
    conditions: dict[str, ConditionRecord]
    tol: float
    grid_step: float
    name: str = ""
    labels: tuple[str, ...] = field(default=())

    @property
    def weak(self) -> bool:
        return self.one_sided and self.weak_factorization is not None

    @property
    def mixed(self) -> bool:
        return self.degraded and self.conditions["mixed-mi"].holds

    @property
    def strong(self) -> bool:
        return self.conditions["strong-1"].holds and self.conditions["strong-2"].holds

    @property
    def very_strong(self) -> bool:
        return self.conditions["very-strong-1"].holds and self.conditions["very-strong-2"].holds

    def holds(self, condition: str) -> bool:
        return self.conditions[condition].holds

    def to_dict(self) -> dict:
        wf = self.weak_factorization
        return {
            "name": self.name,
            "labels": list(self.labels),
            "one_sided": self.one_sided,
            "weak_factorization": None if wf is None else wf.table.tolist(),
            "degraded": self.degraded,
            "conditions": {k: r.to_dict() for k, r in self.conditions.items()},
            "tol": self.tol,
            "grid_step": self.grid_step,
        }


def classify(c: Dmic, opt: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> ClassificationReport:
    """Run every structural and mutual-information test.

    Labels are not exclusive: ``weak-one-sided`` (one-sided with the weak
    factorization), ``degraded``, ``mixed``, ``strong``, ``very-strong`` and
    ``weak-alt`` (the MI-only weak condition, never conflated with the
    factorization) are all reported independently.
    """
    opt = opt or OptimizerConfig()
    one_sided = classify_one_sided(c, tol)
    wf = factorize_weak(c, tol) if one_sided else None
    degraded = check_degraded(c, tol)
    conds = {name: mi_condition_report(c, name, opt, tol) for name in CONDITIONS}
    labels = []
    if one_sided:
        labels.append("one-sided")
    if one_sided and wf is not None:
        labels.append("weak-one-sided")
    if degraded:
        labels.append("degraded")
    if degraded and conds["mixed-mi"].holds:
        labels.append("mixed")
    if conds["strong-1"].holds and conds["strong-2"].holds:
        labels.append("strong")
    if conds["very-strong-1"].holds and conds["very-strong-2"].holds:
        labels.append("very-strong")
    if conds["weak-alt"].holds:
        labels.append("weak-alt")
    grid_step = min(r.grid_step for r in conds.values())
    return ClassificationReport(
        one_sided=one_sided,
        weak_factorization=wf,
        degraded=degraded,
        conditions=conds,
        tol=tol,
        grid_step=grid_step,
        name=c.name,
        labels=tuple(labels),
    )
