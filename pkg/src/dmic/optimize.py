"""Global maximization over products of probability simplices.

Objectives are *batched*: an objective receives one array per simplex block,
each of shape ``(N, n_block)``, and returns an array of ``N`` values. That
lets the lattice oracle and the local search evaluate many candidate input
laws per numpy call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import NumericError
from .probcore import CondDist, Dist

Objective = Callable[..., np.ndarray]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for every numerical search in the package.

    ``max_grid_points`` caps the coarse lattice: when the product lattice at
    ``grid_step`` would be larger, the step is coarsened and the step actually
    used is reported on the result. ``top_cells`` is the number of best
    lattice cells the local search starts from.
    """

    grid_step: float = 0.02
    multistarts: int = 4
    max_iters: int = 2000
    convergence_tol: float = 1e-9
    rng_seed: int = 0
    max_grid_points: int = 250_000
    top_cells: int = 4

    def __post_init__(self):
        if not 0 < self.grid_step <= 1:
            raise ValueError(f"grid_step must lie in (0, 1], got {self.grid_step}")
        if self.multistarts < 1:
            raise ValueError("multistarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be > 0")
        if self.top_cells < 1 or self.max_grid_points < 1:
            raise ValueError("top_cells and max_grid_points must be >= 1")


@dataclass(frozen=True)
class OptResult:
    value: float
    argopt: tuple[Dist, ...]
    iterations: int
    certified_grid_step: float | None
    history: tuple[float, ...] = field(default=(), repr=False)

    def blocks(self) -> list[np.ndarray]:
        return [d.values for d in self.argopt]


def lattice_divisions(step: float) -> int:
    """Number of lattice divisions K so that the spacing 1/K is <= step."""
    return max(1, math.ceil(1.0 / step - 1e-9))


def simplex_lattice(n: int, k: int) -> np.ndarray:
    """All points of the n-simplex with coordinates in {0, 1/k, ..., 1}.

    Rows are ordered lexicographically by the integer composition, so the
    vertex e_{n-1} comes first and e_0 last.
    """
    if n == 1:
        return np.ones((1, 1))
    rows = []
    for bars in combinations(range(k + n - 1), n - 1):
        prev = -1
        comp = []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(k + n - 2 - prev)
        rows.append(comp)
    return np.asarray(rows, dtype=float) / k


def _lattice_size(dims: Sequence[int], k: int) -> int:
    return math.prod(math.comb(k + n - 1, n - 1) for n in dims)


def _evaluate(objective: Objective, blocks: Sequence[np.ndarray]) -> np.ndarray:
    vals = np.asarray(objective(*blocks), dtype=float).reshape(-1)
    if vals.shape[0] != blocks[0].shape[0]:
        raise ValueError("objective must return one value per batch row")
    if not np.all(np.isfinite(vals)):
        raise NumericError("objective returned a non-finite value")
    return vals


def _value_at(objective: Objective, point: Sequence[np.ndarray]) -> float:
    return float(_evaluate(objective, [np.asarray(p, dtype=float)[None, :] for p in point])[0])


def _scan_lattice(objective: Objective, dims: Sequence[int], k: int, keep: int):
    """Evaluate the full product lattice; return the ``keep`` best cells.

    Ties are broken toward the lower flat lattice index, so the scan is
    deterministic regardless of chunking.
    """
    lats = [simplex_lattice(n, k) for n in dims]
    sizes = [len(l) for l in lats]
    total = math.prod(sizes)
    best_v = np.empty(0)
    best_i = np.empty(0, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        idx = np.unravel_index(flat, sizes)
        vals = _evaluate(objective, [l[i] for l, i in zip(lats, idx)])
        v = np.concatenate([best_v, vals])
        i = np.concatenate([best_i, flat])
        order = np.lexsort((i, -v))[:keep]
        best_v, best_i = v[order], i[order]
    cells = []
    for fi in best_i:
        idx = np.unravel_index(int(fi), sizes)
        cells.append([l[j] for l, j in zip(lats, idx)])
    return cells, total


def grid_oracle(objective: Objective, simplex_dims: Sequence[int], step: float) -> OptResult:
    """Brute-force maximum over the product lattice with spacing <= ``step``."""
    if not 0 < step <= 1:
        raise ValueError(f"step must lie in (0, 1], got {step}")
    k = lattice_divisions(step)
    cells, total = _scan_lattice(objective, simplex_dims, k, 1)
    point = cells[0]
    return OptResult(
        value=_value_at(objective, point),
        argopt=tuple(Dist(p) for p in point),
        iterations=total,
        certified_grid_step=1.0 / k,
    )


def _pair_moves(n: int) -> np.ndarray:
    return np.array([(i, j) for i in range(n) for j in range(n) if i != j], dtype=int).reshape(-1, 2)


def coordinate_ascent(
    objective: Objective,
    starts: Sequence[Sequence[np.ndarray]],
    init_step: float,
    cfg: OptimizerConfig,
):
    """Projected pattern-search ascent, one simplex block at a time.

    All starts advance together. A move shifts mass ``min(step, p_j)`` from
    coordinate j to coordinate i of one block, so iterates never leave the
    simplex. The best improving move is taken; a sweep with no improvement
    halves that start's step; a successful sweep doubles it (capped at 1/2).
    Values are monotone nondecreasing per start. Derivative free, so it also
    handles min-of-branches objectives.
    """
    nblocks = len(starts[0])
    x = [np.array([s[b] for s in starts], dtype=float) for b in range(nblocks)]
    nstart = x[0].shape[0]
    v = _evaluate(objective, x)
    step = np.full(nstart, float(init_step))
    floor = cfg.convergence_tol
    moves = [_pair_moves(blk.shape[1]) for blk in x]
    history = [float(v.max())]
    it = 0
    while it < cfg.max_iters:
        active = step >= floor
        if not np.any(active):
            break
        it += 1
        improved = np.zeros(nstart, dtype=bool)
        for b in range(nblocks):
            mv = moves[b]
            if len(mv) == 0:
                continue
            act = np.flatnonzero(step >= floor)
            if act.size == 0:
                break
            xb = x[b][act]
            ncand = len(mv)
            cand = np.repeat(xb[:, None, :], ncand, axis=1)
            src = xb[:, mv[:, 1]]
            delta = np.minimum(step[act][:, None], src)
            rows = np.arange(ncand)
            cand[:, rows, mv[:, 0]] += delta
            cand[:, rows, mv[:, 1]] -= delta
            np.clip(cand, 0.0, None, out=cand)
            cand /= cand.sum(axis=2, keepdims=True)
            blocks = []
            for o in range(nblocks):
                if o == b:
                    blocks.append(cand.reshape(-1, cand.shape[2]))
                else:
                    blocks.append(np.repeat(x[o][act], ncand, axis=0))
            vals = _evaluate(objective, blocks).reshape(act.size, ncand)
            vals = np.where(delta > 0, vals, -np.inf)
            best = np.argmax(vals, axis=1)
            bv = vals[np.arange(act.size), best]
            up = bv > v[act]
            sel = act[up]
            x[b][sel] = cand[np.flatnonzero(up), best[up]]
            v[sel] = bv[up]
            improved[sel] = True
        act = step >= floor
        step = np.where(act & improved, np.minimum(step * 2.0, 0.5), step)
        step = np.where(act & ~improved, step * 0.5, step)
        history.append(float(v.max()))
    return [[x[b][s] for b in range(nblocks)] for s in range(nstart)], v, it, history


def random_simplex_points(rng: np.random.Generator, dims: Sequence[int], count: int, alpha: float = 1.0):
    return [[rng.dirichlet(np.full(n, alpha)) if n > 1 else np.ones(1) for n in dims] for _ in range(count)]


def maximize_product_input(
    objective: Objective,
    simplex_dims: Sequence[int],
    cfg: OptimizerConfig | None = None,
    extra_starts: Sequence[Sequence[np.ndarray]] = (),
) -> OptResult:
    """Coarse lattice scan followed by multistart coordinate ascent.

    Starts are the ``cfg.top_cells`` best lattice cells, ``cfg.multistarts``
    seeded random points and any ``extra_starts``. The returned value is the
    objective re-evaluated at the returned point and is never below the best
    lattice value at the certified step.
    """
    cfg = cfg or OptimizerConfig()
    dims = [int(n) for n in simplex_dims]
    k = lattice_divisions(cfg.grid_step)
    while k > 1 and _lattice_size(dims, k) > cfg.max_grid_points:
        k -= 1
    cells, _ = _scan_lattice(objective, dims, k, cfg.top_cells)
    rng = np.random.default_rng(cfg.rng_seed)
    starts = list(cells) + random_simplex_points(rng, dims, cfg.multistarts)
    starts += [[np.asarray(b, dtype=float) for b in s] for s in extra_starts]
    finals, _, iters, history = coordinate_ascent(objective, starts, 1.0 / k, cfg)
    # the lattice best stays a candidate so refinement can never lose to it
    candidates = [cells[0]] + finals
    values = [_value_at(objective, c) for c in candidates]
    best = int(np.argmax(values))
    return OptResult(
        value=values[best],
        argopt=tuple(Dist(p) for p in candidates[best]),
        iterations=iters,
        certified_grid_step=1.0 / k,
        history=tuple(history),
    )


# ---------------------------------------------------------------------------
# Blahut-Arimoto


def _kl_rows(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(W(.|x) || q) in bits for each input row, batched over the leading axis."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(w > 0, w / q[:, None, :], 1.0)
        terms = np.where(w > 0, w * np.log2(ratio), 0.0)
    return terms.sum(axis=2)


def blahut_arimoto_batch(w: np.ndarray, tol: float, max_iters: int, init: np.ndarray | None = None):
    """Capacity of a batch of channels ``w[N, x, y]``.

    Returns ``(capacity, input_law, iterations, lower_bound_trace)``. The
    capacity reported is I(p;W) at the final input, a lower bound that is
    within ``tol`` of the upper bound max_x D(W(.|x)||q) on convergence.
    """
    w = np.asarray(w, dtype=float)
    nb, nx, _ = w.shape
    p = np.full((nb, nx), 1.0 / nx) if init is None else np.array(init, dtype=float)
    done = np.zeros(nb, dtype=bool)
    trace = []
    it = 0
    while True:
        q = np.einsum("nx,nxy->ny", p, w)
        d = _kl_rows(w, q)
        lower = (p * d).sum(axis=1)
        upper = d.max(axis=1)
        trace.append(lower.copy())
        done |= (upper - lower) <= tol
        if np.all(done) or it >= max_iters:
            break
        it += 1
        upd = p * np.exp2(d - upper[:, None])
        upd /= upd.sum(axis=1, keepdims=True)
        p = np.where(done[:, None], p, upd)
    return lower, p, it, trace


def blahut_arimoto(ch, cfg: OptimizerConfig | None = None) -> OptResult:
    """Capacity max_p I(X;Y) of a single channel p(y|x)."""
    cfg = cfg or OptimizerConfig()
    if not isinstance(ch, CondDist):
        ch = CondDist(ch)
    w = ch.table
    if w.ndim != 2:
        raise ValueError("blahut_arimoto needs a 2-D channel p(y|x)")
    cap, p, it, trace = blahut_arimoto_batch(w[None], cfg.convergence_tol, cfg.max_iters)
    return OptResult(
        value=float(cap[0]),
        argopt=(Dist(p[0]),),
        iterations=it,
        certified_grid_step=None,
        history=tuple(float(t[0]) for t in trace),
    )
