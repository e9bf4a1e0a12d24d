"""Sum-rate capacities, achievable regions and outer bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import (
    DEFAULT_TOL,
    X1,
    X2,
    Y1,
    Y2,
    Dmic,
    check_degraded,
    classify_one_sided,
    factorize_weak,
    induced_tables,
    mi_condition_report,
)
from .errors import MarkovViolationError, PreconditionError
from .optimize import (
    OptimizerConfig,
    OptResult,
    blahut_arimoto_batch,
    lattice_divisions,
    maximize_product_input,
    simplex_lattice,
)
from .probcore import CondDist, Dist, information
from .regions import RatePoint, RateRegion

# ---------------------------------------------------------------------------
# objectives


def theorem1_objective(c: Dmic):
    """Batched I(X1;Y1) + I(X2;Y2) over product inputs."""

    def f(p1, p2):
        j = induced_tables(c, p1, p2)
        return information(j, [X1], [Y1], batch_ndim=1) + information(j, [X2], [Y2], batch_ndim=1)

    return f


def theorem3_objective(c: Dmic):
    """Batched I(X2;Y2|X1) + min{I(X1;Y1), I(X1;Y2)} over product inputs."""

    def f(p1, p2):
        j = induced_tables(c, p1, p2)
        own = information(j, [X2], [Y2], [X1], batch_ndim=1)
        # np.minimum keeps the first branch on ties
        return own + np.minimum(information(j, [X1], [Y1], batch_ndim=1), information(j, [X1], [Y2], batch_ndim=1))

    return f


def _require_weak_zic(c: Dmic, tol: float):
    one_sided = classify_one_sided(c, tol)
    wf = factorize_weak(c, tol) if one_sided else None
    if wf is None:
        raise PreconditionError(
            f"{c.name or 'channel'} is not a one-sided channel with weak interference",
            verdict={"one_sided": one_sided, "weak_factorization": wf is not None},
        )
    return wf


def _require_one_sided(c: Dmic, tol: float, what: str):
    if not classify_one_sided(c, tol):
        raise PreconditionError(f"{what} requires a one-sided channel", verdict={"one_sided": False})


# ---------------------------------------------------------------------------
# sum rates


def sumrate_weak_zic(c: Dmic, cfg: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> OptResult:
    """max over p(x1)p(x2) of I(X1;Y1) + I(X2;Y2) for a weak one-sided channel.

    With p(x2) fixed, I(X2;Y2) is a constant and I(X1;Y1) is the mutual
    information of the averaged channel p(y1|x1), so the inner problem is a
    channel capacity solved by Blahut-Arimoto; the outer search runs over
    p(x2) only.
    """
    cfg = cfg or OptimizerConfig()
    _require_weak_zic(c, tol)
    y1 = c.y1_table  # (x1, x2, y1)
    y2 = c.y2_table[0]  # (x2, y2)

    def inner(p2):
        w = np.einsum("nb,abc->nac", p2, y1)
        cap, p1, _, _ = blahut_arimoto_batch(w, cfg.convergence_tol, cfg.max_iters)
        return cap, p1

    def outer(p2):
        cap, _ = inner(p2)
        j2 = p2[:, :, None] * y2[None]
        return cap + information(j2, [0], [1], batch_ndim=1)

    res = maximize_product_input(outer, (c.nx2,), cfg)
    p2 = res.argopt[0].values
    _, p1 = inner(p2[None])
    p1 = p1[0]
    value = float(theorem1_objective(c)(p1[None], p2[None])[0])
    return OptResult(
        value=value,
        argopt=(Dist(p1), Dist(p2)),
        iterations=res.iterations,
        certified_grid_step=res.certified_grid_step,
        history=res.history,
    )


def sumrate_mixed(c: Dmic, cfg: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> OptResult:
    """Global max of I(X2;Y2|X1) + min{I(X1;Y1), I(X1;Y2)} for a mixed channel."""
    cfg = cfg or OptimizerConfig()
    degraded = check_degraded(c, tol)
    if not degraded:
        raise PreconditionError("sumrate_mixed requires X2 - (X1,Y2) - Y1", verdict={"degraded": False})
    rec = mi_condition_report(c, "mixed-mi", cfg, tol)
    if not rec.holds:
        raise PreconditionError(
            f"mixed-interference MI condition fails (min gap {rec.min_gap:.3g})",
            verdict={"degraded": True, "mixed-mi": rec.to_dict()},
        )
    return maximize_product_input(theorem3_objective(c), (c.nx1, c.nx2), cfg)


# ---------------------------------------------------------------------------
# achievable regions


@dataclass(frozen=True)
class AuxiliaryInput:
    """Input law p(u) p(x2|u) p(x1) for the rate-splitting auxiliary U."""

    pu: Dist
    px2_given_u: CondDist
    px1: Dist

    def __post_init__(self):
        for name, cls in (("pu", Dist), ("px2_given_u", CondDist), ("px1", Dist)):
            v = getattr(self, name)
            if not isinstance(v, cls):
                object.__setattr__(self, name, cls(v))
        if self.px2_given_u.table.ndim != 2 or self.px2_given_u.row_alphabet[0] != self.pu.size:
            raise ValueError("px2_given_u must have one row per value of U")

    @property
    def u_size(self) -> int:
        return self.pu.size

    def check(self, c: Dmic):
        if self.u_size > c.nx2 + 3:
            raise ValueError(f"|U|={self.u_size} exceeds |X2|+3={c.nx2 + 3}")
        if self.px2_given_u.col_alphabet != c.nx2 or self.px1.size != c.nx1:
            raise ValueError("auxiliary law does not match the channel alphabets")


def _aux_tables(c: Dmic, pu, px2u, px1):
    # axes U, X1, X2, Y1, Y2
    u_x2 = pu[:, :, None] * px2u  # (n, u, x2)
    inputs = u_x2[:, :, None, :] * px1[:, None, :, None]  # (n, u, x1, x2)
    return inputs[..., None, None] * c.t[None, None]


_U, _AX1, _AX2, _AY1, _AY2 = 0, 1, 2, 3, 4


def lemma1_corners(c: Dmic, pu, px2u, px1) -> np.ndarray:
    """Rectangle corners (I(X1;Y1|U), I(U;Y1) + I(X2;Y2|U)) for a batch of laws."""
    j = _aux_tables(c, pu, px2u, px1)
    r1 = information(j, [_AX1], [_AY1], [_U], batch_ndim=1)
    r2 = information(j, [_U], [_AY1], batch_ndim=1) + information(j, [_AX2], [_AY2], [_U], batch_ndim=1)
    return np.stack([r1, r2], axis=1)


def region_extreme_points(c: Dmic, aux: AuxiliaryInput) -> tuple[RatePoint, RatePoint]:
    """The two first-quadrant corners of the pentagon for one auxiliary law."""
    aux.check(c)
    j = _aux_tables(c, aux.pu.values[None], aux.px2_given_u.table[None], aux.px1.values[None])

    def mi(a, b, given=()):
        return float(information(j, a, b, given, batch_ndim=1)[0])

    first = RatePoint(mi([_AX1], [_AY1], [_U]), mi([_U], [_AY1]) + mi([_AX2], [_AY2], [_U]))
    r1 = mi([_U, _AX1], [_AY1]) - mi([_U], [_AY2])
    second = RatePoint(max(0.0, r1), mi([_AX2], [_AY2]))
    return first, second


def _product_lattice(dims, cfg: OptimizerConfig):
    k = lattice_divisions(cfg.grid_step)
    while k > 1 and math.prod(len(simplex_lattice(n, k)) for n in dims) > cfg.max_grid_points:
        k -= 1
    lats = [simplex_lattice(n, k) for n in dims]
    grids = np.meshgrid(*[np.arange(len(l)) for l in lats], indexing="ij")
    return [l[g.ravel()] for l, g in zip(lats, grids)], 1.0 / k


def achievable_region_zic(
    c: Dmic, cfg: OptimizerConfig | None = None, samples: int = 2000, tol: float = DEFAULT_TOL
) -> RateRegion:
    """Inner approximation of the rate-splitting region by sampled auxiliary laws.

    Laws sampled: constant U over the product-input lattice (treating
    interference as noise), U = X2 over the lattice, and ``samples`` seeded
    random laws with |U| up to |X2| + 3. The convex hull stands in for time
    sharing.
    """
    cfg = cfg or OptimizerConfig()
    _require_one_sided(c, tol, "achievable_region_zic")
    (p1, p2), step = _product_lattice((c.nx1, c.nx2), cfg)
    n = len(p1)
    pts = [lemma1_corners(c, np.ones((n, 1)), p2[:, None, :], p1)]
    eye = np.broadcast_to(np.eye(c.nx2), (n, c.nx2, c.nx2))
    pts.append(lemma1_corners(c, p2, eye, p1))
    rng = np.random.default_rng(cfg.rng_seed)
    ks = rng.integers(2, c.nx2 + 4, size=samples)
    for k in range(2, c.nx2 + 4):
        m = int(np.sum(ks == k))
        if m == 0:
            continue
        pu = rng.dirichlet(np.full(k, 1.0), size=m)
        px2u = rng.dirichlet(np.full(c.nx2, 0.5), size=(m, k))
        px1 = rng.dirichlet(np.full(c.nx1, 1.0), size=m)
        pts.append(lemma1_corners(c, pu, px2u, px1))
    pts = np.concatenate(pts)
    meta = {"kind": "achievable-zic", "samples": samples, "lattice_points": n, "grid_step": step, "seed": cfg.rng_seed}
    return RateRegion.from_points(pts, meta)


def mixed_scheme_points(c: Dmic, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Achievable corners for product inputs under three single-user-decoding schemes.

    User 1 decoded at both receivers (R1 = min{I(X1;Y1), I(X1;Y2)},
    R2 = I(X2;Y2|X1)); the mirror image for user 2; and both treating
    interference as noise.
    """
    j = induced_tables(c, p1, p2)

    def mi(a, b, given=()):
        return information(j, a, b, given, batch_ndim=1)

    i11, i12, i22, i21 = mi([X1], [Y1]), mi([X1], [Y2]), mi([X2], [Y2]), mi([X2], [Y1])
    a = np.stack([np.minimum(i11, i12), mi([X2], [Y2], [X1])], axis=1)
    b = np.stack([mi([X1], [Y1], [X2]), np.minimum(i22, i21)], axis=1)
    tin = np.stack([i11, i22], axis=1)
    return np.concatenate([a, b, tin])


def achievable_region_mixed(c: Dmic, cfg: OptimizerConfig | None = None, samples: int = 2000) -> RateRegion:
    cfg = cfg or OptimizerConfig()
    (p1, p2), step = _product_lattice((c.nx1, c.nx2), cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    r1 = rng.dirichlet(np.ones(c.nx1), size=samples)
    r2 = rng.dirichlet(np.ones(c.nx2), size=samples)
    pts = np.concatenate([mixed_scheme_points(c, p1, p2), mixed_scheme_points(c, r1, r2)])
    meta = {"kind": "achievable-mixed", "samples": samples, "lattice_points": len(p1), "grid_step": step,
            "seed": cfg.rng_seed}
    return RateRegion.from_points(pts, meta)


# ---------------------------------------------------------------------------
# outer bounds


def _directions(count: int) -> np.ndarray:
    th = np.linspace(0.0, math.pi / 2, max(2, count))
    w = np.stack([np.cos(th), np.sin(th)], axis=1)
    w[np.abs(w) < 1e-15] = 0.0
    return w


def _pentagon_corners(a, b, s) -> np.ndarray:
    """Corners of {R1 <= a, R2 <= b, R1 + R2 <= s} for batched a, b, s."""
    a, b, s = (np.maximum(v, 0.0) for v in (a, b, s))
    x = np.minimum(a, s)
    c1 = np.stack([x, np.clip(s - x, 0.0, b)], axis=-1)
    y = np.minimum(b, s)
    c2 = np.stack([np.clip(s - y, 0.0, a), y], axis=-1)
    return np.stack([c1, c2], axis=-2)


def simple_outer_bound(
    c: Dmic, cfg: OptimizerConfig | None = None, directions: int = 17, samples: int = 1000, tol: float = DEFAULT_TOL
) -> RateRegion:
    """Hull of the pentagons R1 <= I(X1;Y1|X2), R2 <= I(X2;Y2), R1+R2 <= I(X1;Y1)+I(X2;Y2).

    Pentagons come from the product-input lattice, seeded random inputs, and
    inputs maximizing the support function in ``directions`` directions.
    """
    cfg = cfg or OptimizerConfig()
    _require_one_sided(c, tol, "simple_outer_bound")

    def corners(p1, p2):
        j = induced_tables(c, p1, p2)
        a = information(j, [X1], [Y1], [X2], batch_ndim=1)
        b = information(j, [X2], [Y2], batch_ndim=1)
        s = information(j, [X1], [Y1], batch_ndim=1) + b
        return _pentagon_corners(a, b, s)

    (p1, p2), step = _product_lattice((c.nx1, c.nx2), cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    pts = [corners(p1, p2).reshape(-1, 2)]
    pts.append(corners(rng.dirichlet(np.ones(c.nx1), samples), rng.dirichlet(np.ones(c.nx2), samples)).reshape(-1, 2))
    for w in _directions(directions):
        res = maximize_product_input(lambda a, b: (corners(a, b) @ w).max(axis=1), (c.nx1, c.nx2), cfg)
        pts.append(corners(*[d.values[None] for d in res.argopt]).reshape(-1, 2))
    pts = np.concatenate(pts)
    meta = {"kind": "simple-outer", "samples": samples, "directions": directions, "grid_step": step,
            "seed": cfg.rng_seed}
    return RateRegion.from_points(pts, meta)


def bijection_map(nx1: int, ny2: int) -> np.ndarray:
    """y2' = (x1, y2) encoded as x1 * ny2 + y2."""
    return np.arange(nx1 * ny2).reshape(nx1, ny2)


def xor_map(nx1: int, ny2: int) -> np.ndarray:
    """y2' = (x1 + y2) mod ny2."""
    return (np.arange(nx1)[:, None] + np.arange(ny2)[None, :]) % ny2


def _y2prime_tensor(c: Dmic, y2map) -> np.ndarray:
    m = np.asarray(y2map)
    if m.shape != (c.nx1, c.ny2):
        raise ValueError(f"y2map must have shape (nx1, ny2)=({c.nx1}, {c.ny2}), got {m.shape}")
    if not np.issubdtype(m.dtype, np.integer):
        if not np.all(np.mod(m, 1) == 0):
            raise ValueError("y2map entries must be integers")
        m = m.astype(int)
    if m.min() < 0:
        raise ValueError("y2map entries must be nonnegative")
    k = int(m.max()) + 1
    onehot = np.eye(k)[m]  # (x1, y2, y2')
    return np.einsum("abcd,ade->abce", c.t, onehot)


def y2prime_violation(c: Dmic, y2map, tol: float = DEFAULT_TOL) -> float:
    """Largest spread of p(y1 | x1, x2, y2') across inputs with p(y2'|x1,x2) > tol."""
    tp = _y2prime_tensor(c, y2map)
    n = c.nx1 * c.nx2
    flat = tp.reshape(n, c.ny1, -1)
    py = flat.sum(axis=1)  # (x, y2')
    ok = py > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = flat / py[:, None, :]  # (x, y1, y2')
    mask = np.broadcast_to(ok[:, None, :], cond.shape)
    hi = np.where(mask, cond, -np.inf).max(axis=0)
    lo = np.where(mask, cond, np.inf).min(axis=0)
    spread = np.where(np.isfinite(hi) & np.isfinite(lo), hi - lo, 0.0)
    return float(spread.max()) if spread.size else 0.0


def attach_y2prime(c: Dmic, y2map, tol: float = DEFAULT_TOL) -> Dmic:
    """Degraded channel with outputs (Y1, Y2'), Y2' = f(X1, Y2).

    Raises ``MarkovViolationError`` unless (X1, X2) - Y2' - Y1.
    """
    _require_one_sided(c, tol, "attach_y2prime")
    viol = y2prime_violation(c, y2map, tol)
    if viol > tol:
        raise MarkovViolationError(f"(X1,X2) - Y2' - Y1 fails by {viol:.3g}", viol)
    name = f"{c.name}+y2'" if c.name else ""
    return Dmic(_y2prime_tensor(c, y2map), name=name, description="degraded channel with outputs (Y1, Y2')")


def _bc_corners(tb: np.ndarray, pu: np.ndarray, pxu: np.ndarray) -> np.ndarray:
    # axes U, X, Y1, Y2'
    j = (pu[:, :, None] * pxu)[..., None, None] * tb[None, None]
    r1 = information(j, [0], [2], batch_ndim=1)
    r2 = information(j, [1], [3], [0], batch_ndim=1)
    return np.stack([r1, r2], axis=1)


def bc_outer_bound(
    c: Dmic,
    y2map,
    cfg: OptimizerConfig | None = None,
    directions: int = 17,
    samples: int = 2000,
    tol: float = DEFAULT_TOL,
) -> RateRegion:
    """Degraded broadcast-channel outer bound R1 <= I(U;Y1), R2 <= I(X1X2;Y2'|U).

    Cooperating transmitters send X = (X1, X2) with any joint law p(x|u);
    |U| = min(|Y1|, |Y2'|, |X1||X2|). Corners come from seeded random laws
    and from maximizing w1 I(U;Y1) + w2 I(X;Y2'|U) in ``directions``
    directions. The result is an inner approximation of the true bound at
    the recorded sampling resolution.
    """
    cfg = cfg or OptimizerConfig()
    if not check_degraded(c, tol):
        raise PreconditionError("bc_outer_bound requires X2 - (X1,Y2) - Y1", verdict={"degraded": False})
    deg = attach_y2prime(c, y2map, tol)
    nx = c.nx1 * c.nx2
    tb = deg.t.reshape(nx, deg.ny1, deg.ny2)
    k = min(deg.ny1, deg.ny2, nx)
    rng = np.random.default_rng(cfg.rng_seed)
    pts = [
        _bc_corners(tb, rng.dirichlet(np.ones(k), samples), rng.dirichlet(np.full(nx, 0.5), (samples, k))),
        _bc_corners(tb, np.ones((1, 1)), np.full((1, 1, nx), 1.0 / nx)),
    ]
    dims = (k,) + (nx,) * k
    sub = replace(cfg, max_grid_points=min(cfg.max_grid_points, 2_000), multistarts=max(cfg.multistarts, 8))

    def weighted(w):
        def f(pu, *rows):
            return _bc_corners(tb, pu, np.stack(rows, axis=1)) @ w
        return f

    for w in _directions(directions):
        res = maximize_product_input(weighted(w), dims, sub)
        b = res.blocks()
        pts.append(_bc_corners(tb, b[0][None], np.stack(b[1:], axis=0)[None]))
    pts = np.concatenate(pts)
    meta = {"kind": "bc-outer", "u_size": k, "samples": samples, "directions": directions,
            "seed": cfg.rng_seed, "y2prime_size": deg.ny2}
    return RateRegion.from_points(pts, meta)


# ---------------------------------------------------------------------------
# Gaussian reference formulas (bits)


def _half_log(x: float) -> float:
    return 0.5 * math.log2(x)


def gaussian_mixed_branches(p1_power: float, p2_power: float, a: float, b: float) -> tuple[float, float]:
    return (
        _half_log(1 + p1_power / (1 + a * p2_power)),
        _half_log(1 + b * p1_power / (1 + p2_power)),
    )


def gaussian_reference(p1_power: float, p2_power: float, a: float, b: float, kind: str) -> float:
    """Closed-form sum-rate capacity of a Gaussian IC in the one-sided-weak or mixed regime."""
    if p1_power < 0 or p2_power < 0:
        raise ValueError("powers must be nonnegative")
    if kind == "one-sided-weak":
        if not (0 <= a < 1 and b == 0):
            raise ValueError("one-sided-weak needs 0 <= a < 1 and b = 0")
        return _half_log(1 + p2_power) + _half_log(1 + p1_power / (1 + a * p2_power))
    if kind == "mixed":
        if not (0 <= a <= 1 and b >= 1):
            raise ValueError("mixed needs 0 <= a <= 1 and b >= 1")
        return min(gaussian_mixed_branches(p1_power, p2_power, a, b)) + _half_log(1 + p2_power)
    raise ValueError(f"unknown kind {kind!r}; expected 'one-sided-weak' or 'mixed'")
