import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmic.errors import NumericError
from dmic.optimize import (
    OptimizerConfig,
    blahut_arimoto,
    coordinate_ascent,
    grid_oracle,
    lattice_divisions,
    maximize_product_input,
    simplex_lattice,
)
from dmic.probcore import h2


def test_lattice_counts():
    for n, k in [(2, 10), (3, 5), (4, 3)]:
        pts = simplex_lattice(n, k)
        assert len(pts) == math.comb(k + n - 1, n - 1)
        assert_allclose(pts.sum(axis=1), 1.0)
        assert pts.min() >= 0
    assert lattice_divisions(0.001) == 1000
    assert lattice_divisions(0.3) == 4


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(grid_step=0)
    with pytest.raises(ValueError):
        OptimizerConfig(multistarts=0)


def entropy_sum(p1, p2):
    return -(np.where(p1 > 0, p1 * np.log2(np.where(p1 > 0, p1, 1)), 0)).sum(axis=1) - (
        np.where(p2 > 0, p2 * np.log2(np.where(p2 > 0, p2, 1)), 0)
    ).sum(axis=1)


def test_grid_oracle_finds_uniform():
    res = grid_oracle(entropy_sum, (3, 2), 0.01)
    # 1/3 is not on the step-0.01 lattice, so the best cell is within one step
    assert res.value == pytest.approx(math.log2(3) + 1, abs=1e-3)
    assert res.certified_grid_step == pytest.approx(0.01)


def test_maximize_refines_past_lattice():
    res = maximize_product_input(entropy_sum, (3, 2), OptimizerConfig(grid_step=0.1))
    assert res.value == pytest.approx(math.log2(3) + 1, abs=1e-8)
    assert_allclose(res.argopt[0].values, [1 / 3] * 3, atol=1e-4)


def test_maximize_never_below_lattice():
    def bumpy(p1, p2):
        x = p1[:, 0]
        return np.sin(9 * x) + 0.3 * np.cos(17 * x) + p2[:, 0] * 0
    cfg = OptimizerConfig(grid_step=0.05)
    opt = maximize_product_input(bumpy, (2, 2), cfg)
    lat = grid_oracle(bumpy, (2, 2), 0.05)
    assert opt.value >= lat.value - 1e-12


def test_min_of_branches_objective():
    # maximum of a min of two linear branches sits on their crossing
    def f(p1, p2):
        x = p1[:, 1]
        return np.minimum(x, 1 - 0.5 * x) + 0 * p2[:, 0]
    res = maximize_product_input(f, (2, 1), OptimizerConfig())
    assert res.value == pytest.approx(2 / 3, abs=1e-8)


def test_ascent_is_monotone():
    rng = np.random.default_rng(0)
    starts = [[rng.dirichlet(np.ones(3))] for _ in range(3)]
    _, _, _, hist = coordinate_ascent(lambda p: -((p - 0.2) ** 2).sum(axis=1), starts, 0.25, OptimizerConfig())
    assert all(b >= a - 1e-15 for a, b in zip(hist, hist[1:]))


def test_deterministic_given_seed():
    def f(p1, p2):
        return (p1 * np.array([0.3, 0.5, 0.2])).sum(axis=1) * p2[:, 0]
    a = maximize_product_input(f, (3, 2), OptimizerConfig(rng_seed=5))
    b = maximize_product_input(f, (3, 2), OptimizerConfig(rng_seed=5))
    assert a.value == b.value
    assert_allclose(a.blocks()[0], b.blocks()[0], atol=0)


def test_non_finite_objective_raises():
    with pytest.raises(NumericError):
        grid_oracle(lambda p: np.full(len(p), np.nan), (2,), 0.1)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.3])
def test_blahut_arimoto_bsc(eps):
    w = np.array([[1 - eps, eps], [eps, 1 - eps]])
    res = blahut_arimoto(w)
    assert res.value == pytest.approx(1 - float(h2(eps)), abs=1e-8)
    assert all(b >= a - 1e-12 for a, b in zip(res.history, res.history[1:]))


def test_blahut_arimoto_z_channel():
    # Z channel with crossover 1/2: capacity log2(5/4) at P(X=1) = 2/5
    w = np.array([[1.0, 0.0], [0.5, 0.5]])
    res = blahut_arimoto(w)
    assert res.value == pytest.approx(math.log2(1.25), abs=1e-8)
    assert res.argopt[0].values[1] == pytest.approx(0.4, abs=1e-4)
