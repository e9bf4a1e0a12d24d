"""End-to-end acceptance checks, one test per criterion.

A pass/fail line per criterion is printed in the terminal summary.
"""

import json
import time

import numpy as np
import pytest

from dmic import capacity as cap
from dmic.channel import classify
from dmic.channels import builtin_channel, compose_weak
from dmic.cli import main
from dmic.optimize import OptimizerConfig, grid_oracle, maximize_product_input
from dmic.probcore import JointDist, h2, information, is_markov_chain
from dmic.transform import weak_alt_gap_surface

SUITE_SIZE = 1000


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.mark.criterion(1, "example5 sum rate 0.531 +- 0.002 in under 10 s")
def test_criterion_01_example5_sumrate(capsys):
    t0 = time.perf_counter()
    code, out = run_cli(capsys, "sumrate", "--builtin", "example5", "--json")
    elapsed = time.perf_counter() - t0
    value = json.loads(out)["value"]
    print(f"example5 sum rate {value:.6f} in {elapsed:.2f} s")
    assert code == 0
    assert abs(value - 0.531) <= 0.002
    assert elapsed < 10.0


@pytest.mark.criterion(2, "example2 family: C_sum = 1 - h2(eps), triangle axis points")
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.25])
def test_criterion_02_example2_family(eps):
    c = builtin_channel(f"example2({eps})")
    target = 1.0 - float(h2(eps))
    res = cap.sumrate_weak_zic(c)
    region = cap.achievable_region_zic(c)
    assert abs(res.value - target) <= 1e-4
    assert region.distance((target, 0.0)) <= 1e-4
    assert region.distance((0.0, target)) <= 1e-4


@pytest.mark.criterion(3, "example6 mixed sum rate 1.0 and R1 + R2 <= 1 on samples")
def test_criterion_03_example6_mixed():
    c = builtin_channel("example6")
    res = cap.sumrate_mixed(c)
    region = cap.achievable_region_mixed(c)
    sums = region.points.sum(axis=1)
    assert abs(res.value - 1.0) <= 1e-6
    assert len(sums) > 0
    assert sums.max() <= 1.0 + 1e-9
    assert region.max_sum == pytest.approx(1.0, abs=1e-6)


@pytest.mark.criterion(4, "appendix counterexample: -0.0625 entry, infeasible, gap surface >= 0")
def test_criterion_04_counterexample(capsys):
    code, out = run_cli(capsys, "counterexample")
    assert code == 0
    assert "-0.062500" in out
    assert "feasible=false" in out
    code, out = run_cli(capsys, "counterexample", "--json")
    doc = json.loads(out)
    assert doc["feasible"] is False
    assert abs(doc["min_entry"] - (-0.0625)) <= 1e-12
    off = doc["offending"][0]
    assert (off["x1"], off["y2"], off["y1"]) == (1, 1, 1)
    surface = weak_alt_gap_surface(builtin_channel("appendix"), 0.001)
    assert surface.min_gap >= -1e-9


BINARY_BUILTINS = ["example1", "example2", "example3", "example5", "example6", "appendix"]


@pytest.mark.criterion(5, "optimizer agrees with the step-0.001 lattice on binary built-ins")
@pytest.mark.parametrize("name", BINARY_BUILTINS)
def test_criterion_05_oracle_agreement(name):
    c = builtin_channel(name)
    assert c.is_binary
    f = cap.theorem3_objective(c) if name == "example6" else cap.theorem1_objective(c)
    opt = maximize_product_input(f, (2, 2), OptimizerConfig())
    ref = grid_oracle(f, (2, 2), 0.001)
    assert abs(opt.value - ref.value) <= 1e-3


@pytest.fixture(scope="module")
def example5_regions():
    c = builtin_channel("example5")
    y2map = cap.xor_map(c.nx1, c.ny2)
    return cap.achievable_region_zic(c), cap.simple_outer_bound(c), cap.bc_outer_bound(c, y2map)


@pytest.mark.criterion(6, "example5 region sandwich and improvement over the simple bound")
def test_criterion_06_region_sandwich(example5_regions):
    ach, simple, bc = example5_regions
    for v in ach.vertices:
        assert bc.distance(v) <= 1e-6
        assert simple.distance(v) <= 1e-6
    r2 = 0.9 * ach.max_r2
    assert bc.r1_limit(r2) < simple.r1_limit(r2)


def _random_weak_channel(rng, sizes):
    nx1, nx2, ny1, ny2 = sizes
    py2 = rng.dirichlet(np.ones(ny2), size=nx2)
    pprime = rng.dirichlet(np.ones(ny1), size=(nx1, ny2))
    return compose_weak(py2, pprime)


@pytest.mark.criterion(7, "I(U;Y2) - I(U;Y1|X1) >= 0 on random weak channels")
def test_criterion_07_inequality_suite():
    rng = np.random.default_rng(20260417)
    worst = np.inf
    for _ in range(SUITE_SIZE):
        sizes = tuple(int(s) for s in rng.integers(2, 4, size=4))
        c = _random_weak_channel(rng, sizes)
        nu = int(rng.integers(2, 5))
        pu = rng.dirichlet(np.ones(nu))
        px2u = rng.dirichlet(np.ones(c.nx2), size=nu)
        px1 = rng.dirichlet(np.ones(c.nx1))
        # axes U, X1, X2, Y1, Y2
        j = np.einsum("u,ub,a,abcd->uabcd", pu, px2u, px1, c.t)
        gap = information(j, [0], [4]) - information(j, [0], [3], [1])
        worst = min(worst, float(gap))
    print(f"worst gap over {SUITE_SIZE} channels: {worst:.3e}")
    assert worst >= -1e-9


def _random_cond(rng, cond_shape, n):
    return rng.dirichlet(np.ones(n), size=cond_shape)


def _sizes(rng, k):
    return [int(s) for s in rng.integers(2, 4, size=k)]


@pytest.mark.criterion(8, "Markov decomposition, weak union and contraction on random joints")
def test_criterion_08_markov_suite():
    rng = np.random.default_rng(8)
    worst = {"decomposition": 0.0, "weak union": 0.0, "contraction": 0.0}
    for _ in range(SUITE_SIZE):
        nx, ny, nz, nw = _sizes(rng, 4)
        # premise X - Y - (Z, W): p(y) p(x|y) p(z, w|y)
        py = rng.dirichlet(np.ones(ny))
        px_y = _random_cond(rng, ny, nx)
        pzw_y = _random_cond(rng, ny, nz * nw).reshape(ny, nz, nw)
        t = np.einsum("y,yx,yzw->xyzw", py, px_y, pzw_y)
        j = JointDist(t, ("X", "Y", "Z", "W"))
        assert is_markov_chain(j.group([["X"], ["Y"], ["Z", "W"]])).holds
        dec = is_markov_chain(j.marginal(["X", "Y", "Z"]))
        wu = is_markov_chain(j.group([["X"], ["Y", "W"], ["Z"]]))
        worst["decomposition"] = max(worst["decomposition"], dec.max_violation)
        worst["weak union"] = max(worst["weak union"], wu.max_violation)

        # premises X - Y - Z and X - (Y, Z) - W: p(y) p(x|y) p(z|y) p(w|y, z)
        pz_y = _random_cond(rng, ny, nz)
        pw_yz = _random_cond(rng, (ny, nz), nw)
        t = np.einsum("y,yx,yz,yzw->xyzw", py, px_y, pz_y, pw_yz)
        j = JointDist(t, ("X", "Y", "Z", "W"))
        assert is_markov_chain(j.marginal(["X", "Y", "Z"])).holds
        assert is_markov_chain(j.group([["X"], ["Y", "Z"], ["W"]])).holds
        con = is_markov_chain(j.group([["X"], ["Y"], ["Z", "W"]]))
        worst["contraction"] = max(worst["contraction"], con.max_violation)
    print("worst violations: " + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert max(worst.values()) <= 1e-9


@pytest.fixture(scope="module")
def reports():
    names = ["example1", "example2", "example3", "example4", "example5", "example6", "appendix"]
    return {n: classify(builtin_channel(n)) for n in names}


@pytest.mark.criterion(9, "classification table of the built-in channels")
def test_criterion_09_classification(reports):
    for n in ["example1", "example2", "example3", "example4", "example5"]:
        assert reports[n].one_sided and reports[n].weak, n
    r6 = reports["example6"]
    assert r6.degraded and r6.holds("mixed-mi") and r6.mixed
    assert not r6.one_sided
    ra = reports["appendix"]
    assert ra.one_sided and ra.holds("weak-alt") and not ra.degraded


@pytest.mark.criterion(10, "Gaussian reference formulas")
def test_criterion_10_gaussian():
    for p1, p2 in [(1.0, 1.0), (10.0, 3.0), (0.5, 7.0)]:
        free = 0.5 * np.log2(1 + p1) + 0.5 * np.log2(1 + p2)
        assert abs(cap.gaussian_reference(p1, p2, 0.0, 0.0, "one-sided-weak") - free) <= 1e-12
    for p in [0.1, 1.0, 10.0, 100.0]:
        b1, b2 = cap.gaussian_mixed_branches(p, p, 1.0, 1.0)
        assert abs(b1 - b2) <= 1e-12
