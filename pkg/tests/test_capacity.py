import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmic import capacity as cap
from dmic.channel import X1, X2, Y1, Y2, induced_tables
from dmic.channels import builtin_channel, compose_weak, from_functions
from dmic.errors import MarkovViolationError, PreconditionError
from dmic.optimize import OptimizerConfig, grid_oracle
from dmic.probcore import h2, information

FAST = OptimizerConfig(grid_step=0.05, multistarts=2)


def test_theorem1_objective_example5_uniform():
    c = builtin_channel("example5")
    u = np.array([[0.5, 0.5]])
    assert cap.theorem1_objective(c)(u, u)[0] == pytest.approx(1 - float(h2(0.1)), abs=1e-12)


def test_noiseless_example2():
    res = cap.sumrate_weak_zic(builtin_channel("example2(0)"))
    assert res.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("name", ["example1", "example3(0.2)", "example4:0.1,0.3"])
def test_weak_sumrate_matches_lattice(name):
    c = builtin_channel(name)
    res = cap.sumrate_weak_zic(c)
    ref = grid_oracle(cap.theorem1_objective(c), (c.nx1, c.nx2), 0.005)
    assert res.value >= ref.value - 1e-9
    assert res.value - ref.value <= 1e-3
    # the reported value is the objective at the reported input
    p1, p2 = (d.values[None] for d in res.argopt)
    assert cap.theorem1_objective(c)(p1, p2)[0] == pytest.approx(res.value, abs=1e-15)


def test_weak_sumrate_preconditions():
    with pytest.raises(PreconditionError):
        cap.sumrate_weak_zic(builtin_channel("example6"))
    with pytest.raises(PreconditionError):
        cap.sumrate_weak_zic(builtin_channel("appendix"))


def test_mixed_sumrate_preconditions():
    # degraded, but receiver 2 does not see user 1 better
    with pytest.raises(PreconditionError) as err:
        cap.sumrate_mixed(builtin_channel("example5"), FAST)
    assert "mixed-mi" in err.value.verdict
    with pytest.raises(PreconditionError):
        cap.sumrate_mixed(builtin_channel("appendix"), FAST)


def test_theorem3_min_form():
    c = builtin_channel("example6")
    p1 = np.array([[0.5, 0.5], [0.2, 0.8]])
    p2 = np.array([[0.5, 0.5], [0.7, 0.3]])
    j = induced_tables(c, p1, p2)
    own = information(j, [X2], [Y2], [X1], batch_ndim=1)
    to_y1 = information(j, [X1], [Y1], batch_ndim=1)
    to_y2 = information(j, [X1], [Y2], batch_ndim=1)
    # uniform x2 hides x1 completely from receiver 2
    assert to_y2[0] == pytest.approx(0.0, abs=1e-15)
    assert_allclose(cap.theorem3_objective(c)(p1, p2), own + np.minimum(to_y1, to_y2), atol=1e-15)


def test_lemma1_corners_special_cases():
    c = builtin_channel("example5")
    p1 = np.array([[0.3, 0.7]])
    p2 = np.array([[0.6, 0.4]])
    j = induced_tables(c, p1, p2)
    tin = [information(j, [X1], [Y1], batch_ndim=1)[0], information(j, [X2], [Y2], batch_ndim=1)[0]]
    assert_allclose(cap.lemma1_corners(c, np.ones((1, 1)), p2[:, None, :], p1)[0], tin, atol=1e-14)
    # U = X2: user 2 is decoded entirely at receiver 1
    full = [information(j, [X1], [Y1], [X2], batch_ndim=1)[0], information(j, [X2], [Y1], batch_ndim=1)[0]]
    assert_allclose(cap.lemma1_corners(c, p2, np.eye(2)[None], p1)[0], full, atol=1e-14)


def test_extreme_points_with_constant_u():
    c = builtin_channel("example3")
    aux = cap.AuxiliaryInput([1.0], [[0.4, 0.6]], [0.5, 0.5])
    a, b = cap.region_extreme_points(c, aux)
    assert a == pytest.approx(b)
    with pytest.raises(ValueError):
        cap.AuxiliaryInput(np.full(6, 1 / 6), np.full((6, 2), 0.5), [0.5, 0.5]).check(c)


def test_example2_triangle_and_simple_bound():
    c = builtin_channel("example2(0.1)")
    target = 1 - float(h2(0.1))
    ach = cap.achievable_region_zic(c, samples=500)
    simple = cap.simple_outer_bound(c, samples=300)
    assert ach.max_sum == pytest.approx(target, abs=1e-4)
    assert simple.max_sum == pytest.approx(target, abs=1e-6)
    assert simple.contains_region(ach, tol=1e-6)


def test_achievable_region_is_seeded():
    c = builtin_channel("example5")
    a = cap.achievable_region_zic(c, samples=200)
    b = cap.achievable_region_zic(c, samples=200)
    assert a.vertices == b.vertices
    assert a.meta["seed"] == 0


def test_y2prime_maps():
    c = builtin_channel("example5")
    assert cap.y2prime_violation(c, cap.xor_map(2, 2)) <= 1e-12
    assert cap.y2prime_violation(c, cap.bijection_map(2, 2)) <= 1e-12
    deg = cap.attach_y2prime(c, cap.xor_map(2, 2))
    assert deg.ny2 == 2
    with pytest.raises(MarkovViolationError) as err:
        cap.attach_y2prime(c, np.zeros((2, 2), dtype=int))
    assert err.value.max_violation > 0.1
    with pytest.raises(ValueError):
        cap.attach_y2prime(c, np.zeros((3, 2), dtype=int))


def test_bc_bound_preconditions():
    with pytest.raises(PreconditionError):
        cap.bc_outer_bound(builtin_channel("appendix"), cap.bijection_map(2, 2))
    with pytest.raises(PreconditionError):
        cap.bc_outer_bound(builtin_channel("example6"), cap.bijection_map(2, 2))


def test_gaussian_one_sided_value():
    # 1/2 log2(2) + 1/2 log2(1 + 1/1.5)
    expected = 0.5 + 0.5 * math.log2(5 / 3)
    assert cap.gaussian_reference(1, 1, 0.5, 0, "one-sided-weak") == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.868483, abs=1e-6)


def test_gaussian_regime_checks():
    with pytest.raises(ValueError):
        cap.gaussian_reference(1, 1, 1.5, 0, "one-sided-weak")
    with pytest.raises(ValueError):
        cap.gaussian_reference(1, 1, 0.5, 0.5, "mixed")
    with pytest.raises(ValueError):
        cap.gaussian_reference(1, 1, 0.5, 2, "strong")
    # with b large the second branch is not binding
    branches = cap.gaussian_mixed_branches(1, 1, 0.5, 100)
    assert cap.gaussian_reference(1, 1, 0.5, 100, "mixed") == pytest.approx(min(branches) + 0.5)


def test_bc_bound_map_choice_on_example5():
    # a Y2' that also carries x1 can only loosen the bound
    c = builtin_channel("example5")
    xor = cap.bc_outer_bound(c, cap.xor_map(2, 2))
    pair = cap.bc_outer_bound(c, cap.bijection_map(2, 2))
    assert pair.contains_region(xor, tol=1e-6)
    assert pair.max_r2 > xor.max_r2 + 0.1
    # y2' = x1 xor x2 xor noise is a BSC(0.1) from the cooperating senders
    assert xor.max_r2 == pytest.approx(1 - float(h2(0.1)), abs=1e-6)


def test_xor_map_output_law():
    c = builtin_channel("example5")
    deg = cap.attach_y2prime(c, cap.xor_map(2, 2))
    rows = deg.y2_table.reshape(4, 2)  # x1x2 = 00, 01, 10, 11
    assert_allclose(rows, [[0.1, 0.9], [0.9, 0.1], [0.9, 0.1], [0.1, 0.9]], atol=1e-15)


def test_example2_xor_map_merges_outputs():
    # y2' = x1 xor y2 reproduces y1 exactly
    deg = cap.attach_y2prime(builtin_channel("example2(0.1)"), cap.xor_map(2, 2))
    assert_allclose(deg.t.sum(axis=(2, 3)), 1.0)
    off_diagonal = deg.t[:, :, 0, 1] + deg.t[:, :, 1, 0]
    assert_allclose(off_diagonal, 0.0, atol=1e-15)


def test_bijection_map_valid_on_random_weak_channels():
    rng = np.random.default_rng(11)
    for _ in range(100):
        nx1, nx2, ny1, ny2 = (int(v) for v in rng.integers(2, 4, size=4))
        c = compose_weak(rng.dirichlet(np.ones(ny2), nx2), rng.dirichlet(np.ones(ny1), (nx1, ny2)))
        assert cap.y2prime_violation(c, cap.bijection_map(nx1, ny2)) <= 1e-9


def test_noiseless_product_channel_rectangle():
    c = from_functions(2, 4, 2, 4, lambda a, b: {(a, b): 1.0})
    simple = cap.simple_outer_bound(c, FAST, directions=5, samples=100)
    assert simple.contains((1.0, 2.0), tol=1e-6)
    assert simple.max_r1 == pytest.approx(1.0, abs=1e-6)
    assert simple.max_r2 == pytest.approx(2.0, abs=1e-6)
    assert not simple.contains((1.01, 2.0), tol=1e-6)


def test_example5_sum_rate_edge_is_tight():
    c = builtin_channel("example5")
    ach = cap.achievable_region_zic(c)
    assert ach.max_sum == pytest.approx(cap.sumrate_weak_zic(c).value, abs=1e-3)


def test_gaussian_mixed_symmetric_value():
    value = cap.gaussian_reference(1, 1, 1, 1, "mixed")
    assert value == pytest.approx(0.5 * math.log2(1.5) + 0.5, abs=1e-12)


def test_gaussian_one_sided_decreasing_in_a():
    vals = [cap.gaussian_reference(2.0, 3.0, a, 0, "one-sided-weak") for a in np.linspace(0, 0.99, 50)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
