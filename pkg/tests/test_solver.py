import math
import warnings

import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import random_instance
from modulus_lab import (CellSpace, ContractError, Grid, InstanceTooLargeError, Measure,
                         MeasureSystem, Metric, SolveOptions, UnsupportedInstanceError,
                         brute_force_modulus, eval_atomic_modulus_sub1, integrate, is_admissible,
                         p_energy, rectangle_family, solve, solve_modulus, solve_modulus_l1,
                         uniqueness_check)
from modulus_lab.oracles import atom_system, block_system


def test_options_validation():
    with pytest.raises(ContractError):
        SolveOptions(gap_tol=0.0)
    with pytest.raises(ContractError):
        SolveOptions(max_iters=0)
    with pytest.raises(ContractError):
        SolveOptions(feas_tol=1.5)


@pytest.mark.parametrize("nx", [2, 4, 8])
def test_rectangle_gamma0(nx):
    g = Grid(1.0, 2.0, nx, 2 * nx)
    r = solve_modulus(rectangle_family(g, "Gamma0"), g.space, 2.0)
    assert r.optimal and r.value == pytest.approx(2.0, rel=1e-10)
    assert np.allclose(r.metric.values, 1.0, atol=1e-10)


def test_block_p2():
    space, sys_ = block_system(4.0, 4)
    r = solve_modulus(sys_, space, 2.0)
    assert r.value == pytest.approx(0.25, rel=1e-12)
    assert np.allclose(r.metric.values, 0.25)


def test_empty_and_infeasible():
    s = CellSpace.uniform(3)
    r = solve(MeasureSystem.empty(), s, 2.0)
    assert r.status == "empty-system" and r.value == 0.0 and not r.metric.values.any()
    assert solve(MeasureSystem.empty(), s, 1.0).value == 0.0
    bad = MeasureSystem((Measure(), Measure([0], [1.0])), allow_empty=True)
    for p in (1.0, 2.0):
        r = solve(bad, s, p)
        assert r.status == "infeasible" and math.isinf(r.value)


def test_report_invariants_random():
    rng = np.random.default_rng(7)
    opts = SolveOptions()
    for k in range(40):
        space, sys_ = random_instance(rng, 8, 6)
        p = [1.0, 1.3, 2.0, 4.0][k % 4]
        r = solve(sys_, space, p, opts)
        assert r.optimal
        assert is_admissible(r.metric, sys_, opts.feas_tol)
        assert r.gap <= opts.gap_tol
        assert r.value == pytest.approx(p_energy(r.metric, space, p), rel=1e-14)
        assert np.all(r.dual >= 0)
        for i in r.active_set:
            assert abs(integrate(r.metric, sys_[i]) - 1) <= opts.feas_tol


def test_l1_matches_highs():
    rng = np.random.default_rng(11)
    for _ in range(30):
        space, sys_ = random_instance(rng, 6, 5)
        A = sys_.matrix(space.n_cells).toarray()
        ref = linprog(space.weights, A_ub=-A, b_ub=-np.ones(len(sys_)), method="highs")
        r = solve_modulus_l1(sys_, space)
        assert r.value == pytest.approx(ref.fun, rel=1e-10)
        assert np.all(A.T @ r.dual <= space.weights * (1 + 1e-10))
        assert r.dual.sum() == pytest.approx(r.value, rel=1e-10)


def test_l1_rectangle_and_block():
    g = Grid(1.0, 2.0, 4, 8)
    assert solve_modulus_l1(rectangle_family(g, "Gamma0"), g.space).value == pytest.approx(2.0)
    space, sys_ = block_system(4.0, 4)
    r = solve_modulus_l1(sys_, space)
    assert r.value == pytest.approx(1.0)
    B = np.flatnonzero(r.metric.values)
    assert np.allclose(r.metric.values[B], 1.0 / space.mass(B))


def test_p_near_one_routes_to_lp():
    space, sys_ = block_system(4.0, 4)
    r = solve_modulus(sys_, space, 1 + 1e-7)
    assert r.value == pytest.approx(1.0, abs=1e-5)


def test_p_close_to_one_still_converges():
    space, sys_ = block_system(4.0, 4)
    for p in (1.01, 1.05):
        r = solve_modulus(sys_, space, p)
        assert r.optimal and r.value == pytest.approx(4.0 ** (1 - p), rel=1e-8)


def test_max_iters_reports_best_iterate():
    rng = np.random.default_rng(5)
    space, sys_ = random_instance(rng, 8, 6)
    r = solve_modulus(sys_, space, 3.0, SolveOptions(max_iters=1))
    assert r.status in ("max-iters", "optimal")
    assert is_admissible(r.metric, sys_, 1e-9)


def test_atomic_sub1():
    space, sys_ = atom_system([0.25, 1.0, 3.0])
    res = eval_atomic_modulus_sub1(sys_, space, 0.5)
    assert res.value == 0.5
    assert np.array_equal(res.metric.values, [4.0, 0.0, 0.0])
    space, sys_ = atom_system([1.0])
    assert eval_atomic_modulus_sub1(sys_, space, 0.3).value == 1.0
    space, sys_ = atom_system([2.0, 2.0])
    res = eval_atomic_modulus_sub1(sys_, space, 0.5)
    assert res.value == pytest.approx(math.sqrt(2), rel=1e-15) and len(res.witnesses) == 2
    res = eval_atomic_modulus_sub1(sys_, space, 0.5, divisible=True)
    assert res.value == 0.0 and not res.extremal_exists
    with pytest.raises(ContractError):
        eval_atomic_modulus_sub1(sys_, space, 1.5)
    block_space, block = block_system()
    with pytest.raises(UnsupportedInstanceError):
        eval_atomic_modulus_sub1(block, block_space, 0.5)


def test_brute_force_examples():
    one = CellSpace.uniform(1)
    r = brute_force_modulus(MeasureSystem((Measure([0], [1.0]),)), one, 2.0)
    assert r.value == pytest.approx(1.0)
    space, sys_ = block_system(4.0, 4)
    r = brute_force_modulus(sys_, space, 2.0, step=1e-3)
    assert abs(r.value - 0.25) <= r.resolution
    big = CellSpace.uniform(6)
    with pytest.raises(InstanceTooLargeError):
        brute_force_modulus(MeasureSystem((Measure(range(6), [1.0] * 6),)), big, 2.0)


def test_brute_force_agrees_with_solver():
    rng = np.random.default_rng(2)
    for k in range(12):
        space, sys_ = random_instance(rng, 3, 2)
        p = 2.0 if k % 2 else 1.0
        b = brute_force_modulus(sys_, space, p, step=1e-3)
        r = solve(sys_, space, p)
        assert r.value <= b.value + 1e-9
        assert b.value - r.value <= b.resolution


def test_uniqueness():
    g = Grid(1.0, 2.0, 4, 8)
    u = uniqueness_check(rectangle_family(g, "Gamma0"), g.space, 2.0)
    assert u.unique and all(np.allclose(m.values, 1.0, atol=1e-8) for m in u.metrics)
    space, sys_ = block_system(4.0, 4)
    u = uniqueness_check(sys_, space, 1.0)
    assert not u.unique
    assert all(v == pytest.approx(1.0) for v in u.values)
    one = CellSpace.uniform(1)
    assert uniqueness_check(MeasureSystem((Measure([0], [2.0]),)), one, 2.0).unique
