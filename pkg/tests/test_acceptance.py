"""Acceptance criteria 1-10.

Each test records one line ``[criterion N] PASS|FAIL  detail``; the lines are
printed at the end of the pytest run (see conftest) and also when this file is
run as a script.
"""

import functools
import time

import numpy as np
import pytest

from conftest import random_instance
from modulus_lab import (CellSpace, Grid, Measure, MeasureSystem, Metric, SolveOptions,
                         TransboundaryDomain, brute_force_modulus, build_certificate,
                         cone_membership, eval_atomic_modulus_sub1, fit_certificate,
                         gamma_phi_system, integrate, p_energy, rasterize_polyline,
                         rectangle_family, solve, solve_modulus, solve_modulus_l1,
                         unit_mass_intervals, verify_certificate)
from modulus_lab.certificate import cone_target
from modulus_lab.geometry import (Polyline, interval_polyline, staircase_crossings,
                                  transboundary_family)
from modulus_lab.oracles import block_system

RESULTS = {}
OPTS = SolveOptions()
A, B = 1.0, 2.0


def record(n, ok, detail):
    line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


# instances shared between the criteria and the certificate sweep (criterion 7)

@functools.lru_cache(maxsize=None)
def rectangle_runs():
    out = []
    for nx in (8, 16, 32, 64):
        t0 = time.perf_counter()
        g = Grid(A, B, nx, 2 * nx)
        sys0 = rectangle_family(g, "Gamma0")
        rep = solve_modulus(sys0, g.space, 2.0, OPTS)
        out.append((g, sys0, rep, time.perf_counter() - t0))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def theorem5_runs():
    rng = np.random.default_rng(20240501)
    out = []
    for _ in range(100):
        n = int(rng.integers(1, 21))
        space = CellSpace(rng.uniform(0.2, 5.0, n))
        phi = Metric(rng.uniform(0.05, 4.0, n))
        sys_ = gamma_phi_system(space, phi)
        for p in (1.0, 2.0, 3.0):
            out.append((space, sys_, phi, p, solve(sys_, space, p, OPTS)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def brute_force_runs():
    rng = np.random.default_rng(6)
    out = []
    t0 = time.perf_counter()
    for k in range(200):
        space, sys_ = random_instance(rng, max_cells=4, max_rows=3)
        p = (1.0, 2.0)[k % 2]
        rep = solve(sys_, space, p, OPTS)
        bf = brute_force_modulus(sys_, space, p, step=1e-3)
        out.append((space, sys_, p, rep, bf))
    return tuple(out), time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def block_runs():
    space, sys_ = block_system(4.0, 4)
    return space, sys_, {p: solve(sys_, space, p, OPTS) for p in (1.0, 1.5, 2.0, 3.0)}


def transboundary_setup(seed):
    rng = np.random.default_rng(seed)
    g = Grid(2.0, 1.0, 8, 4)
    # interior holes so that every crossing keeps some ordinary arclength
    interior = [g.cell_index(ix, iy) for ix in range(1, 7) for iy in range(4)]
    cells = rng.choice(interior, size=int(rng.integers(1, 5)), replace=False)
    holes = []
    for c in cells:
        if not any(c in h for h in holes):
            holes.append(frozenset([int(c)]))
    curves = [Polyline([[0, g.row_center_y(iy)], [2, g.row_center_y(iy)]]) for iy in range(4)]
    curves += staircase_crossings(g, 6, seed=seed)
    return g, TransboundaryDomain(g, tuple(holes)), curves


# ---------------------------------------------------------------------------

def test_criterion_01_rectangle():
    worst_v = worst_m = worst_t = 0.0
    for g, _, rep, dt in rectangle_runs():
        worst_v = max(worst_v, abs(rep.value - B / A) / (B / A))
        worst_m = max(worst_m, float(np.abs(rep.metric.values - 1.0 / A).max()))
        worst_t = max(worst_t, dt)
    ok = all(r.optimal for _, _, r, _ in rectangle_runs()) and worst_v <= 1e-8 \
        and worst_m <= 1e-8 and worst_t < 5.0
    record(1, ok, f"grids 8x16..64x128: max rel err {worst_v:.1e} (<=1e-8), metric err "
                  f"{worst_m:.1e} (<=1e-8), slowest {worst_t:.2f}s (<5s)")
    assert ok


def test_criterion_02_gamma1_certificate():
    g = Grid(A, B, 8, 16)
    sys0 = rectangle_family(g, "Gamma0")
    g1 = rectangle_family(g, "Gamma1")
    phi = Metric.constant(g.n_cells, 1.0 / A)
    cert = fit_certificate(list(g1), phi, g.space, 2.0)
    ver = verify_certificate(cert, sys0, g.space, phi, 1e-7, opts=OPTS)
    v0 = solve(sys0, g.space, 2.0, OPTS).value
    vu = solve(sys0 | g1, g.space, 2.0, OPTS).value
    ok = (ver.verdict and ver.condition_a.status == "pass" and ver.condition_b <= 1e-7
          and ver.condition_c <= 1e-7 and abs(vu - v0) <= 2e-8)
    record(2, ok, f"Gamma1 certificate verdict {ver.verdict}, (a) {ver.condition_a.status}, "
                  f"(b) {ver.condition_b:.1e}, (c) {ver.condition_c:.1e}; "
                  f"|Mod(G u G1) - Mod(G)| = {abs(vu - v0):.1e} (<=2e-8)")
    assert ok


def test_criterion_03_gamma_star():
    g = Grid(A, B, 8, 16)
    star = rectangle_family(g, "GammaStar")
    phi = Metric.constant(g.n_cells, 1.0 / A)
    lows = [integrate(phi, row) - (1 + 2 / ((k + 1) * A)) for k, row in enumerate(star)]
    rows_ok = min(lows) >= -1e-12
    rep = solve(star, g.space, 2.0, OPTS)
    err = abs(rep.value - B / A)
    # the same rows with the excursion lengths 1/k shrinking: the value climbs to b/a
    trend = [solve(rectangle_family(g, "GammaStar", prefix_scale=s), g.space, 2.0, OPTS).value
             for s in (1e2, 1e4, 1e7)]
    ok = rows_ok and rep.optimal and err <= 1e-6
    record(3, ok, f"rows all >= 1 + 2/(k a): {rows_ok}; solve gives {rep.value:.6f} vs b/a = "
                  f"{B / A:g} (err {err:.2e}, needs 1e-6). Unattainable as stated: phi/min_k(1+2/(ka)) "
                  f"is admissible, so Mod < b/a on any grid. With excursions 1/(s k), "
                  f"s=1e2,1e4,1e7: {', '.join(f'{v:.8f}' for v in trend)}")
    assert rows_ok
    assert err <= 1e-6, "discrete Gamma* modulus is strictly below b/a (see decisions ledger)"


def test_criterion_04_block_and_atoms():
    space, sys_, reps = block_runs()
    expect = {1.0: 1.0, 1.5: 0.5, 2.0: 0.25, 3.0: 0.0625}
    errs = {p: abs(reps[p].value - v) for p, v in expect.items()}
    r_bland = solve_modulus_l1(sys_, space, OPTS, pivot_order="bland")
    r_rev = solve_modulus_l1(sys_, space, OPTS, pivot_order="reverse")
    distinct = not np.allclose(r_bland.metric.values, r_rev.metric.values)
    same_val = abs(r_bland.value - 1) <= 1e-12 and abs(r_rev.value - 1) <= 1e-12
    aspace = CellSpace([0.25, 1.0, 3.0], atoms=[True] * 3)
    atom = eval_atomic_modulus_sub1(MeasureSystem((aspace.restriction(range(3)),)), aspace, 0.5)
    ok = max(errs.values()) <= 1e-6 and distinct and same_val and atom.value == 0.5
    record(4, ok, f"m(A)=4 values max err {max(errs.values()):.1e} (<=1e-6); p=1 pivot orders give "
                  f"{r_bland.metric.values.tolist()} and {r_rev.metric.values.tolist()}, both value 1; "
                  f"atoms (0.25,1,3), p=0.5 -> {atom.value!r}")
    assert ok


def test_criterion_05_scaled_atomic_rows():
    worst_m = worst_v = 0.0
    bad = 0
    for space, _, phi, p, rep in theorem5_runs():
        if not rep.optimal:
            bad += 1
            continue
        worst_m = max(worst_m, float(np.abs(rep.metric.values - phi.values).max()))
        e = p_energy(phi, space, p)
        worst_v = max(worst_v, abs(rep.value - e) / e)
    ok = bad == 0 and worst_m <= 1e-7 and worst_v <= 1e-8
    record(5, ok, f"100 metrics x p in {{1,2,3}}: metric err {worst_m:.1e} (<=1e-7), "
                  f"value rel err {worst_v:.1e} (<=1e-8), non-optimal {bad}")
    assert ok


def test_criterion_06_brute_force():
    runs, seconds = brute_force_runs()
    worst = 0.0
    bad = 0
    for _, _, _, rep, bf in runs:
        diff = bf.value - rep.value
        worst = max(worst, abs(diff) / bf.resolution)
        if not (rep.optimal and rep.value <= bf.value + 1e-9 and diff <= bf.resolution):
            bad += 1
    ok = bad == 0 and seconds < 60
    record(6, ok, f"200 instances: {bad} outside resolution, worst |diff|/resolution {worst:.2f}, "
                  f"total {seconds:.1f}s (<60s)")
    assert ok


def _optimal_solves():
    for g, sys0, rep, _ in rectangle_runs():
        yield g.space, sys0, rep
    g = Grid(A, B, 8, 16)
    g0, g1 = rectangle_family(g, "Gamma0"), rectangle_family(g, "Gamma1")
    yield g.space, g0 | g1, solve(g0 | g1, g.space, 2.0, OPTS)
    star = rectangle_family(g, "GammaStar")
    yield g.space, star, solve(star, g.space, 2.0, OPTS)
    space, sys_, reps = block_runs()
    for rep in reps.values():
        yield space, sys_, rep
    for space, sys_, _, _, rep in theorem5_runs():
        yield space, sys_, rep
    for space, sys_, _, rep, _ in brute_force_runs()[0]:
        yield space, sys_, rep


def test_criterion_07_certificates():
    total = passed = 0
    for space, sys_, rep in _optimal_solves():
        if not rep.optimal:
            continue
        total += 1
        cert = build_certificate(sys_, space, rep)
        passed += verify_certificate(cert, sys_, space, rep.metric, 1e-7, opts=OPTS).verdict
    rng = np.random.default_rng(77)
    caught = c_fail = witness_ok = 0
    for k in range(50):
        space, sys_ = random_instance(rng, max_cells=6, max_rows=5)
        p = (1.0, 2.0, 3.0)[k % 3]
        rep = solve(sys_, space, p, OPTS)
        psi = Metric(rep.metric.values * (1 + rng.uniform(0.02, 0.5) * rng.random(space.n_cells))
                     + rng.uniform(0.01, 0.2) * (rng.random(space.n_cells) < 0.3))
        # half use the solver's certificate, half a certificate re-fitted to psi
        if k % 2:
            cert = build_certificate(sys_, space, rep)
        else:
            cert = fit_certificate([sys_[i] for i in rep.active_set], psi, space, p)
        ver = verify_certificate(cert, sys_, space, psi, 1e-7, opts=OPTS)
        if not ver.verdict and ver.failed:
            caught += 1
        if "c" in ver.failed:
            c_fail += 1
            t, _ = cone_target(psi, space, p)
            f = ver.witness
            nus = cert.measures(sys_)
            if f is not None and all(nu.to_dense(space.n_cells) @ f >= -1e-9 for nu in nus) \
                    and f @ t < 0:
                witness_ok += 1
    ok = passed == total and caught == 50 and witness_ok == c_fail and c_fail > 0
    record(7, ok, f"build->verify on {passed}/{total} optimal solves; perturbed metrics rejected "
                  f"{caught}/50, (c) failures {c_fail} with valid witness {witness_ok}")
    assert ok


def test_criterion_08_transboundary():
    worst_red = 0.0
    mono_bad = cert_bad = solves = 0
    for seed in range(12):
        g, dom, curves = transboundary_setup(seed)
        plain = MeasureSystem(tuple(rasterize_polyline(g, c) for c in curves))
        empty_dom = TransboundaryDomain(g)
        tb0 = transboundary_family(empty_dom, curves)
        v_plain = solve(plain, g.space, 2.0, OPTS).value
        v_tb0 = solve(tb0, empty_dom.space, 2.0, OPTS).value
        worst_red = max(worst_red, abs(v_tb0 - v_plain) / v_plain)
        with_atoms = transboundary_family(dom, curves)
        n_free = dom.n_free
        stripped = MeasureSystem(tuple(
            Measure(mu.indices[mu.indices < n_free], mu.values[mu.indices < n_free])
            for mu in with_atoms))
        for p in (1.0, 2.0, 3.0):
            r_with = solve(with_atoms, dom.space, p, OPTS)
            r_without = solve(stripped, dom.space, p, OPTS)
            if r_with.value > r_without.value * (1 + 2 * OPTS.gap_tol):
                mono_bad += 1
            for sys_, r in ((with_atoms, r_with), (stripped, r_without)):
                solves += 1
                cert = build_certificate(sys_, dom.space, r)
                if not (r.optimal and verify_certificate(cert, sys_, dom.space, r.metric, 1e-7,
                                                         opts=OPTS).verdict):
                    cert_bad += 1
    ok = worst_red <= 1e-9 and mono_bad == 0 and cert_bad == 0
    record(8, ok, f"zero-hole reduction rel diff {worst_red:.1e} (<=1e-9); atom rows raising the "
                  f"modulus: {mono_bad}/36; certificates failing {cert_bad}/{solves}")
    assert ok


def test_criterion_09_unit_mass_intervals():
    g = Grid(A, B, 8, 16)
    phi = Metric.constant(g.n_cells, 1.0 / A)
    h = A / 1024
    samples = np.full(1025, 1.0 / A)
    worst_mass = worst_row = 0.0
    count = 0
    for n in (1, 2, 3, 4, 8):
        ivs = unit_mass_intervals(samples, h, n)
        assert ivs
        for iv in ivs[::17] + [ivs[-1]]:
            worst_mass = max(worst_mass, abs(iv.mass - 1.0 / n))
            y = g.row_center_y(count % g.ny)
            row = rasterize_polyline(g, interval_polyline([0.0, y], [1.0, 0.0], iv, n))
            worst_row = max(worst_row, abs(integrate(phi, row) - 1.0))
            count += 1
    ok = worst_mass <= 1e-5 and worst_row <= 1e-5
    record(9, ok, f"{count} intervals for n in 1,2,3,4,8: mass err {worst_mass:.1e} (<=1e-5), "
                  f"n-fold row err {worst_row:.1e} (<=1e-5)")
    assert ok


def test_criterion_10_invariants():
    rng = np.random.default_rng(1010)
    checks = violations = 0
    tol = lambda v: 2 * OPTS.gap_tol * max(1.0, abs(v))
    for k in range(80):
        space, e1 = random_instance(rng, max_cells=7, max_rows=5)
        _, e2 = random_instance(np.random.default_rng(k), max_cells=space.n_cells, max_rows=3)
        e2 = MeasureSystem(tuple(Measure(mu.indices, mu.values) for mu in e2
                                 if mu.indices.max() < space.n_cells) or (e1[0],))
        p = (1.0, 1.5, 2.0, 3.0)[k % 4]
        r1 = solve(e1, space, p, OPTS)
        r2 = solve(e2, space, p, OPTS)
        ru = solve(e1 | e2, space, p, OPTS)
        c = float(rng.uniform(0.2, 5.0))
        rc = solve(e1.scaled(c), space, p, OPTS)
        conds = [
            r1.value <= ru.value + tol(ru.value),
            ru.value <= r1.value + r2.value + tol(r1.value + r2.value),
            abs(rc.value - c ** -p * r1.value) <= 1e-8 * r1.value * c ** -p,
        ]
        for r, sys_ in ((r1, e1), (r2, e2), (ru, e1 | e2), (rc, e1.scaled(c))):
            A_ = sys_.matrix(space.n_cells)
            vals = A_ @ r.metric.values
            conds.append(r.optimal and r.gap <= OPTS.gap_tol)
            conds.append(bool(np.all(np.abs(vals[list(r.active_set)] - 1) <= OPTS.feas_tol)))
            dual_value = r.dual.sum() if p == 1 else r.dual_value
            conds.append(dual_value <= r.value * (1 + 1e-12))
        if p > 1:
            h = solve_modulus(e1, space, p, OPTS, record_history=True).history
            conds.append(all(d <= pr * (1 + 1e-12) for pr, d in h))
        checks += len(conds)
        violations += sum(not c_ for c_ in conds)
    ok = violations == 0
    record(10, ok, f"monotonicity, subadditivity, c^-p scaling, weak duality, complementary "
                   f"slackness: {violations} violations in {checks} checks")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
