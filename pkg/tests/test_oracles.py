import numpy as np
import pytest

from modulus_lab import ContractError, block_modulus, rectangle_modulus_exact, run_example_suite
from modulus_lab.oracles import block_system, example_cases, thread_cap
from modulus_lab.solver import solve


def test_rectangle_oracle():
    assert rectangle_modulus_exact(1, 2, 2) == 2
    assert rectangle_modulus_exact(3, 3, 2) == 1
    assert rectangle_modulus_exact(1, 2, 3) == 2
    with pytest.warns(UserWarning):
        assert rectangle_modulus_exact(2, 1, 2) == 2
    with pytest.raises(ContractError):
        rectangle_modulus_exact(1, 2, 0.5)


def test_example5_oracle():
    assert block_modulus(2, block_mass=4).value == 0.25
    for m in (0.3, 1.0, 7.0):
        assert block_modulus(1, block_mass=m).value == 1
    v = block_modulus(0.5, atoms=[0.25, 1, 3])
    assert v.value == 0.5 and v.extremal_exists
    v = block_modulus(0.5, block_mass=4)
    assert v.value == 0.0 and not v.extremal_exists


def test_example5_limit_p_to_one():
    space, sys_ = block_system(4.0, 4)
    p = 1 + 1e-5
    assert abs(block_modulus(p, block_mass=4).value - solve(sys_, space, 1.0).value) <= 1e-4
    ps = np.linspace(1.001, 3, 50)
    vals = [block_modulus(p, block_mass=4).value for p in ps]
    # |d/dp m^(1-p)| <= log(m) for p >= 1
    assert np.all(np.abs(np.diff(vals)) <= np.log(4) * (ps[1] - ps[0]))


def test_case_provenance():
    cases = example_cases()
    assert {c.provenance for c in cases} <= {"reference", "trivial", "derived"}
    assert any(c.provenance == "reference" for c in cases)


def test_suite_default_and_degenerate():
    rep = run_example_suite()
    assert rep.passed, rep.table()
    assert "rectangle Gamma0 p=2" in rep.table()
    assert run_example_suite(1, 1, threads=1).passed


def test_suite_tight_tolerance_reports_per_case():
    rep = run_example_suite(gap_tol=1e-12, tol=1e-12)
    assert len(rep.results) == len(example_cases())
    assert all(r.status in ("optimal", "max-iters", "error") for r in rep.results)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("MODULUS_LAB_THREADS", "2")
    assert thread_cap(8) == 2
    monkeypatch.setenv("MODULUS_LAB_THREADS", "junk")
    with pytest.warns(UserWarning):
        assert thread_cap(3) == 3
