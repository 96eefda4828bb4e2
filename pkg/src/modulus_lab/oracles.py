"""Closed-form reference values and an end-to-end example suite."""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .certificate import build_certificate, verify_certificate
from .core import CellSpace, Measure, MeasureSystem, Metric
from .errors import ContractError
from .geometry import Grid, gamma_phi_system, rectangle_family
from .solver import OPTIMAL, SolveOptions, eval_atomic_modulus_sub1, solve

__all__ = [
    "ExampleCase",
    "CaseResult",
    "SuiteReport",
    "OracleValue",
    "rectangle_modulus_exact",
    "block_modulus",
    "block_system",
    "atom_system",
    "example_cases",
    "run_example_suite",
    "thread_cap",
]

PROVENANCE = ("reference", "trivial", "derived")


def thread_cap(default: int | None = None) -> int:
    """Worker count, capped by the ``MODULUS_LAB_THREADS`` environment variable."""
    n = default or os.cpu_count() or 1
    env = os.environ.get("MODULUS_LAB_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            warnings.warn(f"ignoring MODULUS_LAB_THREADS={env!r}")
    return max(1, n)


def rectangle_modulus_exact(a: float, b: float, p: float) -> float:
    """Modulus of the curves joining the two sides of length ``b`` of an
    ``a x b`` rectangle: ``b * a**(1 - p)``, the energy of ``phi = 1/a``."""
    if not (a > 0 and b > 0):
        raise ContractError("side lengths must be positive")
    if not p >= 1:
        raise ContractError("rectangle oracle needs p >= 1")
    if a > b:
        warnings.warn("a > b; swapping the sides")
        a, b = b, a
    return b * a ** (1.0 - p)


class OracleValue(NamedTuple):
    value: float
    extremal_exists: bool


def block_modulus(p: float, block_mass: float | None = None, atoms=None,
                     divisible: bool = False) -> OracleValue:
    """Modulus of the single measure ``m`` restricted to a set ``A``.

    For ``p >= 1`` this is ``m(A)**(1 - p)`` (``m(A)`` is the sum of the atom
    weights if those are given).  For ``0 < p < 1`` it is the smallest
    ``m(B)**(1 - p)`` over subsets ``B`` of positive mass: with atoms that is
    ``min(c)**(1 - p)``; with arbitrarily divisible mass it is 0 and no
    extremal metric exists.
    """
    if not p > 0:
        raise ContractError("p must be positive")
    if atoms is not None:
        c = np.asarray(atoms, dtype=float)
        if c.size == 0 or np.any(c <= 0):
            raise ContractError("atom weights must be positive")
        mass = math.fsum(c)
    elif block_mass is not None:
        if not block_mass > 0:
            raise ContractError("block mass must be positive")
        mass = float(block_mass)
        c = None
    else:
        raise ContractError("give block_mass or atoms")
    if p >= 1:
        return OracleValue(mass ** (1.0 - p), True)
    if divisible or c is None:
        return OracleValue(0.0, False)
    return OracleValue(float(c.min()) ** (1.0 - p), True)


def block_system(mass: float = 4.0, cells: int = 4) -> tuple[CellSpace, MeasureSystem]:
    """A set of total mass ``mass`` split into ``cells`` equal cells, with the
    single measure ``m`` restricted to it."""
    space = CellSpace.uniform(cells, mass / cells)
    return space, MeasureSystem((space.restriction(range(cells)),), ("m|A",))


def atom_system(weights) -> tuple[CellSpace, MeasureSystem]:
    w = np.asarray(weights, dtype=float)
    space = CellSpace(w, np.ones(w.size, dtype=bool))
    return space, MeasureSystem((space.restriction(range(w.size)),), ("m|A",))


@dataclass(frozen=True)
class ExampleCase:
    name: str
    space: CellSpace
    system: MeasureSystem
    p: float
    expected: float
    provenance: str
    expected_metric: np.ndarray | None = None
    certify: bool = True

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ContractError(f"provenance must be one of {PROVENANCE}")
        if not (math.isfinite(self.expected) and self.expected >= 0):
            raise ContractError("expected value must be finite and nonnegative")


def example_cases(nx: int = 8, ny: int = 16, width: float = 1.0, height: float = 2.0,
                  seed: int = 0) -> list[ExampleCase]:
    """The reference cases, generated at the given grid resolution."""
    grid = Grid(width, height, nx, ny)

    def rect(p):
        # curves cross the width; the oracle wants the crossing side first
        if width <= height:
            return rectangle_modulus_exact(width, height, p)
        return height * width ** (1.0 - p)

    g0 = rectangle_family(grid, "Gamma0")
    const = np.full(grid.n_cells, 1.0 / width)
    cases = [
        ExampleCase("rectangle Gamma0 p=2", grid.space, g0, 2.0, rect(2.0), "reference", const),
        ExampleCase("rectangle Gamma0 p=3", grid.space, g0, 3.0, rect(3.0), "derived", const),
        ExampleCase("rectangle Gamma0 p=1", grid.space, g0, 1.0, rect(1.0), "derived"),
        ExampleCase("rectangle Gamma1 p=2", grid.space, rectangle_family(grid, "Gamma1"), 2.0,
                    rect(2.0), "reference", const),
    ]
    bs, be = block_system(4.0, 4)
    for p in (1.0, 1.5, 2.0, 3.0):
        cases.append(ExampleCase(f"block m(A)=4 p={p:g}", bs, be, p,
                                 block_modulus(p, block_mass=4.0).value, "reference",
                                 None if p == 1 else np.full(4, 0.25)))
    cases.append(ExampleCase("atoms (0.25,1,3) p=0.5", *atom_system([0.25, 1.0, 3.0]), 0.5,
                             0.5, "reference", np.array([4.0, 0.0, 0.0]), certify=False))
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 2.0, 6)
    phi = rng.uniform(0.2, 3.0, 6)
    sp6 = CellSpace(w)
    cases.append(ExampleCase("scaled atomic rows p=2", sp6, gamma_phi_system(sp6, Metric(phi)),
                             2.0, float(np.sum(w * phi ** 2)), "derived", phi))
    one = CellSpace.uniform(1, 1.0)
    cases.append(ExampleCase("single cell p=2", one, MeasureSystem((Measure([0], [1.0]),)), 2.0,
                             1.0, "trivial", np.ones(1)))
    return cases


@dataclass(frozen=True)
class CaseResult:
    name: str
    provenance: str
    p: float
    expected: float
    value: float
    rel_error: float
    metric_error: float
    status: str
    certified: bool | None
    passed: bool
    seconds: float
    note: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SuiteReport:
    results: tuple = ()
    settings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CaseResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {"settings": dict(self.settings), "passed": self.passed,
                "cases": [r.to_dict() for r in self.results]}

    def table(self) -> str:
        head = f"{'case':28s} {'src':7s} {'expected':>14s} {'value':>20s} {'rel.err':>9s} {'cert':>5s}  result"
        lines = [head, "-" * len(head)]
        for r in self.results:
            cert = "-" if r.certified is None else ("yes" if r.certified else "no")
            lines.append(f"{r.name:28s} {r.provenance:7s} {r.expected:14.8g} {r.value:20.15g} "
                         f"{r.rel_error:9.2e} {cert:>5s}  {'pass' if r.passed else 'FAIL'}"
                         + (f"  ({r.note})" if r.note else ""))
        return "\n".join(lines)


def _run_case(case: ExampleCase, opts: SolveOptions, tol: float) -> CaseResult:
    t0 = time.perf_counter()
    note = ""
    certified = None
    if case.p < 1:
        res = eval_atomic_modulus_sub1(case.system, case.space, case.p)
        value, metric, status = res.value, res.metric.values, OPTIMAL
    else:
        rep = solve(case.system, case.space, case.p, opts)
        value, metric, status = rep.value, rep.metric.values, rep.status
        if case.certify and rep.status == OPTIMAL:
            cert = build_certificate(case.system, case.space, rep)
            ver = verify_certificate(cert, case.system, case.space, rep.metric, opts=opts)
            certified = ver.verdict
            if not ver.verdict:
                note = "certificate failed: " + ",".join(ver.failed)
        elif status != OPTIMAL:
            note = f"solver status {status}, gap {rep.gap:.2e}"
    rel = abs(value - case.expected) / max(abs(case.expected), 1e-300) if case.expected else abs(value)
    merr = float("nan")
    if case.expected_metric is not None:
        merr = float(np.abs(metric - case.expected_metric).max())
    ok = status == OPTIMAL and rel <= tol and certified is not False
    if case.expected_metric is not None and not merr <= max(tol, 1e-6) * max(1.0, float(np.abs(case.expected_metric).max())):
        ok = False
        note = note or f"metric off by {merr:.2e}"
    return CaseResult(case.name, case.provenance, case.p, case.expected, value, rel, merr, status,
                      certified, ok, time.perf_counter() - t0, note)


def run_example_suite(nx: int = 8, ny: int = 16, *, gap_tol: float = 1e-8, feas_tol: float = 1e-9,
                      tol: float = 1e-6, max_iters: int = 100_000, seed: int = 0,
                      threads: int | None = None) -> SuiteReport:
    """Generate, solve, certify and compare every reference case.

    Cases run independently (up to ``threads`` workers, capped by
    ``MODULUS_LAB_THREADS``) and are reported in a fixed order.  A case that
    raises is recorded as a failure rather than aborting the suite.
    """
    opts = SolveOptions(max_iters=max_iters, gap_tol=gap_tol, feas_tol=feas_tol, seed=seed)
    cases = example_cases(nx, ny, seed=seed)

    def run(case):
        try:
            return _run_case(case, opts, tol)
        except Exception as exc:  # collected, not fatal
            return CaseResult(case.name, case.provenance, case.p, case.expected, math.nan,
                              math.inf, math.nan, "error", None, False, 0.0,
                              f"{type(exc).__name__}: {exc}")

    workers = thread_cap(threads)
    if workers == 1:
        results = [run(c) for c in cases]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, cases))
    settings = {"nx": nx, "ny": ny, "gap_tol": gap_tol, "feas_tol": feas_tol, "tol": tol,
                "max_iters": max_iters, "seed": seed}
    return SuiteReport(tuple(results), settings)
