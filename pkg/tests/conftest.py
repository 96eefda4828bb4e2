import sys

import numpy as np
import pytest

from modulus_lab import CellSpace, Grid, Measure, MeasureSystem, rectangle_family


def random_instance(rng, max_cells=5, max_rows=4, density=0.7):
    """Random positive weights and random nonnegative rows (no zero rows)."""
    n = int(rng.integers(1, max_cells + 1))
    k = int(rng.integers(1, max_rows + 1))
    space = CellSpace(rng.uniform(0.5, 2.0, n))
    rows = []
    for _ in range(k):
        d = rng.uniform(0.2, 2.0, n) * (rng.random(n) < density)
        if not d.any():
            d[rng.integers(n)] = rng.uniform(0.2, 2.0)
        rows.append(Measure.from_dense(d))
    return space, MeasureSystem(tuple(rows))


@pytest.fixture
def rect():
    g = Grid(1.0, 2.0, 4, 8)
    return g, rectangle_family(g, "Gamma0")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
