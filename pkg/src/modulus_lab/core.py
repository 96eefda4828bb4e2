"""Discrete measure spaces, measure systems and metrics.

A finite ground space is a list of cells with positive weights ``m_j``.  A
measure is a sparse nonnegative row ``a_j`` over the cells, so that
``integral(phi d mu) = sum_j a_j phi_j`` and the p-energy of a metric is
``sum_j m_j phi_j**p``.  Cells may be flagged as atoms; for a flagged cell the
unit measure on it plays the role of the atomic measure ``delta_A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import ContractError, DimensionError

__all__ = [
    "CellSpace",
    "Measure",
    "MeasureSystem",
    "Metric",
    "AdmissibilityReport",
    "SystemDiagnostics",
    "integrate",
    "p_energy",
    "is_admissible",
    "validate_system",
]


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CellSpace:
    """Finite weighted ground space.

    Parameters
    ----------
    weights : array_like
        Strictly positive, finite cell masses.
    atoms : array_like of bool, optional
        Atom flag per cell.  Defaults to no atoms.
    labels : sequence of str, optional
        Free-form cell labels.
    """

    weights: np.ndarray
    atoms: np.ndarray = None
    labels: tuple | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise ContractError("a cell space needs at least one cell")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ContractError("cell weights must be finite and strictly positive")
        if self.atoms is None:
            atoms = np.zeros(w.size, dtype=bool)
        else:
            atoms = np.asarray(self.atoms, dtype=bool).ravel()
        if atoms.size != w.size:
            raise DimensionError(
                f"{atoms.size} atom flags for {w.size} cells")
        labels = self.labels
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != w.size:
                raise DimensionError(f"{len(labels)} labels for {w.size} cells")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "atoms", _frozen(atoms))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, n, weight=1.0):
        return cls(np.full(n, float(weight)))

    @property
    def n_cells(self) -> int:
        return self.weights.size

    def __len__(self):
        return self.n_cells

    def mass(self, cells: Iterable[int] | None = None) -> float:
        if cells is None:
            return math.fsum(self.weights)
        return math.fsum(self.weights[np.asarray(list(cells), dtype=int)])

    def restriction(self, cells: Iterable[int]) -> "Measure":
        """The measure ``m`` restricted to a set of cells."""
        idx = np.unique(np.asarray(list(cells), dtype=int))
        self._check_indices(idx)
        return Measure(idx, self.weights[idx])

    def atom_measure(self, cell: int) -> "Measure":
        """Unit atomic measure on ``cell``, which must be flagged as an atom."""
        self._check_indices([cell])
        if not self.atoms[cell]:
            raise ContractError(f"cell {cell} is not an atom")
        return Measure([cell], [1.0])

    def _check_indices(self, idx):
        idx = np.asarray(idx)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_cells):
            raise DimensionError(
                f"cell index out of range for a space of {self.n_cells} cells")

    def __eq__(self, other):
        if not isinstance(other, CellSpace):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and np.array_equal(self.atoms, other.atoms))

    __hash__ = None


class Measure:
    """Sparse nonnegative measure over the cells of a :class:`CellSpace`.

    Entries are kept sorted by cell index; explicit zeros are dropped.
    """

    __slots__ = ("indices", "values")

    def __init__(self, indices=(), values=()):
        idx = np.asarray(indices, dtype=np.int64).ravel()
        val = np.asarray(values, dtype=float).ravel()
        if idx.size != val.size:
            raise DimensionError("indices and values differ in length")
        if idx.size:
            if idx.min() < 0:
                raise DimensionError("negative cell index")
            if not np.all(np.isfinite(val)) or np.any(val < 0):
                raise ContractError("measure entries must be finite and >= 0")
            order = np.argsort(idx, kind="stable")
            idx, val = idx[order], val[order]
            if np.any(np.diff(idx) == 0):
                raise ContractError("duplicate cell index in measure")
            keep = val > 0
            idx, val = idx[keep], val[keep]
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def __setattr__(self, name, value):
        raise AttributeError("Measure is immutable")

    @classmethod
    def from_dict(cls, entries: Mapping[int, float]) -> "Measure":
        items = sorted((int(k), float(v)) for k, v in entries.items())
        return cls([k for k, _ in items], [v for _, v in items])

    @classmethod
    def from_dense(cls, vec) -> "Measure":
        vec = np.asarray(vec, dtype=float).ravel()
        nz = np.flatnonzero(vec)
        return cls(nz, vec[nz])

    @classmethod
    def accumulate(cls, indices, values) -> "Measure":
        """Build a measure from possibly repeated (index, value) pairs by summing."""
        idx = np.asarray(indices, dtype=np.int64).ravel()
        val = np.asarray(values, dtype=float).ravel()
        if idx.size == 0:
            return cls()
        uniq, inv = np.unique(idx, return_inverse=True)
        sums = np.zeros(uniq.size)
        np.add.at(sums, inv, val)
        return cls(uniq, sums)

    @property
    def nnz(self) -> int:
        return self.indices.size

    @property
    def is_zero(self) -> bool:
        return self.indices.size == 0

    def total(self) -> float:
        return math.fsum(self.values)

    def to_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}

    def to_dense(self, n_cells: int) -> np.ndarray:
        if self.indices.size and self.indices[-1] >= n_cells:
            raise DimensionError(
                f"measure touches cell {self.indices[-1]} of a {n_cells}-cell space")
        out = np.zeros(n_cells)
        out[self.indices] = self.values
        return out

    def scaled(self, c: float) -> "Measure":
        if not c >= 0 or not math.isfinite(c):
            raise ContractError("scale must be finite and >= 0")
        return Measure(self.indices, self.values * c)

    def __add__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        return Measure.accumulate(np.concatenate([self.indices, other.indices]),
                                  np.concatenate([self.values, other.values]))

    def __eq__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        return (np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        if self.nnz <= 6:
            return f"Measure({self.to_dict()})"
        return f"Measure(<{self.nnz} entries, total={self.total():.6g}>)"


@dataclass(frozen=True, eq=False)
class MeasureSystem:
    """Ordered list of measures, optionally tagged with their provenance.

    An empty system must be requested explicitly with ``allow_empty=True`` or
    :meth:`empty`.
    """

    rows: tuple
    tags: tuple = None
    allow_empty: bool = field(default=False, repr=False)

    def __post_init__(self):
        rows = tuple(self.rows)
        for r in rows:
            if not isinstance(r, Measure):
                raise TypeError(f"rows must be Measure instances, got {type(r).__name__}")
        if not rows and not self.allow_empty:
            raise ContractError("empty measure system; use MeasureSystem.empty()")
        tags = self.tags
        tags = (None,) * len(rows) if tags is None else tuple(tags)
        if len(tags) != len(rows):
            raise DimensionError(f"{len(tags)} tags for {len(rows)} rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "tags", tags)
        object.__setattr__(self, "allow_empty", True if not rows else self.allow_empty)

    @classmethod
    def empty(cls) -> "MeasureSystem":
        return cls((), allow_empty=True)

    def __len__(self):
        return len(self.rows)

    def __iter__(self) -> Iterator[Measure]:
        return iter(self.rows)

    def __getitem__(self, i) -> Measure:
        return self.rows[i]

    @property
    def max_index(self) -> int:
        """Largest cell index touched by any row, or -1."""
        return max((int(r.indices[-1]) for r in self.rows if r.nnz), default=-1)

    def matrix(self, n_cells: int) -> sparse.csr_matrix:
        """Rows as a CSR matrix of shape ``(len(self), n_cells)``."""
        if self.max_index >= n_cells:
            raise DimensionError(
                f"system touches cell {self.max_index} of a {n_cells}-cell space")
        indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.nnz for r in self.rows])
        if self.rows:
            indices = np.concatenate([r.indices for r in self.rows])
            data = np.concatenate([r.values for r in self.rows])
        else:
            indices = np.zeros(0, dtype=np.int64)
            data = np.zeros(0)
        return sparse.csr_matrix((data, indices, indptr), shape=(len(self.rows), n_cells))

    def union(self, other: "MeasureSystem | Sequence[Measure]") -> "MeasureSystem":
        if not isinstance(other, MeasureSystem):
            other = MeasureSystem(tuple(other), allow_empty=True)
        return MeasureSystem(self.rows + other.rows, self.tags + other.tags,
                             allow_empty=True)

    __or__ = union

    def scaled(self, c: float) -> "MeasureSystem":
        return MeasureSystem(tuple(r.scaled(c) for r in self.rows), self.tags,
                             allow_empty=True)

    def subsystem(self, rows: Iterable[int]) -> "MeasureSystem":
        rows = list(rows)
        return MeasureSystem(tuple(self.rows[i] for i in rows),
                             tuple(self.tags[i] for i in rows), allow_empty=True)


class Metric:
    """Nonnegative finite function on the cells."""

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.asarray(values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ContractError("metric values must be finite")
        if np.any(v < 0):
            raise ContractError("metric values must be >= 0")
        object.__setattr__(self, "values", _frozen(v))

    def __setattr__(self, name, value):
        raise AttributeError("Metric is immutable")

    @classmethod
    def zeros(cls, n: int) -> "Metric":
        return cls(np.zeros(n))

    @classmethod
    def constant(cls, n: int, value: float) -> "Metric":
        return cls(np.full(n, float(value)))

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def scaled(self, c: float) -> "Metric":
        return Metric(self.values * c)

    def __eq__(self, other):
        if not isinstance(other, Metric):
            return NotImplemented
        # equal m-a.e. is equality on every cell since all weights are positive
        return np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"Metric({np.array2string(self.values, threshold=8)})"


def _check_metric(metric, n=None):
    if not isinstance(metric, Metric):
        metric = Metric(metric)
    if n is not None and len(metric) != n:
        raise DimensionError(f"metric has {len(metric)} values, space has {n} cells")
    return metric


def integrate(metric: Metric, measure: Measure) -> float:
    """``sum_j a_j phi_j``, accumulated with exactly rounded summation."""
    metric = _check_metric(metric)
    if measure.nnz and measure.indices[-1] >= len(metric):
        raise DimensionError(
            f"measure touches cell {measure.indices[-1]} but metric has {len(metric)} values")
    return math.fsum(measure.values * metric.values[measure.indices])


def p_energy(metric: Metric, space: CellSpace, p: float) -> float:
    """``sum_j m_j phi_j**p``."""
    if not p > 0:
        raise ContractError("p must be positive")
    metric = _check_metric(metric, space.n_cells)
    return math.fsum(space.weights * np.power(metric.values, p))


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    worst_row: int | None
    worst_value: float

    def __bool__(self):
        return self.admissible


def is_admissible(metric: Metric, system: MeasureSystem, tol: float = 0.0) -> AdmissibilityReport:
    """Check ``integral(phi d mu) >= 1 - tol`` for every row of ``system``.

    The report carries the row with the smallest integral and its value; an
    empty system is vacuously admissible.
    """
    if tol < 0:
        raise ContractError("tol must be >= 0")
    metric = _check_metric(metric)
    worst, worst_val = None, math.inf
    for i, row in enumerate(system.rows):
        v = integrate(metric, row)
        if v < worst_val:
            worst, worst_val = i, v
    return AdmissibilityReport(worst_val >= 1.0 - tol, worst, worst_val)


@dataclass(frozen=True)
class SystemDiagnostics:
    zero_rows: tuple = ()
    duplicates: tuple = ()
    out_of_range: tuple = ()

    @property
    def infeasible(self) -> bool:
        """A zero row admits no metric, so the modulus is infinite."""
        return bool(self.zero_rows)

    @property
    def ok(self) -> bool:
        return not (self.zero_rows or self.duplicates or self.out_of_range)

    def messages(self) -> list[str]:
        out = []
        for i in self.zero_rows:
            out.append(f"infeasible-system: row {i} is zero")
        for i, j in self.duplicates:
            out.append(f"duplicate: row {j} repeats row {i}")
        for i in self.out_of_range:
            out.append(f"out-of-range: row {i} touches a cell outside the space")
        return out


def validate_system(system: MeasureSystem, space: CellSpace | None = None) -> SystemDiagnostics:
    """Flag zero rows, duplicated rows and (given a space) out-of-range indices."""
    zero, dup, oor = [], [], []
    seen = {}
    n = None if space is None else space.n_cells
    for i, row in enumerate(system.rows):
        if row.is_zero:
            zero.append(i)
        if n is not None and row.nnz and row.indices[-1] >= n:
            oor.append(i)
        key = (row.indices.tobytes(), row.values.tobytes())
        if key in seen:
            dup.append((seen[key], i))
        else:
            seen[key] = i
    return SystemDiagnostics(tuple(zero), tuple(dup), tuple(oor))
