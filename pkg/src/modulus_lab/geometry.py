"""Planar grids, polyline curves and their line-integral measures.

A curve is rasterized by clipping each segment exactly against the grid
lines, so the entry of a cell is the arclength of the curve inside it (times
the multiplicity).  No sampling is involved and the entries of a row add up to
the clipped length of the curve.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import CellSpace, Measure, MeasureSystem, Metric
from .errors import ContractError, DimensionError

__all__ = [
    "Grid",
    "Polyline",
    "Curve",
    "TransboundaryDomain",
    "RasterizationWarning",
    "rasterize_polyline",
    "rasterize_family",
    "rectangle_family",
    "staircase_crossings",
    "truncate_to_unit",
    "transboundary_measure",
    "transboundary_family",
    "gamma_phi_system",
    "UnitInterval",
    "unit_mass_intervals",
    "interval_polyline",
    "curve_integral",
]

FAMILIES = ("Gamma0", "Gamma1", "GammaStar", "GammaSampled")


class RasterizationWarning(UserWarning):
    """A curve was clipped to the grid or had zero length."""


@dataclass(frozen=True)
class Grid:
    """Axis-aligned rectangle ``[x0, x0 + width] x [y0, y0 + height]`` cut into
    ``nx`` by ``ny`` equal cells.  Cell ``j = iy * nx + ix`` (row-major, row 0 at
    the bottom)."""

    width: float
    height: float
    nx: int
    ny: int
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ContractError("grid width and height must be positive")
        if int(self.nx) != self.nx or int(self.ny) != self.ny or self.nx < 1 or self.ny < 1:
            raise ContractError("nx and ny must be positive integers")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def dx(self) -> float:
        return self.width / self.nx

    @property
    def dy(self) -> float:
        return self.height / self.ny

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @cached_property
    def space(self) -> CellSpace:
        return CellSpace(np.full(self.n_cells, self.dx * self.dy))

    def cell_index(self, ix: int, iy: int) -> int:
        return iy * self.nx + ix

    def cell_center(self, j: int) -> tuple[float, float]:
        iy, ix = divmod(j, self.nx)
        return (self.origin[0] + (ix + 0.5) * self.dx,
                self.origin[1] + (iy + 0.5) * self.dy)

    def row_center_y(self, iy: int) -> float:
        return self.origin[1] + (iy + 0.5) * self.dy

    def to_dict(self) -> dict:
        return {"origin": list(self.origin), "width": self.width, "height": self.height,
                "nx": self.nx, "ny": self.ny}


class Polyline:
    """Polygonal path traversed ``multiplicity`` times."""

    __slots__ = ("vertices", "multiplicity")

    def __init__(self, vertices, multiplicity: int = 1):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ContractError("a polyline needs at least two 2-D vertices")
        if not np.all(np.isfinite(v)):
            raise ContractError("polyline vertices must be finite")
        if int(multiplicity) != multiplicity or multiplicity < 1:
            raise ContractError("multiplicity must be a positive integer")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "multiplicity", int(multiplicity))

    def __setattr__(self, name, value):
        raise AttributeError("Polyline is immutable")

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.vertices, axis=0).T)

    @property
    def length(self) -> float:
        """Length of one traversal."""
        return math.fsum(self.segment_lengths)

    @property
    def total_length(self) -> float:
        return self.multiplicity * self.length

    def point_at(self, s: float) -> np.ndarray:
        """Point at arclength ``s`` along one traversal."""
        seg = self.segment_lengths
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = min(max(s, 0.0), cum[-1])
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, seg.size - 1)
        t = 0.0 if seg[i] == 0 else (s - cum[i]) / seg[i]
        return self.vertices[i] + t * (self.vertices[i + 1] - self.vertices[i])

    def prefix(self, s: float) -> "Polyline":
        """Initial piece of one traversal with arclength ``s``."""
        seg = self.segment_lengths
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = min(max(s, 0.0), cum[-1])
        i = int(np.searchsorted(cum, s, side="left"))
        pts = list(self.vertices[:max(i, 1)])
        end = self.point_at(s)
        if not np.array_equal(pts[-1], end) or len(pts) == 1:
            pts.append(end)
        return Polyline(pts, 1)

    def __eq__(self, other):
        if not isinstance(other, Polyline):
            return NotImplemented
        return (self.multiplicity == other.multiplicity
                and np.array_equal(self.vertices, other.vertices))

    __hash__ = None

    def __repr__(self):
        return f"Polyline({self.vertices.tolist()}, multiplicity={self.multiplicity})"


class Curve:
    """Concatenation of polyline pieces; pieces may overlap or be disjoint."""

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[Polyline]):
        pieces = tuple(pieces)
        if not pieces or not all(isinstance(p, Polyline) for p in pieces):
            raise ContractError("a curve needs at least one Polyline piece")
        object.__setattr__(self, "pieces", pieces)

    def __setattr__(self, name, value):
        raise AttributeError("Curve is immutable")

    @property
    def total_length(self) -> float:
        return math.fsum(p.total_length for p in self.pieces)

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.pieces == other.pieces

    __hash__ = None

    def __repr__(self):
        return f"Curve({list(self.pieces)!r})"


def _pieces_of(curve):
    if isinstance(curve, Polyline):
        return (curve,)
    if isinstance(curve, Curve):
        return curve.pieces
    raise TypeError(f"expected Polyline or Curve, got {type(curve).__name__}")


def _clip_params(grid, P, d):
    """Parameter range of ``P + t d`` (t in [0, 1]) inside the grid rectangle."""
    t0, t1 = 0.0, 1.0
    x0, y0 = grid.origin
    for p0, dd, lo, hi in ((P[0], d[0], x0, x0 + grid.width),
                           (P[1], d[1], y0, y0 + grid.height)):
        if dd == 0.0:
            if p0 < lo or p0 > hi:
                return None
            continue
        ta, tb = (lo - p0) / dd, (hi - p0) / dd
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    if t0 >= t1:
        return None
    return t0, t1


def _segment_pieces(grid, P, Q):
    """Ordered cell pieces of segment PQ: arrays ``(cells, t_start, t_end)`` and
    the segment length.  Parts outside the grid are dropped."""
    P = np.asarray(P, dtype=float)
    d = np.asarray(Q, dtype=float) - P
    L = math.hypot(d[0], d[1])
    empty = (np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0))
    if L == 0.0:
        return empty, 0.0
    clip = _clip_params(grid, P, d)
    if clip is None:
        return empty, L
    t0, t1 = clip
    ts = [np.array([t0, t1])]
    x0, y0 = grid.origin
    for axis, h, n, org in ((0, grid.dx, grid.nx, x0), (1, grid.dy, grid.ny, y0)):
        if d[axis] != 0.0:
            k = np.arange(1, n)
            t = (org + k * h - P[axis]) / d[axis]
            ts.append(t[(t > t0) & (t < t1)])
    ts = np.unique(np.concatenate(ts))
    ta, tb = ts[:-1], ts[1:]
    mid = 0.5 * (ta + tb)
    mx = P[0] + mid * d[0]
    my = P[1] + mid * d[1]
    ix = np.clip(np.floor((mx - x0) / grid.dx).astype(np.int64), 0, grid.nx - 1)
    iy = np.clip(np.floor((my - y0) / grid.dy).astype(np.int64), 0, grid.ny - 1)
    keep = tb > ta
    return (iy[keep] * grid.nx + ix[keep], ta[keep], tb[keep]), L


def _traversal(curve):
    """Segments of the unrolled traversal as (P, Q, copies) triples."""
    for piece in _pieces_of(curve):
        v = piece.vertices
        for i in range(v.shape[0] - 1):
            yield v[i], v[i + 1], piece.multiplicity


def _unrolled(curve):
    """Segments in traversal order, each multiple piece repeated whole."""
    for piece in _pieces_of(curve):
        v = piece.vertices
        for _ in range(piece.multiplicity):
            for i in range(v.shape[0] - 1):
                yield v[i], v[i + 1]


def rasterize_polyline(grid: Grid, curve) -> Measure:
    """Line-integral measure of ``curve`` on ``grid``.

    Entry ``j`` is the arclength of the curve inside cell ``j``, counted with
    multiplicity.  Parts of the curve outside the grid rectangle are dropped
    with a :class:`RasterizationWarning`; a curve of zero length gives the zero
    measure, also with a warning.  A segment running exactly along a grid line
    is assigned to the cell above (or to the right of) that line, or to the
    last row/column on the outer boundary.
    """
    cells, lengths = [], []
    total = clipped = 0.0
    for P, Q, mult in _traversal(curve):
        (c, ta, tb), L = _segment_pieces(grid, P, Q)
        total += mult * L
        seg = mult * L * (tb - ta)
        clipped += float(seg.sum())
        cells.append(c)
        lengths.append(seg)
    if total == 0.0:
        warnings.warn("zero-length curve rasterizes to the zero measure",
                      RasterizationWarning, stacklevel=2)
        return Measure()
    if clipped < total * (1 - 1e-12):
        warnings.warn(f"curve leaves the grid; {total - clipped:.6g} of its length "
                      "was clipped", RasterizationWarning, stacklevel=2)
    return Measure.accumulate(np.concatenate(cells), np.concatenate(lengths))


def rasterize_family(grid: Grid, curves: Sequence, tags: Sequence | None = None) -> MeasureSystem:
    rows = tuple(rasterize_polyline(grid, c) for c in curves)
    return MeasureSystem(rows, tags, allow_empty=True)


def curve_integral(grid: Grid, curve, metric: Metric) -> float:
    """Line integral of a cellwise-constant metric along ``curve``."""
    from .core import integrate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RasterizationWarning)
        return integrate(metric, rasterize_polyline(grid, curve))


def _line_endpoints(grid, iy):
    y = grid.row_center_y(iy)
    x0 = grid.origin[0]
    return np.array([x0, y]), np.array([x0 + grid.width, y])


def staircase_crossings(grid: Grid, count: int, seed: int) -> list[Polyline]:
    """Random monotone staircase paths from the left edge to the right edge.

    Each path alternates horizontal and vertical moves; ``x`` increases and ``y``
    moves in one direction only, so every path has length at least the width.
    """
    if seed is None:
        raise ContractError("staircase sampling needs an explicit seed")
    rng = np.random.default_rng(seed)
    x0, y0 = grid.origin
    a, b = grid.width, grid.height
    out = []
    for _ in range(count):
        steps = int(rng.integers(1, 5))
        xs = np.sort(rng.uniform(x0, x0 + a, steps))
        ystart = rng.uniform(y0, y0 + b)
        up = bool(rng.integers(0, 2))
        room = (y0 + b - ystart) if up else (ystart - y0)
        incr = rng.dirichlet(np.ones(steps)) * room * rng.uniform(0.1, 0.9)
        ys = ystart + (np.cumsum(incr) if up else -np.cumsum(incr))
        pts = [(x0, ystart)]
        y = ystart
        for xk, yk in zip(xs, ys):
            pts.append((xk, y))
            pts.append((xk, yk))
            y = yk
        pts.append((x0 + a, y))
        out.append(Polyline(pts))
    return out


def rectangle_family(grid: Grid, which: str, *, samples: int = 0, seed: int | None = None,
                     prefix_scale: float = 1.0) -> MeasureSystem:
    """Curve families on the grid rectangle joining its two vertical sides.

    ``Gamma0``
        One horizontal segment per grid row, along the row's mid-line.
    ``Gamma1``
        Two curves per grid row: from each end to the midpoint and back
        (a half-segment with multiplicity 2).
    ``GammaStar``
        Each ``Gamma0`` segment together with an out-and-back excursion of
        length ``1/k`` (``k = prefix_scale * (row + 1)``) at its left end,
        capped at the width.  Every row integrates ``1/width`` to
        ``1 + 2/(k width)``, strictly more than 1.
    ``GammaSampled``
        ``Gamma0`` plus ``samples`` random staircase crossings (``seed`` required).
    """
    if which not in FAMILIES:
        raise ContractError(f"unknown family {which!r}; expected one of {FAMILIES}")
    curves, tags = [], []
    for iy in range(grid.ny):
        P, Q = _line_endpoints(grid, iy)
        if which == "Gamma1":
            M = 0.5 * (P + Q)
            curves += [Polyline([P, M], 2), Polyline([Q, M], 2)]
            tags += [f"Gamma1[{iy}]:left", f"Gamma1[{iy}]:right"]
        elif which == "GammaStar":
            k = prefix_scale * (iy + 1)
            ell = min(1.0 / k, grid.width)
            # traversal order puts the crossing first so that cutting at the
            # first point of unit integral drops the excursion
            curves.append(Curve([Polyline([P, Q]), Polyline([P, P + [ell, 0.0]], 2)]))
            tags.append(f"GammaStar[{iy}]")
        else:
            curves.append(Polyline([P, Q]))
            tags.append(f"Gamma0[{iy}]")
    if which == "GammaSampled":
        for i, c in enumerate(staircase_crossings(grid, samples, seed)):
            curves.append(c)
            tags.append(f"staircase[{i}]")
    return rasterize_family(grid, curves, tags)


def _prefix_of_traversal(curve, s_stop):
    """Pieces making up the first ``s_stop`` of arclength of the traversal."""
    out = []
    remaining = s_stop
    for piece in _pieces_of(curve):
        L = piece.length
        full = min(piece.multiplicity, int(remaining // L) if L > 0 else piece.multiplicity)
        if full:
            out.append(Polyline(piece.vertices, full))
            remaining -= full * L
        if full == piece.multiplicity:
            continue
        if remaining > 0:
            out.append(piece.prefix(remaining))
        return out
    return out


def truncate_to_unit(curve, metric: Metric, grid: Grid):
    """Initial subcurve along which ``metric`` integrates to exactly 1.

    The running integral ``s -> integral of phi over the first s of arclength``
    is continuous and nondecreasing.  It is piecewise linear with slope
    ``phi`` of the current cell, so the crossing point is located exactly and
    then confirmed by rasterizing the prefix.  Bisection on arclength takes
    over if that check fails.

    A curve whose integral is already 1 (to 1e-12) is returned unchanged.  A
    single-traversal :class:`Polyline` gives a :class:`Polyline`; anything else
    gives a :class:`Curve`.
    """
    metric = metric if isinstance(metric, Metric) else Metric(metric)
    if len(metric) != grid.n_cells:
        raise DimensionError("metric does not match the grid")
    total = curve_integral(grid, curve, metric)
    if total < 1.0 - 1e-12:
        raise ContractError(f"curve integrates the metric to {total:.6g} < 1")
    if abs(total - 1.0) <= 1e-12:
        return curve
    phi = metric.values
    s_acc = 0.0
    F = 0.0
    s_star = None
    for P, Q in _unrolled(curve):
        (cells, ta, tb), L = _segment_pieces(grid, P, Q)
        for c, a_, b_ in zip(cells, ta, tb):
            slope = phi[c]
            gain = slope * (b_ - a_) * L
            if slope > 0 and F + gain >= 1.0:
                s_star = s_acc + a_ * L + (1.0 - F) / slope
                break
            F += gain
        if s_star is not None:
            break
        s_acc += L
    if s_star is None:
        s_star = _bisect_prefix(curve, metric, grid, 0.0, _traversal_length(curve))
    result = _assemble(curve, s_star)
    if abs(curve_integral(grid, result, metric) - 1.0) > 1e-9:
        s_star = _bisect_prefix(curve, metric, grid, 0.0, _traversal_length(curve))
        result = _assemble(curve, s_star)
    return result


def _traversal_length(curve):
    return math.fsum(p.total_length for p in _pieces_of(curve))


def _assemble(curve, s):
    pieces = _prefix_of_traversal(curve, s)
    if isinstance(curve, Polyline) and curve.multiplicity == 1 and len(pieces) == 1:
        return pieces[0]
    return Curve(pieces)


def _bisect_prefix(curve, metric, grid, lo, hi):
    while hi - lo > 1e-15 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if curve_integral(grid, Curve(_prefix_of_traversal(curve, mid)), metric) >= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class TransboundaryDomain:
    """Grid with holes ``K_1, ..., K_l`` collapsed to unit-mass atoms.

    The cell space lists the non-hole grid cells in grid order (area weights)
    followed by one atom per hole with weight exactly 1.
    """

    grid: Grid
    holes: tuple = ()

    def __post_init__(self):
        holes = tuple(frozenset(int(j) for j in h) for h in self.holes)
        seen = set()
        for h in holes:
            if not h:
                raise ContractError("holes must be nonempty")
            if min(h) < 0 or max(h) >= self.grid.n_cells:
                raise DimensionError("hole cell outside the grid")
            if seen & h:
                raise ContractError("holes must be pairwise disjoint")
            seen |= h
        object.__setattr__(self, "holes", holes)

    @cached_property
    def hole_of_cell(self) -> np.ndarray:
        out = np.full(self.grid.n_cells, -1, dtype=np.int64)
        for i, h in enumerate(self.holes):
            out[list(h)] = i
        return out

    @cached_property
    def cell_map(self) -> np.ndarray:
        """Space index of each grid cell, -1 for hole cells."""
        free = self.hole_of_cell < 0
        out = np.full(self.grid.n_cells, -1, dtype=np.int64)
        out[free] = np.arange(int(free.sum()))
        return out

    @property
    def n_free(self) -> int:
        return int((self.hole_of_cell < 0).sum())

    def atom_index(self, i: int) -> int:
        return self.n_free + i

    @cached_property
    def space(self) -> CellSpace:
        g = self.grid
        nf, nh = self.n_free, len(self.holes)
        weights = np.concatenate([np.full(nf, g.dx * g.dy), np.ones(nh)])
        atoms = np.concatenate([np.zeros(nf, dtype=bool), np.ones(nh, dtype=bool)])
        labels = [f"cell{j}" for j in np.flatnonzero(self.cell_map >= 0)]
        labels += [f"K{i + 1}" for i in range(nh)]
        return CellSpace(weights, atoms, labels)

    def to_grid_field(self, metric: Metric) -> tuple[np.ndarray, np.ndarray]:
        """Metric on the grid cells (holes filled with their atom value) and the atom values."""
        v = np.asarray(metric.values)
        atoms = v[self.n_free:]
        field = np.zeros(self.grid.n_cells)
        free = self.cell_map >= 0
        field[free] = v[self.cell_map[free]]
        for i, h in enumerate(self.holes):
            field[list(h)] = atoms[i]
        return field, atoms


def transboundary_measure(domain: TransboundaryDomain, curve) -> Measure:
    """Arclength outside the holes plus a unit atom for every hole the trace enters.

    The trace meets ``K_i`` when some clipped piece of positive length lies in
    a cell of ``K_i``; the atom entry is 1 however long or often the crossing is.
    """
    hole_of = domain.hole_of_cell
    cmap = domain.cell_map
    idx, val = [], []
    hit = set()
    total = 0.0
    for P, Q, mult in _traversal(curve):
        (cells, ta, tb), L = _segment_pieces(domain.grid, P, Q)
        total += L
        h = hole_of[cells]
        hit.update(int(i) for i in np.unique(h[h >= 0]))
        free = h < 0
        idx.append(cmap[cells[free]])
        val.append(mult * L * (tb[free] - ta[free]))
    if total == 0.0:
        warnings.warn("zero-length curve", RasterizationWarning, stacklevel=2)
    for i in sorted(hit):
        idx.append(np.array([domain.atom_index(i)]))
        val.append(np.array([1.0]))
    if not idx:
        return Measure()
    return Measure.accumulate(np.concatenate(idx), np.concatenate(val))


def transboundary_family(domain: TransboundaryDomain, curves: Sequence,
                         tags: Sequence | None = None) -> MeasureSystem:
    rows = tuple(transboundary_measure(domain, c) for c in curves)
    return MeasureSystem(rows, tags, allow_empty=True)


def gamma_phi_system(space: CellSpace, metric: Metric) -> MeasureSystem:
    """One row per cell with the single entry ``1/phi_j`` at cell ``j``.

    Each row integrates ``phi`` to exactly 1; these are the scaled atomic
    measures generating the system of all measures ``mu`` with
    ``integral(phi d mu) >= 1``, for which ``phi`` itself is extremal.
    """
    metric = metric if isinstance(metric, Metric) else Metric(metric)
    if len(metric) != space.n_cells:
        raise DimensionError("metric does not match the space")
    v = metric.values
    if np.any(v <= 0):
        raise ContractError("gamma_phi_system needs a strictly positive metric")
    rows = tuple(Measure([j], [1.0 / v[j]]) for j in range(v.size))
    tags = tuple(f"atom{j}" for j in range(v.size))
    return MeasureSystem(rows, tags)


@dataclass(frozen=True)
class UnitInterval:
    center_index: int
    center: float
    left: float
    right: float
    mass: float

    @property
    def length(self) -> float:
        return self.right - self.left


def _prefix_mass(samples, h):
    """Cumulative trapezoid integral at the sample nodes."""
    cum = np.zeros(samples.size)
    cum[1:] = np.cumsum(0.5 * h * (samples[1:] + samples[:-1]))
    return cum


def _mass_at(x, samples, cum, h):
    n = samples.size
    if x <= 0:
        return 0.0
    if x >= (n - 1) * h:
        return float(cum[-1])
    i = int(x // h)
    i = min(i, n - 2)
    t = (x - i * h) / h
    f0, f1 = samples[i], samples[i + 1]
    return float(cum[i] + h * t * (f0 + 0.5 * (f1 - f0) * t))


def unit_mass_intervals(line_samples, h: float, n: int, centers=None) -> list[UnitInterval]:
    """Smallest symmetric intervals of mass ``1/n`` around sample points.

    ``line_samples`` are metric values at positions ``0, h, 2h, ...`` along a
    line.  The metric is interpolated linearly between samples (which makes
    the mass consistent with trapezoidal prefix sums), and for each center the
    radius is found by bisection on the nondecreasing map ``r -> mass of
    [c - r, c + r]``.  Centers whose largest interval inside the sampled range
    has too little mass are skipped.  Traversing an interval ``n`` times gives
    a curve along which the metric integrates to 1.
    """
    phi = np.asarray(line_samples, dtype=float).ravel()
    if phi.size < 2:
        raise ContractError("need at least two samples")
    if not np.all(np.isfinite(phi)) or np.any(phi < 0):
        raise ContractError("samples must be finite and >= 0")
    if not h > 0 or int(n) != n or n < 1:
        raise ContractError("h must be positive and n a positive integer")
    cum = _prefix_mass(phi, h)
    target = 1.0 / n
    end = (phi.size - 1) * h
    if cum[-1] < target * (1 - 1e-12):
        return []
    if centers is None:
        centers = range(phi.size)
    out = []
    for ci in centers:
        c = ci * h
        rmax = min(c, end - c)

        def mass(r):
            return _mass_at(c + r, phi, cum, h) - _mass_at(c - r, phi, cum, h)

        top = mass(rmax)
        if top < target - 1e-12 * max(1.0, target):
            continue
        lo, hi = 0.0, rmax
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mass(mid) >= target:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-15 * max(h, hi):
                break
        out.append(UnitInterval(int(ci), c, c - hi, c + hi, mass(hi)))
    return out


def interval_polyline(start, direction, interval: UnitInterval, n: int) -> Polyline:
    """The interval placed on the line ``start + t * direction`` and traversed ``n`` times."""
    start = np.asarray(start, dtype=float)
    u = np.asarray(direction, dtype=float)
    u = u / math.hypot(u[0], u[1])
    return Polyline([start + interval.left * u, start + interval.right * u], n)
