"""p-modulus of finite measure systems.

For ``p > 1`` the problem ``min sum_j m_j phi_j**p  s.t.  A phi >= 1, phi >= 0``
is solved through its Lagrangian dual.  Minimising the Lagrangian over
``phi >= 0`` gives the closed form

    phi_j(lam) = ((A^T lam)_j / (p m_j)) ** (1 / (p - 1))

and the concave dual ``g(lam) = sum(lam) - (p - 1) * sum_j m_j phi_j(lam)**p``
has gradient ``1 - A phi(lam)``.  It is maximised over ``lam >= 0`` by a
projected Newton method with Armijo backtracking, falling back to projected
gradient steps when the Newton direction fails.  At every iterate the primal
candidate ``phi(lam) / min_i (A phi(lam))_i`` is admissible, which gives a
duality gap that certifies the result.

``p = 1`` is a linear program and is handed to the tableau simplex in
:mod:`modulus_lab.simplex`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import CellSpace, MeasureSystem, Metric, p_energy, validate_system
from .errors import (ContractError, DimensionError, InstanceTooLargeError,
                     UnsupportedInstanceError)
from .simplex import simplex_ge

__all__ = [
    "SolveOptions",
    "SolveReport",
    "solve",
    "solve_modulus",
    "solve_modulus_l1",
    "AtomicModulus",
    "eval_atomic_modulus_sub1",
    "BruteForceResult",
    "brute_force_modulus",
    "UniquenessReport",
    "uniqueness_check",
    "initial_dual",
]

OPTIMAL = "optimal"
MAX_ITERS = "max-iters"
INFEASIBLE = "infeasible"
EMPTY = "empty-system"

# below this exponent the dual map overflows; the LP is the right limit anyway
P_LP_THRESHOLD = 1.0 + 1e-6
# iterations without a 0.1% gain in gap or stationarity before giving up
_STAGNATION = 500


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 100_000
    gap_tol: float = 1e-8
    feas_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ContractError("max_iters must be a positive integer")
        for name in ("gap_tol", "feas_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ContractError(f"{name} must lie in (0, 1)")

    @property
    def eps_active_factor(self) -> float:
        return max(self.feas_tol, 1e-8)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a modulus computation.

    ``dual`` holds the multipliers of the constraints ``A phi >= 1`` for the
    objective ``sum m_j phi_j**p`` (so ``p m_j phi_j**(p-1) = (A^T dual)_j`` at
    an optimum with ``p > 1``, and ``A^T dual <= m`` for ``p = 1``).
    """

    value: float
    metric: Metric
    dual: np.ndarray
    gap: float
    active_set: tuple
    iterations: int
    status: str
    p: float
    dual_value: float = math.nan
    history: tuple = field(default=(), repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _check_inputs(system, space, p):
    if not isinstance(space, CellSpace):
        raise TypeError("space must be a CellSpace")
    if not p > 0 or not math.isfinite(p):
        raise ContractError("p must be a positive finite real")
    if system.max_index >= space.n_cells:
        raise DimensionError(
            f"system touches cell {system.max_index} of a {space.n_cells}-cell space")


def _trivial_report(system, space, p):
    n = space.n_cells
    if len(system) == 0:
        return SolveReport(0.0, Metric.zeros(n), np.zeros(0), 0.0, (), 0, EMPTY, p, 0.0)
    if validate_system(system).infeasible:
        return SolveReport(math.inf, Metric.zeros(n), np.zeros(len(system)), math.inf,
                           (), 0, INFEASIBLE, p, math.inf)
    return None


def solve(system: MeasureSystem, space: CellSpace, p: float,
          opts: SolveOptions | None = None) -> SolveReport:
    """Dispatch on ``p``: dual ascent for ``p > 1``, simplex for ``p = 1``,
    the atomic closed form for ``0 < p < 1``."""
    if p > 1:
        return solve_modulus(system, space, p, opts)
    if p == 1:
        return solve_modulus_l1(system, space, opts)
    res = eval_atomic_modulus_sub1(system, space, p)
    metric = res.metric if res.metric is not None else Metric.zeros(space.n_cells)
    return SolveReport(res.value, metric, np.zeros(len(system)), 0.0, (0,), 0,
                       OPTIMAL, p, res.value)


class _Dual:
    """Dual function of the p-modulus problem for a fixed system."""

    def __init__(self, A, weights, p):
        self.A = A
        self.AT = A.T.tocsr()
        self.m = weights
        self.p = p
        self.expo = 1.0 / (p - 1.0)
        self.pm = p * weights
        self.lam_single = np.exp(np.clip(_log_single_row_duals(A, weights, p), -700.0, 700.0))

    def phi(self, s):
        with np.errstate(over="ignore"):
            return np.power(np.maximum(s, 0.0) / self.pm, self.expo)

    def evaluate(self, lam):
        s = self.AT @ lam
        phi = self.phi(s)
        with np.errstate(over="ignore", invalid="ignore"):
            energy = float(self.m @ np.power(phi, self.p))
            r = self.A @ phi
            g = float(lam.sum()) - (self.p - 1.0) * energy
        if not np.isfinite(g):
            g = -math.inf
        return _State(lam, s, phi, r, energy, g)


@dataclass
class _State:
    lam: np.ndarray
    s: np.ndarray
    phi: np.ndarray
    r: np.ndarray
    energy: float
    g: float

    @property
    def grad(self):
        return 1.0 - self.r

    def primal(self, p):
        rmin = float(self.r.min())
        if not rmin > 0 or not np.isfinite(self.energy):
            return math.inf, rmin
        with np.errstate(over="ignore"):
            return float(self.energy * np.exp(-p * math.log(rmin))), rmin


def _log_single_row_duals(A, weights, p):
    """log of the multiplier that satisfies each row with equality on its own."""
    A = A.tocoo()
    k = A.shape[0]
    logw = np.log(p * weights)
    loga = np.log(A.data)
    terms = loga + (loga - logw[A.col]) / (p - 1.0)
    top = np.full(k, -np.inf)
    np.maximum.at(top, A.row, terms)
    acc = np.zeros(k)
    np.add.at(acc, A.row, np.exp(terms - top[A.row]))
    return -(p - 1.0) * (top + np.log(acc))


def initial_dual(system: MeasureSystem, space: CellSpace, p: float) -> np.ndarray:
    """Dual start built row by row, then rescaled so the primal candidate is admissible.

    Row ``i`` alone is satisfied with equality by the multiplier
    ``(sum_j a_ij (a_ij / (p m_j)) ** (1/(p-1))) ** -(p-1)``.  Summing these
    over rows can only raise every row integral, so the start is then shrunk
    by the common factor that brings the smallest row integral back to 1.
    Everything is done in log space because ``phi`` is homogeneous of degree
    ``1/(p-1)`` in the multipliers and overflows easily when ``p`` is near 1.
    """
    A = system.matrix(space.n_cells).tocoo()
    logw = np.log(p * space.weights)
    log_lam = _log_single_row_duals(A, space.weights, p)
    log_lam = np.clip(log_lam - log_lam.max(), -600.0, 0.0)
    lam = np.exp(log_lam)
    s = A.T @ lam
    with np.errstate(divide="ignore"):
        logphi = (np.log(s) - logw) / (p - 1.0)
    shift = logphi[np.isfinite(logphi)].max()
    r = A.tocsr() @ np.exp(logphi - shift)
    rmin = float(r.min())
    if not rmin > 0:
        return lam
    # want exp(shift) * c**(1/(p-1)) * rmin == 1
    log_c = -(p - 1.0) * (shift + math.log(rmin))
    return np.exp(np.clip(log_lam + log_c, -700.0, 700.0))


def solve_modulus(system: MeasureSystem, space: CellSpace, p: float,
                  opts: SolveOptions | None = None, *, dual_start=None,
                  record_history: bool = False) -> SolveReport:
    """Mod_p of ``system`` for ``p > 1`` together with its extremal metric.

    Parameters
    ----------
    system, space
        The measure system and its cell space.
    p : float
        Exponent, ``p > 1``.  Values below ``1 + 1e-6`` are routed to the
        linear program.
    opts : SolveOptions, optional
    dual_start : array_like, optional
        Starting multipliers (one per row).  Defaults to :func:`initial_dual`.
    record_history : bool
        Keep ``(primal, dual)`` objective pairs for every iteration.

    Returns
    -------
    SolveReport
        With status ``optimal`` the metric is admissible to ``feas_tol``,
        the relative duality gap is at most ``gap_tol`` and every row with
        multiplier above ``max(feas_tol, 1e-8) * max(dual)`` integrates the
        metric to 1 within ``feas_tol``.
    """
    opts = opts or SolveOptions()
    _check_inputs(system, space, p)
    if not p > 1:
        raise ContractError("solve_modulus needs p > 1; use solve_modulus_l1 for p = 1")
    trivial = _trivial_report(system, space, p)
    if trivial is not None:
        return trivial
    if p < P_LP_THRESHOLD:
        rep = solve_modulus_l1(system, space, opts)
        value = p_energy(rep.metric, space, p)
        return SolveReport(value, rep.metric, rep.dual, rep.gap, rep.active_set,
                           rep.iterations, rep.status, p, rep.dual_value, rep.history)

    A = system.matrix(space.n_cells)
    dual = _Dual(A, space.weights, p)
    if dual_start is None:
        lam = initial_dual(system, space, p)
    else:
        lam = np.maximum(np.asarray(dual_start, dtype=float).ravel(), 0.0)
        if lam.size != len(system):
            raise DimensionError("dual_start needs one entry per row")
        if not lam.any():
            lam = initial_dual(system, space, p)
    st = dual.evaluate(lam)
    # gradient step scale: inverse of a Hessian bound at the start
    row_norm = float(abs(A).sum(axis=1).max())
    alpha = 1.0 / max(row_norm ** 2 * float(np.max(_dphi(st, p))), 1e-300)

    history = []
    status = MAX_ITERS
    it = 0
    best = None
    progress = (math.inf, math.inf, 0)  # best gap, best stationarity, iteration
    for it in range(1, opts.max_iters + 1):
        P, rmin = st.primal(p)
        gap = (P - st.g) / P if P > 0 and math.isfinite(P) else math.inf
        if record_history:
            history.append((P, st.g))
        if best is None or gap < best[0]:
            best = (gap, st)
        if gap <= opts.gap_tol and _slack_ok(st, rmin, opts):
            status = OPTIMAL
            best = (gap, st)
            break
        w = _proj_grad_norm(st)
        if gap < 0.999 * progress[0] or w < 0.999 * progress[1]:
            progress = (min(gap, progress[0]), min(w, progress[1]), it)
        elif it - progress[2] > _STAGNATION:
            break
        new, alpha = _newton_step(dual, st, alpha)
        if new is None:
            new, alpha = _gradient_step(dual, st, alpha)
        if new is None:
            break
        st = new

    st = best[1]
    P, rmin = st.primal(p)
    phi = st.phi / rmin if rmin > 0 else st.phi
    metric = Metric(np.nan_to_num(phi, nan=0.0, posinf=0.0))
    value = p_energy(metric, space, p)
    if rmin > 0 and value > 0:
        gap = (value - st.g) / value
    else:
        gap = math.inf
    active = _active(st.lam, opts)
    return SolveReport(value, metric, st.lam.copy(), gap, active, it, status, p, st.g,
                       tuple(history))


def _dphi(st, p):
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(st.s > 0, st.phi / ((p - 1.0) * st.s), 0.0)
    return np.nan_to_num(d, nan=0.0, posinf=0.0)


def _active(lam, opts):
    if lam.size == 0:
        return ()
    eps = opts.eps_active_factor * float(lam.max())
    return tuple(int(i) for i in np.flatnonzero(lam > eps))


def _slack_ok(st, rmin, opts):
    if not rmin > 0:
        return False
    act = np.asarray(_active(st.lam, opts), dtype=int)
    if act.size == 0:
        return True
    return bool(np.all(np.abs(st.r[act] / rmin - 1.0) <= opts.feas_tol))


def _proj_grad_norm(st):
    return float(np.abs(np.maximum(st.lam + st.grad, 0.0) - st.lam).max())


def _newton_step(dual, st, alpha):
    p = dual.p
    grad = st.grad
    lam = st.lam
    w = _proj_grad_norm(st)
    eps_b = min(1e-10 * float(lam.max()), w)
    bound = (lam <= eps_b) & (grad <= 0)
    free = np.flatnonzero(~bound)
    if free.size == 0:
        return None, alpha
    AF = dual.A[free]
    H = (AF.multiply(_dphi(st, p)) @ AF.T).toarray()
    diag = H.diagonal().copy()
    scale = float(diag.max()) if diag.size else 0.0
    flat = diag <= 1e-14 * scale if scale > 0 else np.ones(free.size, dtype=bool)
    dF = np.zeros(free.size)
    # rows whose cells all carry phi = 0 have no curvature; send them to the
    # multiplier that satisfies them on their own
    fl = free[flat]
    dF[flat] = np.where(grad[fl] > 0, np.maximum(dual.lam_single[fl] - lam[fl], 0.0), 0.0)
    keep = ~flat
    if keep.any():
        Hk = H[np.ix_(keep, keep)]
        Hk[np.diag_indices_from(Hk)] += 1e-13 * scale
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            try:
                dF[keep] = linalg.solve(Hk, grad[free[keep]], assume_a="pos",
                                        check_finite=False)
            except (linalg.LinAlgError, ValueError):
                dF[keep] = linalg.lstsq(Hk, grad[free[keep]])[0]
    d = np.zeros_like(lam)
    d[free] = dF
    if p <= 2:
        d[bound] = -lam[bound]
    # for p > 2 phi is not Lipschitz in s at 0, so zeroing even a tiny bound
    # multiplier can move phi a lot; those stay put
    t = 1.0
    w0 = w
    for _ in range(60):
        lam_new = np.maximum(lam + t * d, 0.0)
        new = dual.evaluate(lam_new)
        if new.g >= st.g + 1e-4 * float(grad @ (lam_new - lam)) and new.g > -math.inf:
            if new.g > st.g or _proj_grad_norm(new) < w0:
                return new, alpha
        if t == 1.0 and new.g > -math.inf and _proj_grad_norm(new) < 0.5 * w0 \
                and new.g >= st.g - 1e-13 * abs(st.g):
            # accept full steps that shrink stationarity once g is at roundoff level
            return new, alpha
        t *= 0.5
    return None, alpha


def _gradient_step(dual, st, alpha):
    grad = st.grad
    t = alpha
    for _ in range(80):
        lam_new = np.maximum(st.lam + t * grad, 0.0)
        new = dual.evaluate(lam_new)
        if new.g >= st.g + 1e-4 * float(grad @ (lam_new - st.lam)) and new.g > st.g:
            return new, min(2.0 * t, 1e300)
        t *= 0.5
    return None, alpha


def solve_modulus_l1(system: MeasureSystem, space: CellSpace,
                     opts: SolveOptions | None = None, *, pivot_order="bland",
                     rng=None) -> SolveReport:
    """Mod_1 as the linear program ``min m.phi  s.t.  A phi >= 1, phi >= 0``.

    Solved by the primal two-phase simplex with Bland's rule; ``pivot_order``
    changes the column priority and therefore which optimal vertex is reported
    when the optimum is not unique.
    """
    opts = opts or SolveOptions()
    _check_inputs(system, space, 1.0)
    trivial = _trivial_report(system, space, 1.0)
    if trivial is not None:
        return trivial
    A = system.matrix(space.n_cells)
    res = simplex_ge(space.weights, A, np.ones(len(system)), order=pivot_order,
                     max_pivots=max(opts.max_iters, 1), rng=rng)
    if res.status == "infeasible":
        return SolveReport(math.inf, Metric.zeros(space.n_cells), np.zeros(len(system)),
                           math.inf, (), res.pivots, INFEASIBLE, 1.0, math.inf)
    metric = Metric(res.x)
    value = p_energy(metric, space, 1.0)
    dual_value = math.fsum(res.y)
    gap = abs(value - dual_value) / value if value > 0 else 0.0
    status = OPTIMAL if res.status == "optimal" else MAX_ITERS
    return SolveReport(value, metric, res.y, gap, _active(res.y, opts), res.pivots,
                       status, 1.0, dual_value)


@dataclass(frozen=True)
class AtomicModulus:
    value: float
    metric: Metric | None
    witnesses: tuple
    extremal_exists: bool
    note: str = ""


def eval_atomic_modulus_sub1(system: MeasureSystem, space: CellSpace, p: float,
                             divisible: bool = False) -> AtomicModulus:
    """Mod_p of ``{m restricted to A}`` for ``0 < p < 1`` when ``A`` is a union of atoms.

    The value is ``(min_i c_i)**(1 - p)`` over the atom masses ``c_i``, attained by
    ``chi_{A_i} / c_i`` on any lightest atom; all such witnesses are returned.

    ``divisible=True`` stands for a set containing subsets of arbitrarily small
    positive mass.  That case cannot be represented by finitely many cells; the
    evaluator returns the limiting value 0 and reports that no extremal metric
    exists instead of simulating it.
    """
    if not 0 < p < 1:
        raise ContractError("eval_atomic_modulus_sub1 needs 0 < p < 1")
    if divisible:
        return AtomicModulus(0.0, None, (), False,
                             "arbitrarily small subsets: modulus 0, no extremal metric")
    if len(system) != 1:
        raise UnsupportedInstanceError("expected a single row m restricted to A")
    row = system[0]
    if row.is_zero:
        raise UnsupportedInstanceError("the row is zero")
    if row.indices[-1] >= space.n_cells:
        raise DimensionError("row touches a cell outside the space")
    cells = row.indices
    if not np.all(space.atoms[cells]):
        raise UnsupportedInstanceError("row is supported on non-atomic cells")
    c = space.weights[cells]
    if not np.allclose(row.values, c, rtol=1e-12, atol=0):
        raise UnsupportedInstanceError("row is not the restriction of m to its support")
    cmin = float(c.min())
    value = cmin ** (1.0 - p)
    witnesses = []
    for j in cells[c == cmin]:
        v = np.zeros(space.n_cells)
        v[j] = 1.0 / cmin
        witnesses.append(Metric(v))
    return AtomicModulus(value, witnesses[0], tuple(witnesses), True)


@dataclass(frozen=True)
class BruteForceResult:
    value: float
    metric: Metric | None
    step: float
    resolution: float
    boxes: int


def brute_force_modulus(system: MeasureSystem, space: CellSpace, p: float,
                        step: float = 1e-3, bound=None, max_cells: int = 5,
                        max_rows: int = 4) -> BruteForceResult:
    """Exact minimum of the p-energy over admissible points of a lattice.

    The lattice is ``{0, step, 2 step, ..., B_j}`` in every cell.  ``bound``
    may be a scalar or one value per cell; by default ``B_j`` is
    ``max_i 1/a_ij`` over the rows touching cell ``j`` (beyond that value a
    coordinate can be lowered without losing admissibility), rounded up to the
    lattice.

    The search is exhaustive over the lattice but skips boxes that provably
    hold nothing better: a box ``[lo, hi]`` is discarded when ``hi`` is not
    admissible (no point in it is, as rows are nonnegative) or when the energy
    of ``lo`` is not below the incumbent (energy is increasing in each cell).
    Only monotonicity is used, so the result is independent of the solvers.

    ``resolution`` bounds ``value - Mod_p``: rounding the optimum up to the
    lattice raises the energy by at most ``sum_j m_j p B_j**(p-1) step``.
    """
    _check_inputs(system, space, p)
    n, k = space.n_cells, len(system)
    if n > max_cells or k > max_rows:
        raise InstanceTooLargeError(
            f"brute force limited to {max_cells} cells and {max_rows} rows, got {n} and {k}")
    if not step > 0:
        raise ContractError("step must be positive")
    if k == 0:
        return BruteForceResult(0.0, Metric.zeros(n), step, 0.0, 0)
    A = system.matrix(n).toarray()
    if np.any(~A.any(axis=1)):
        return BruteForceResult(math.inf, None, step, 0.0, 0)
    if bound is None:
        with np.errstate(divide="ignore"):
            inv = np.where(A > 0, 1.0 / np.where(A > 0, A, 1.0), 0.0)
        bnd = inv.max(axis=0)
    else:
        bnd = np.broadcast_to(np.asarray(bound, dtype=float), (n,)).copy()
    top = [int(math.ceil(b / step - 1e-9)) for b in bnd]
    w = [float(x) for x in space.weights]
    rows = [[float(A[i, j]) * step for j in range(n)] for i in range(k)]
    cost = [[w[j] * (t * step) ** p for t in range(top[j] + 1)] for j in range(n)]
    slack = 1e-12

    def feasible(x):
        for row in rows:
            if sum(a * xi for a, xi in zip(row, x)) < 1.0 - slack:
                return False
        return True

    def energy(x):
        return sum(cost[j][x[j]] for j in range(n))

    hi0 = tuple(top)
    if not feasible(hi0):
        return BruteForceResult(math.inf, None, step, 0.0, 0)
    best_x, best = hi0, energy(hi0)
    stack = [(tuple([0] * n), hi0)]
    boxes = 0
    while stack:
        lo, hi = stack.pop()
        boxes += 1
        if energy(lo) >= best:
            continue
        if not feasible(hi):
            continue
        if feasible(lo):
            best_x, best = lo, energy(lo)
            continue
        e_hi = energy(hi)
        if e_hi < best:
            best_x, best = hi, e_hi
        j = max(range(n), key=lambda i: hi[i] - lo[i])
        mid = (lo[j] + hi[j]) // 2
        upper_lo = lo[:j] + (mid + 1,) + lo[j + 1:]
        lower_hi = hi[:j] + (mid,) + hi[j + 1:]
        stack.append((upper_lo, hi))
        stack.append((lo, lower_hi))
    lip = step * sum(w[j] * p * (top[j] * step) ** (p - 1.0) for j in range(n))
    metric = Metric(np.asarray(best_x, dtype=float) * step)
    return BruteForceResult(float(best), metric, step, lip, boxes)


@dataclass(frozen=True)
class UniquenessReport:
    unique: bool
    max_distance: float
    metrics: tuple
    values: tuple
    witness_pair: tuple | None = None
    defect: str | None = None


def uniqueness_check(system: MeasureSystem, space: CellSpace, p: float,
                     opts: SolveOptions | None = None, starts: int = 3) -> UniquenessReport:
    """Re-solve from several starts and compare the extremal metrics.

    For ``p > 1`` the starts are seeded log-normal perturbations of the default
    dual start, and any spread above ``10 * feas_tol`` is reported as a defect,
    since the extremal metric is unique there.  For ``p = 1`` the simplex is
    rerun with natural, reversed and seeded random column priorities; distinct
    optimal vertices are expected and are not a defect.
    """
    opts = opts or SolveOptions()
    if starts < 1:
        raise ContractError("starts must be >= 1")
    rng = np.random.default_rng(opts.seed)
    reports = []
    if p > 1 and p >= P_LP_THRESHOLD:
        base = initial_dual(system, space, p) if len(system) else np.zeros(0)
        reports.append(solve_modulus(system, space, p, opts))
        for _ in range(max(starts, 3)):
            lam0 = base * np.exp(rng.normal(0.0, 1.0, base.size))
            reports.append(solve_modulus(system, space, p, opts, dual_start=lam0))
    elif p >= 1:
        orders = ["bland", "reverse"] + ["random"] * max(starts - 2, 1)
        for order in orders:
            reports.append(solve_modulus_l1(system, space, opts, pivot_order=order, rng=rng))
    else:
        raise ContractError("uniqueness_check needs p >= 1")
    metrics = tuple(r.metric for r in reports)
    values = tuple(r.value for r in reports)
    dmax, pair = 0.0, None
    for i, j in itertools.combinations(range(len(metrics)), 2):
        d = float(np.abs(metrics[i].values - metrics[j].values).max(initial=0.0))
        if d > dmax:
            dmax, pair = d, (i, j)
    unique = dmax <= 10 * opts.feas_tol
    defect = None
    if not unique and p > 1:
        defect = (f"extremal metrics from different starts differ by {dmax:.3e} "
                  f"(> {10 * opts.feas_tol:.1e}); statuses "
                  f"{[r.status for r in reports]}")
    return UniquenessReport(unique, dmax, metrics, values,
                            None if unique else pair, defect)
