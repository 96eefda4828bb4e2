"""Beurling-type extremality certificates in finite dimensions.

A certificate for a metric ``phi`` is a finite family ``F`` of measures
``nu = c * mu`` (``0 < c <= 1``) with multipliers ``lambda >= 0``.  It is
checked against three conditions:

(a) adding ``F`` to the system does not change the modulus;
(b) ``integral(phi d nu) == 1`` for every member;
(c) for ``p > 1`` the vector ``t = m * phi**(p - 1)`` lies in the cone spanned by
    ``F``; for ``p = 1`` some nonnegative combination of ``F`` equals ``m`` on the
    support of ``phi`` and is at most ``m`` off it.

Condition (c) is the finite form of "every test function ``f`` that is
nonnegative on ``F`` has ``integral(f phi**(p-1) dm) >= 0``".  By Farkas'
lemma it fails exactly when such an ``f`` with a negative pairing exists, and
the verifier returns that ``f`` as a witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import CellSpace, Measure, MeasureSystem, Metric, integrate, is_admissible, p_energy
from .errors import ContractError, DimensionError
from .simplex import simplex_ge
from .solver import EMPTY, OPTIMAL, SolveOptions, SolveReport, solve

__all__ = [
    "FamilyMember",
    "BeurlingCertificate",
    "ConeResult",
    "ConditionA",
    "VerificationReport",
    "cone_membership",
    "cone_target",
    "build_certificate",
    "fit_certificate",
    "verify_certificate",
    "check_condition_a",
    "CERT_TOL",
]

CERT_TOL = 1e-7
ZERO_SET_RTOL = 1e-12


@dataclass(frozen=True)
class FamilyMember:
    """``scale * mu`` where ``mu`` is row ``row`` of the system or an explicit measure."""

    scale: float
    lam: float
    row: int | None = None
    measure: Measure | None = None

    def __post_init__(self):
        if (self.row is None) == (self.measure is None):
            raise ContractError("a family member needs exactly one of row or measure")
        if not math.isfinite(self.scale) or not math.isfinite(self.lam):
            raise ContractError("scale and lambda must be finite")

    def base(self, system: MeasureSystem) -> Measure:
        if self.measure is not None:
            return self.measure
        if not 0 <= self.row < len(system):
            raise DimensionError(f"certificate refers to row {self.row}, system has {len(system)}")
        return system[self.row]

    def nu(self, system: MeasureSystem) -> Measure:
        return self.base(system).scaled(self.scale)


@dataclass(frozen=True)
class BeurlingCertificate:
    """Family ``F`` with multipliers, for exponent ``p >= 1``.

    Construction does not enforce ``lambda >= 0`` or ``0 < scale <= 1`` so that a
    tampered certificate can be loaded; :func:`verify_certificate` rejects it.
    """

    p: float
    family: tuple = ()

    def __post_init__(self):
        if not self.p >= 1:
            raise ContractError("certificates exist only for p >= 1")
        object.__setattr__(self, "family", tuple(self.family))

    def __len__(self):
        return len(self.family)

    @property
    def lam(self) -> np.ndarray:
        return np.array([f.lam for f in self.family], dtype=float)

    @property
    def scales(self) -> np.ndarray:
        return np.array([f.scale for f in self.family], dtype=float)

    def measures(self, system: MeasureSystem) -> list[Measure]:
        return [f.nu(system) for f in self.family]

    def with_lambda(self, lam) -> "BeurlingCertificate":
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (len(self.family),):
            raise DimensionError("lambda length does not match the family")
        fam = tuple(FamilyMember(f.scale, float(l), f.row, f.measure)
                    for f, l in zip(self.family, lam))
        return BeurlingCertificate(self.p, fam)

    def is_row_subfamily(self) -> bool:
        """Every member is an unscaled row of the tested system."""
        return all(f.row is not None and f.scale == 1.0 for f in self.family)


@dataclass(frozen=True)
class ConeResult:
    feasible: bool
    lam: np.ndarray
    residual: float
    witness: np.ndarray | None = None


def _generator_matrix(generators, n):
    rows = list(generators)
    if not rows:
        return sp.csr_matrix((0, n))
    return MeasureSystem(tuple(rows), allow_empty=True).matrix(n)


def cone_membership(target, generators, tol: float = CERT_TOL, *, two_sided=None) -> ConeResult:
    """Is ``target`` a nonnegative combination of the generator measures?

    Solves ``min over lambda >= 0 of max_j |(G^T lambda - t)_j|`` where cells
    outside ``two_sided`` (a boolean mask, default all cells) only require
    ``(G^T lambda)_j <= t_j``.  The LP is solved through its dual

        max  t.(u - v)   s.t.  G (u - v) <= 0,  sum(u) + sum(v) <= 1,  u, v >= 0

    (``u`` lives on the two-sided cells), whose slack basis is feasible.  The
    optimal value is the residual, ``lambda`` comes from the simplex duals, and
    ``f = v - u`` is a separating witness: ``<f, nu> >= 0`` for every
    generator, ``<f, t> = -residual`` and ``f >= 0`` on the one-sided cells.

    The target is accepted when ``residual <= tol * max|t|``; otherwise the
    witness is returned.
    """
    t = np.asarray(target, dtype=float).ravel()
    n = t.size
    G = _generator_matrix(generators, n)
    k = G.shape[0]
    S = np.ones(n, dtype=bool) if two_sided is None else np.asarray(two_sided, dtype=bool)
    if S.shape != (n,):
        raise DimensionError("two_sided mask does not match the target")
    scale = float(np.abs(t).max()) if n else 0.0
    if scale == 0.0:
        return ConeResult(True, np.zeros(k), 0.0, None)
    if k == 0:
        # residual of lambda = 0; witness pairs negatively with t
        f = np.zeros(n)
        pos = S & (t > 0)
        if not pos.any():
            return ConeResult(True, np.zeros(0), float(np.maximum(-t, 0).max()), None)
        j = int(np.argmax(np.where(pos, t, -np.inf)))
        f[j] = -1.0
        return ConeResult(False, np.zeros(0), float(t[pos].max()), f)
    Gd = G.toarray()
    ts = t / scale
    sidx = np.flatnonzero(S)
    # variables x = (u on S, v on all cells)
    c = np.concatenate([-ts[sidx], ts])
    A = np.vstack([
        np.hstack([-Gd[:, sidx], Gd]),
        -np.ones((1, sidx.size + n)),
    ])
    b = np.concatenate([np.zeros(k), [-1.0]])
    res = simplex_ge(c, A, b)
    if res.status != "optimal":
        raise RuntimeError(f"cone LP ended with status {res.status}")
    residual = scale * max(0.0, -res.value)
    lam = scale * res.y[:k]
    u = np.zeros(n)
    u[sidx] = res.x[:sidx.size]
    v = res.x[sidx.size:]
    f = v - u
    # the simplex duals are exact up to roundoff; report the residual they achieve
    direct = _residual(Gd.T @ lam - t, S)
    residual = min(residual, direct) if direct <= tol * scale else residual
    if residual <= tol * scale:
        return ConeResult(True, lam, residual, None)
    return ConeResult(False, lam, residual, f)


def _residual(diff, S):
    two = np.abs(diff[S]).max(initial=0.0)
    one = np.maximum(diff[~S], 0.0).max(initial=0.0)
    return float(max(two, one))


def cone_target(metric: Metric, space: CellSpace, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Target vector and two-sided mask for condition (c).

    For ``p > 1`` the target is ``m * phi**(p-1)`` with every cell two-sided.
    For ``p = 1`` it is ``m`` with the support of ``phi`` two-sided and the zero
    set (``phi_j <= 1e-12 * max(phi)``) one-sided.
    """
    phi = np.asarray(metric.values, dtype=float)
    m = space.weights
    if p > 1:
        return m * phi ** (p - 1.0), np.ones(phi.size, dtype=bool)
    top = float(phi.max()) if phi.size else 0.0
    support = phi > ZERO_SET_RTOL * top if top > 0 else np.zeros(phi.size, dtype=bool)
    return m.copy(), support


def build_certificate(system: MeasureSystem, space: CellSpace, report: SolveReport,
                      p: float | None = None) -> BeurlingCertificate:
    """Certificate from an optimal solve: the active rows, normalized.

    Member ``i`` is ``c_i mu_i`` with ``c_i = 1 / integral(phi d mu_i)`` (capped
    at 1) so that it integrates ``phi`` to 1, and its multiplier is the row's
    dual rescaled to the normalized measure (and divided by ``p`` so that the
    combination reproduces ``m * phi**(p-1)``).
    """
    p = report.p if p is None else p
    if report.status == EMPTY:
        return BeurlingCertificate(p, ())
    if report.status != OPTIMAL:
        raise ContractError(f"cannot certify a report with status {report.status!r}")
    fam = []
    for i in report.active_set:
        val = integrate(report.metric, system[i])
        c = 1.0 if val <= 1.0 else 1.0 / val
        lam = report.dual[i] / c
        if p > 1:
            lam /= p
        fam.append(FamilyMember(c, float(lam), row=int(i)))
    return BeurlingCertificate(p, tuple(fam))


def fit_certificate(measures, metric: Metric, space: CellSpace, p: float,
                    tol: float = CERT_TOL) -> BeurlingCertificate:
    """Certificate for ``metric`` built on explicit measures (not system rows).

    Each measure is normalized to integrate ``metric`` to 1 and the multipliers
    are the cone-membership solution for condition (c).  A measure whose
    integral is below 1 cannot be normalized with a scale in (0, 1] and is kept
    at scale 1, which condition (b) will then reject.
    """
    metric = metric if isinstance(metric, Metric) else Metric(metric)
    ms = list(measures)
    scales = []
    for mu in ms:
        val = integrate(metric, mu)
        scales.append(1.0 / val if val >= 1.0 else 1.0)
    nus = [mu.scaled(c) for mu, c in zip(ms, scales)]
    t, S = cone_target(metric, space, p)
    cone = cone_membership(t, nus, tol, two_sided=S)
    fam = tuple(FamilyMember(c, float(l), measure=mu)
                for mu, c, l in zip(ms, scales, cone.lam))
    return BeurlingCertificate(p, fam)


@dataclass(frozen=True)
class ConditionA:
    status: str  # pass | fail | skipped
    residual: float = 0.0
    note: str = ""
    values: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "skipped")


@dataclass(frozen=True)
class VerificationReport:
    condition_a: ConditionA
    condition_b: float
    condition_c: float
    verdict: bool
    notes: tuple = ()
    failed: tuple = ()
    witness: np.ndarray | None = None
    lam: np.ndarray | None = None
    energy: float = math.nan
    solve_value: float | None = None

    def __bool__(self):
        return self.verdict

    def summary(self) -> str:
        lines = [f"(a) {self.condition_a.status:7s} residual {self.condition_a.residual:.3e}",
                 f"(b) {'pass' if 'b' not in self.failed else 'fail':7s} residual {self.condition_b:.3e}",
                 f"(c) {'pass' if 'c' not in self.failed else 'fail':7s} residual {self.condition_c:.3e}",
                 f"verdict: {'extremal' if self.verdict else 'not certified'}"]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def check_condition_a(system: MeasureSystem, cert: BeurlingCertificate, space: CellSpace,
                      p: float | None = None, opts: SolveOptions | None = None) -> ConditionA:
    """Re-solve ``Mod_p(E)`` and ``Mod_p(E u F)`` and compare.

    Passes iff the two values differ by at most ``2 * gap_tol * value``.
    """
    p = cert.p if p is None else p
    opts = opts or SolveOptions()
    extra = MeasureSystem(tuple(cert.measures(system)), allow_empty=True)
    union = system | extra
    r0 = solve(system, space, p, opts)
    r1 = solve(union, space, p, opts)
    if r1.status == "infeasible" or r0.status == "infeasible":
        return ConditionA("fail", math.inf, "union or system is infeasible (zero row)",
                          (r0.value, r1.value))
    notes = []
    for name, r in (("system", r0), ("union", r1)):
        if r.status not in (OPTIMAL, EMPTY):
            notes.append(f"{name} solve ended with status {r.status}")
    diff = abs(r1.value - r0.value)
    bound = 2 * opts.gap_tol * max(r0.value, r1.value)
    status = "pass" if diff <= bound else "fail"
    return ConditionA(status, diff, "; ".join(notes), (r0.value, r1.value))


def verify_certificate(cert: BeurlingCertificate, system: MeasureSystem, space: CellSpace,
                       metric: Metric, tol: float = CERT_TOL, *, opts: SolveOptions | None = None,
                       check_a: bool = True, compare_solve: bool = False) -> VerificationReport:
    """Check conditions (a), (b), (c) for ``metric`` with certificate ``cert``.

    Parameters
    ----------
    tol : float
        Absolute tolerance for (b); (c) passes when its residual is at most
        ``tol * max|t|``.
    check_a : bool
        Re-solve to check (a) unless every member is an unscaled row of
        ``system`` (then (a) holds trivially and is reported as skipped).
        With ``check_a=False`` the condition is reported as skipped and the
        verdict rests on (b) and (c) alone.
    compare_solve : bool
        Also solve the system independently and compare its value with
        ``p_energy(metric)`` (relative ``tol``).

    Notes
    -----
    The multipliers stored in the certificate are tried first.  If they do
    not reproduce the cone target, the best multipliers are recomputed by
    :func:`cone_membership`, so the verdict does not depend on how ``lambda``
    is scaled.  Negative multipliers or scales outside (0, 1] fail outright.
    """
    metric = metric if isinstance(metric, Metric) else Metric(metric)
    n = space.n_cells
    if len(metric) != n:
        raise DimensionError("metric does not match the space")
    if system.max_index >= n:
        raise DimensionError("system refers to cells outside the space")
    p = cert.p
    opts = opts or SolveOptions()
    notes, failed = [], []
    energy = p_energy(metric, space, p)

    adm = is_admissible(metric, system, tol)
    if not adm:
        notes.append(f"metric not admissible: row {adm.worst_row} integrates to {adm.worst_value:.6g}")
        return VerificationReport(ConditionA("skipped", 0.0, "not reached"), math.inf, math.inf,
                                  False, tuple(notes), ("admissible",), None, None, energy)

    lam = cert.lam
    scales = cert.scales
    if np.any(lam < 0):
        notes.append(f"negative multiplier at member {int(np.flatnonzero(lam < 0)[0])}")
        failed.append("sign")
    if np.any(~((scales > 0) & (scales <= 1.0))):
        notes.append("scale outside (0, 1]")
        failed.append("scale")

    nus = cert.measures(system)
    if any(nu.nnz and int(nu.indices.max()) >= n for nu in nus):
        raise DimensionError("certificate measure refers to cells outside the space")
    b_res = max((abs(integrate(metric, nu) - 1.0) for nu in nus), default=0.0)
    if b_res > tol:
        failed.append("b")

    t, S = cone_target(metric, space, p)
    tmax = float(np.abs(t).max()) if n else 0.0
    witness = None
    used_lam = lam
    if not nus:
        c_res = tmax if (p > 1 or S.any()) else 0.0
        if c_res > tol * tmax:
            notes.append("empty family but the metric is not zero")
            witness = -np.where(S, np.sign(t), 0.0)
    else:
        G = MeasureSystem(tuple(nus), allow_empty=True).matrix(n)
        c_res = _residual(G.T @ np.maximum(lam, 0.0) - t, S)
        if c_res > tol * tmax:
            cone = cone_membership(t, nus, tol, two_sided=S)
            c_res, used_lam, witness = cone.residual, cone.lam, cone.witness
    if c_res > tol * tmax:
        failed.append("c")

    if check_a and not cert.is_row_subfamily():
        cond_a = check_condition_a(system, cert, space, p, opts)
    elif cert.is_row_subfamily():
        cond_a = ConditionA("skipped", 0.0, "F consists of unscaled rows of the system")
    else:
        cond_a = ConditionA("skipped", 0.0, "not requested")
    if cond_a.status == "fail":
        failed.append("a")
        if cond_a.note:
            notes.append(cond_a.note)

    solve_value = None
    if compare_solve:
        r = solve(system, space, p, opts)
        solve_value = r.value
        if not abs(r.value - energy) <= tol * max(1.0, abs(r.value)):
            failed.append("energy")
            notes.append(f"independent solve gives {r.value:.12g}, metric energy {energy:.12g}")

    return VerificationReport(cond_a, float(b_res), float(c_res), not failed, tuple(notes),
                              tuple(failed), witness, used_lam, energy, solve_value)
