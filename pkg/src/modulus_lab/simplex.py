"""Dense two-phase tableau simplex for ``min c.x  s.t.  A x >= b, x >= 0``.

Pivoting follows Bland's rule relative to a fixed priority order of the
columns: the entering column is the highest-priority column with negative
reduced cost, and ties in the ratio test go to the highest-priority basic
column.  Any fixed order prevents cycling, and changing the order is how
callers reach different optimal vertices of a degenerate problem.

Dual values ``y >= 0`` for the rows of ``A x >= b`` are read off the reduced
costs of the surplus columns, so ``b.y == c.x`` at an optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "simplex_ge", "pivot_priority"]

_EPS = 1e-11


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded | max-pivots
    x: np.ndarray
    y: np.ndarray
    value: float
    pivots: int


def pivot_priority(n: int, order="bland", rng=None) -> np.ndarray:
    """Priority list of the ``n`` structural columns.

    ``order`` is ``"bland"`` (natural order), ``"reverse"``, ``"random"``
    (requires ``rng``) or an explicit permutation of ``range(n)``.
    """
    if isinstance(order, str):
        if order == "bland":
            return np.arange(n)
        if order == "reverse":
            return np.arange(n)[::-1].copy()
        if order == "random":
            if rng is None:
                raise ValueError("order='random' needs an rng")
            return rng.permutation(n)
        raise ValueError(f"unknown pivot order {order!r}")
    perm = np.asarray(order, dtype=int)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError("pivot order must be a permutation of the structural columns")
    return perm


class _Tableau:
    def __init__(self, T, basis, rank):
        self.T = T
        self.basis = basis
        self.rank = rank
        self.pivots = 0

    @property
    def m(self):
        return self.T.shape[0] - 1

    def pivot(self, r, e):
        T = self.T
        T[r] /= T[r, e]
        col = T[:, e].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, e] = 0.0
        T[r, e] = 1.0
        self.basis[r] = e
        self.pivots += 1

    def run(self, allowed, max_pivots):
        T, rank = self.T, self.rank
        allowed = np.asarray(allowed)
        while True:
            d = T[-1, allowed]
            cand = allowed[d < -_EPS]
            if cand.size == 0:
                return "optimal"
            if self.pivots >= max_pivots:
                return "max-pivots"
            e = cand[np.argmin(rank[cand])]
            col = T[:-1, e]
            pos = np.flatnonzero(col > _EPS)
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, -1] / col[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + _EPS * max(1.0, abs(rmin))]
            r = ties[np.argmin(rank[np.asarray(self.basis)[ties]])]
            self.pivot(r, e)


def simplex_ge(c, A, b, order="bland", max_pivots=None, rng=None) -> LPResult:
    """Solve ``min c.x`` subject to ``A x >= b`` and ``x >= 0``.

    Parameters
    ----------
    c : (n,) array_like
    A : (m, n) array_like or sparse matrix
    b : (m,) array_like
    order : str or permutation
        Column priority for Bland's rule, see :func:`pivot_priority`.
    max_pivots : int, optional
        Defaults to ``50 * (m + n)``.

    Returns
    -------
    LPResult
        ``x`` has length ``n``; ``y`` has length ``m`` and satisfies
        ``A.T y <= c``, ``y >= 0`` at an optimum.
    """
    A = A.toarray() if hasattr(A, "toarray") else np.asarray(A, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    if c.size != n or b.size != m:
        raise ValueError("shape mismatch between c, A and b")
    if max_pivots is None:
        max_pivots = 50 * (m + n)

    # equilibrate rows and cost so that the absolute pivot tolerance is meaningful
    row_scale = np.abs(np.hstack([A, b[:, None]])).max(axis=1) if m else np.zeros(0)
    row_scale = np.where(row_scale > 0, 1.0 / np.where(row_scale > 0, row_scale, 1.0), 1.0)
    cost_scale = np.abs(c).max() if n and np.abs(c).max() > 0 else 1.0
    As = A * row_scale[:, None]
    bs = b * row_scale
    cs = c / cost_scale

    need_art = bs > 0
    art_rows = np.flatnonzero(need_art)
    k = art_rows.size
    N = n + m + k
    T = np.zeros((m + 1, N + 1))
    sign = np.where(need_art, 1.0, -1.0)
    T[:m, :n] = As * sign[:, None]
    T[np.arange(m), n + np.arange(m)] = -sign
    T[art_rows, n + m + np.arange(k)] = 1.0
    T[:m, -1] = bs * sign
    basis = [0] * m
    for i in range(m):
        basis[i] = n + i
    for j, i in enumerate(art_rows):
        basis[i] = n + m + j

    prio = pivot_priority(n, order, rng)
    rank = np.empty(N, dtype=int)
    rank[prio] = np.arange(n)
    rank[n:] = np.arange(n, N)
    tab = _Tableau(T, basis, rank)

    if k:
        T[-1, :] = 0.0
        T[-1, n + m:n + m + k] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        status = tab.run(np.arange(N), max_pivots)
        if status == "max-pivots":
            return _result(tab, "max-pivots", n, m, cs, row_scale, cost_scale)
        if -T[-1, -1] > 1e-9:
            return _result(tab, "infeasible", n, m, cs, row_scale, cost_scale)
        # drive zero-level artificials out of the basis, dropping redundant rows
        drop = []
        for r in range(m):
            if tab.basis[r] >= n + m:
                nz = np.flatnonzero(np.abs(T[r, :n + m]) > _EPS)
                if nz.size:
                    tab.pivot(r, nz[np.argmin(rank[nz])])
                else:
                    drop.append(r)
        if drop:
            keep = [r for r in range(m + 1) if r not in drop]
            tab.T = T = T[keep]
            tab.basis = [bv for r, bv in enumerate(tab.basis) if r not in drop]
        tab.T = T = np.delete(T, np.arange(n + m, N), axis=1)
        tab.rank = rank = rank[:n + m]

    cfull = np.concatenate([cs, np.zeros(m)])
    T[-1, :] = 0.0
    T[-1, :n + m] = cfull
    for r, bv in enumerate(tab.basis):
        if cfull[bv] != 0.0:
            T[-1] -= cfull[bv] * T[r]
    status = tab.run(np.arange(n + m), max_pivots)
    return _result(tab, status, n, m, cs, row_scale, cost_scale)


def _result(tab, status, n, m, cs, row_scale, cost_scale):
    T = tab.T
    xs = np.zeros(T.shape[1] - 1)
    xs[np.asarray(tab.basis, dtype=int)] = T[:-1, -1]
    x = np.maximum(xs[:n], 0.0)
    if status == "optimal" and T.shape[1] - 1 >= n + m:
        y_hat = np.maximum(T[-1, n:n + m], 0.0)
        y = cost_scale * row_scale * y_hat
    else:
        y = np.zeros(m)
    value = cost_scale * float(cs @ x) if status != "infeasible" else np.inf
    return LPResult(status, x, y, value, tab.pivots)
