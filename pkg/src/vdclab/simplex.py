"""Dense two-phase tableau simplex for  min c.x  s.t.  A x = b, x >= 0."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray
    fun: float
    duals: np.ndarray
    iterations: int


def _pivot(T, r, s):
    T[r] /= T[r, s]
    col = T[:, s].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _entering(cost, allowed, rule, tol):
    cand = np.flatnonzero((cost < -tol) & allowed)
    if not cand.size:
        return None
    if rule == "bland":
        return int(cand[0])
    return int(cand[np.argmin(cost[cand])])


def _leaving(T, s, basis, tol):
    col = T[:-1, s]
    pos = np.flatnonzero(col > tol)
    if not pos.size:
        return None
    ratios = T[pos, -1] / col[pos]
    rmin = ratios.min()
    tied = pos[ratios <= rmin + tol * max(1.0, abs(rmin))]
    # Bland: smallest basic variable index among ties
    return int(tied[np.argmin(basis[tied])])


def _run(T, basis, allowed, rule, tol, max_iter, it):
    degenerate = 0
    while it < max_iter:
        # Dantzig pricing falls back to Bland after a run of degenerate pivots
        use = rule if degenerate < 50 else "bland"
        s = _entering(T[-1, :-1], allowed, use, tol)
        if s is None:
            return "optimal", it
        r = _leaving(T, s, basis, tol)
        if r is None:
            return "unbounded", it
        degenerate = degenerate + 1 if T[r, -1] <= tol else 0
        _pivot(T, r, s)
        basis[r] = s
        it += 1
    return "iteration_limit", it


def _two_phase(A, b, cost, rule, tol, max_iter):
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n, n + m)
    allowed = np.ones(n + m, dtype=bool)

    status, it = _run(T, basis, allowed, rule, tol, max_iter, 0)
    if status == "iteration_limit":
        return status, it, T, basis
    if -T[-1, -1] > tol * max(1.0, b.sum()) * 10:
        return "infeasible", it, T, basis

    # drive remaining artificial variables out of the basis
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = nz[0]

    allowed[n:] = False
    full_cost = np.concatenate([cost, np.zeros(m)])
    T[-1, :-1] = full_cost
    T[-1, -1] = 0.0
    for r in range(m):
        T[-1] -= full_cost[basis[r]] * T[r]
    status, it = _run(T, basis, allowed, rule, tol, max_iter, it)
    return status, it, T, basis


def _from_basis(A, b, cost, basis):
    """Primal point and multipliers recomputed from the original data."""
    m, n = A.shape
    full = np.hstack([A, np.eye(m)])
    B = full[:, basis]
    cb = np.concatenate([cost, np.zeros(m)])[basis]
    xb = np.linalg.solve(B, b)
    y = np.linalg.solve(B.T, cb)
    x = np.zeros(n + m)
    x[basis] = xb
    return x, y


def simplex(c, A, b, rule: str = "dantzig", tol: float = 1e-10,
            max_iter: int = 100_000, perturb: float = 1e-7) -> LPResult:
    """Solve a standard-form LP.

    ``rule`` is "bland" (lowest-index entering variable, anti-cycling) or
    "dantzig" (most negative reduced cost, with a Bland fallback on long
    degenerate runs).  ``duals`` are the simplex multipliers y with
    c - A^T y >= 0 at optimality and b.y equal to the optimum.

    Degenerate vertices are avoided by pivoting on a slightly perturbed
    right-hand side; the final basis is then re-solved against the true b.
    If that basis is not primal feasible the problem is solved again
    without perturbation.  ``perturb=0`` disables this.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.asarray(b, dtype=float).copy()
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    def result(status, x, y, it):
        y = y.copy()
        y[flip] *= -1
        fun = float(c @ x[:n]) if status == "optimal" else np.nan
        return LPResult(status, x[:n], fun, y, it)

    bp = b
    if perturb > 0:
        u = np.random.default_rng(0).uniform(0.5, 1.0, size=m)
        bp = b + perturb * max(1.0, float(b.max(initial=0.0))) * u
    status, it, T, basis = _two_phase(A, bp, c, rule, tol, max_iter)
    if status == "optimal":
        try:
            x, y = _from_basis(A, b, c, basis)
        except np.linalg.LinAlgError:
            x = None
        if x is not None and x.min() >= -1e-9 and np.all(x[n:] <= 1e-9):
            return result(status, np.maximum(x, 0.0), y, it)
    elif status in ("unbounded", "infeasible") and perturb == 0:
        return result(status, np.zeros(n + m), np.zeros(m), it)
    if perturb > 0 and status != "unbounded":
        status, it2, T, basis = _two_phase(A, b, c, "bland", tol, max_iter)
        it += it2
    if status != "optimal":
        return result(status, np.zeros(n + m), np.zeros(m), it)
    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    # reduced cost of artificial i is -y_i (its phase-two cost is zero)
    y = -T[-1, n:n + m]
    return result(status, x, y, it)
