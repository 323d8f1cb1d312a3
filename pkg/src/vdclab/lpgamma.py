"""gamma_S(N) from its definition, as a grid-discretised linear program.

Minimise a0 over even cosine polynomials with frequencies in S, T(0) = 1
and T >= 0 on a finite set of points.  Writing a0 = 1 - sum a_h, the grid
constraints become  sum_h a_h (1 - cos 2 pi h xi_j) <= 1, and the problem
is solved through its standard-form dual

    min sum_j mu_j   s.t.   sum_j mu_j (1 - cos 2 pi h xi_j) = 1,  mu >= 0,

whose simplex multipliers are the optimal a_h.  One extra column of ones
encodes a0 >= 0 (true of every non-negative T since a0 is its mean), which
keeps the problem bounded even on grids that alias the support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cosine import Certificate, CosinePoly, certify_min, grid_values
from .sequence import IntegerSet
from .simplex import simplex


class SolverBug(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LPInstance:
    support: tuple[int, ...]
    grid: np.ndarray  # points in (0, 1/2]
    cuts: int = 0

    def to_dict(self) -> dict:
        return {"support": list(self.support), "grid": self.grid.tolist(),
                "cuts": self.cuts}

    @classmethod
    def from_dict(cls, d) -> "LPInstance":
        return cls(tuple(d["support"]), np.asarray(d["grid"], dtype=float),
                   int(d.get("cuts", 0)))


@dataclass
class LPSolution:
    a0_opt: float
    poly: CosinePoly
    cert_slack: float
    certificate: Certificate | None
    iterations: int
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"a0_opt": self.a0_opt, "cert_slack": self.cert_slack,
                "iterations": self.iterations, "poly": self.poly.to_dict(),
                "history": self.history}


def _pow2_at_least(x: int) -> int:
    return 1 << max(1, math.ceil(math.log2(max(2, x))))


def make_instance(S, N: int | None = None, grid_mult: int = 8,
                  grid_size: int | None = None) -> LPInstance:
    """LP on support S cap [N] with the uniform grid {j/K : 0 < j <= K/2}."""
    if isinstance(S, IntegerSet):
        S = S.restrict(N).tolist() if N is not None else S.tolist()
    support = tuple(sorted(int(s) for s in S if N is None or s <= N))
    top = max(support) if support else 1
    K = grid_size or _pow2_at_least(grid_mult * top)
    grid = np.arange(1, K // 2 + 1) / K
    return LPInstance(support, grid)


def _matrix(instance: LPInstance) -> np.ndarray:
    h = np.asarray(instance.support, dtype=float)
    ph = np.outer(h, instance.grid)
    ph -= np.floor(ph)
    A = 1.0 - np.cos(2 * np.pi * ph)
    return np.hstack([A, np.ones((h.size, 1))])


def _certify(poly: CosinePoly, tol: float) -> tuple[float, Certificate]:
    K = _pow2_at_least(16 * max(1, poly.degree))
    cert = certify_min(poly.dense(), K, tol)
    return max(0.0, -cert.lower_bound), cert


def solve(instance: LPInstance, rule: str = "dantzig", cert_tol: float = 1e-12,
          certify: bool = True) -> LPSolution:
    if not instance.support:
        poly = CosinePoly(1.0, [], [], certified_lower=1.0)
        return LPSolution(1.0, poly, 0.0, None, 0)
    A = _matrix(instance)
    res = simplex(np.ones(A.shape[1]), A, np.ones(A.shape[0]), rule=rule)
    if res.status != "optimal":
        raise SolverBug(f"simplex returned {res.status} on a feasible bounded LP")
    a = res.duals
    a0 = 1.0 - math.fsum(a.tolist())
    freqs = np.asarray(instance.support)
    keep = a != 0
    poly = CosinePoly(a0, freqs[keep], a[keep])
    slack, cert = 0.0, None
    if certify:
        slack, cert = _certify(poly, cert_tol)
        poly = CosinePoly(poly.a0, poly.freqs, poly.coeffs,
                          certified_lower=cert.lower_bound)
    return LPSolution(a0, poly, slack, cert, res.iterations)


def is_feasible(instance: LPInstance, poly: CosinePoly, tol: float = 1e-9) -> bool:
    """Does ``poly`` satisfy the instance constraints (support, T(0)=1, grid)?"""
    if not set(poly.support) <= set(instance.support):
        return False
    if abs(poly.at_zero() - 1.0) > tol:
        return False
    return bool(np.all(poly(instance.grid) >= -tol))


def _local_minima(poly: CosinePoly, below: float, extra=()) -> np.ndarray:
    """Off-grid minimisers of poly with value below ``below``, polished by Newton.

    Dips between closely spaced cuts can be narrow, so the search grid is
    fine and any ``extra`` starting points (e.g. a certificate argmin) are
    added.
    """
    K = _pow2_at_least(256 * max(1, poly.degree))
    G = grid_values(poly.dense(), K)
    i = np.arange(1, G.size - 1)
    idx = i[(G[i] <= G[i - 1]) & (G[i] <= G[i + 1]) & (G[i] < below)]
    if G[-1] < below and G[-1] <= G[-2]:
        idx = np.append(idx, G.size - 1)
    xs = np.concatenate([idx / K, np.asarray(extra, dtype=float)])
    for _ in range(8):
        d1 = poly.derivative(xs, 1)
        d2 = poly.derivative(xs, 2)
        step = np.where(d2 > 0, d1 / np.where(d2 > 0, d2, 1.0), 0.0)
        step = np.clip(step, -1.0 / K, 1.0 / K)
        xs = np.clip(xs - step, 0.0, 0.5)
    return xs


def refine_grid(instance: LPInstance, poly: CosinePoly, tol: float = 1e-9,
                extra=()) -> LPInstance:
    """Add the off-grid local minima of ``poly`` below -tol as new grid points."""
    xs = _local_minima(poly, -tol, extra)
    if not xs.size:
        return instance
    vals = poly(xs)
    xs = xs[(vals < -tol) & (xs > 0)]
    new = np.setdiff1d(np.round(xs, 15), instance.grid)
    if not new.size:
        return instance
    grid = np.sort(np.concatenate([instance.grid, new]))
    return LPInstance(instance.support, grid, instance.cuts + new.size)


def solve_with_cuts(instance: LPInstance, tol: float = 1e-6, max_rounds: int = 20,
                    rule: str = "dantzig") -> LPSolution:
    """Cutting-plane loop: solve, certify, add violated minima, repeat."""
    history = []
    sol = solve(instance, rule)
    history.append({"round": 0, "a0": sol.a0_opt, "cert_slack": sol.cert_slack,
                    "grid": int(instance.grid.size)})
    rounds = 0
    while sol.cert_slack >= tol and rounds < max_rounds:
        extra = [sol.certificate.argmin_xi] if sol.certificate else []
        nxt = refine_grid(instance, sol.poly, tol=min(tol, 1e-9), extra=extra)
        if nxt is instance:
            break
        instance = nxt
        rounds += 1
        sol = solve(instance, rule)
        history.append({"round": rounds, "a0": sol.a0_opt,
                        "cert_slack": sol.cert_slack, "grid": int(instance.grid.size)})
    sol.history = history
    return sol


def gamma_lp(S, N: int, rule: str = "dantzig", cuts: bool = False) -> LPSolution:
    inst = make_instance(S, N)
    return solve_with_cuts(inst, rule=rule) if cuts else solve(inst, rule)
