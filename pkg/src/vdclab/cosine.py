"""Even trigonometric polynomials a0 + sum a_h cos(2 pi h xi) and a
grid-based certificate for their global minimum.

The certificate works on cells of a uniform grid on [0, 1/2] (the
polynomials are even).  Values and slopes at the grid points come from two
real FFTs.  On a cell of width w the polynomial differs from the cubic
Hermite interpolant of its endpoint data by at most M4 w^4 / 384, where M4
bounds the fourth derivative, so the interpolant's minimum less that amount
is a lower bound for the cell.  Cells whose bound falls below the running
minimum by more than the tolerance are split and re-evaluated at dyadic
points until the bound closes or the depth cap is reached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

_CHUNK = 1 << 23


@dataclass(frozen=True)
class Certificate:
    measured_min: float
    argmin_xi: float
    lower_bound: float
    grid_min: float
    grid_size: int
    depth: int
    evaluations: int

    @property
    def slack(self) -> float:
        """Certified gap between measured and true minimum."""
        return max(0.0, self.measured_min - self.lower_bound)


@dataclass(frozen=True, eq=False)
class CosinePoly:
    a0: float
    freqs: np.ndarray
    coeffs: np.ndarray
    certified_lower: float | None = None

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=np.int64)
        a = np.asarray(self.coeffs, dtype=float)
        if f.shape != a.shape:
            raise ValueError("freqs and coeffs must have equal length")
        if f.size and (f.min() < 1 or np.any(np.diff(f) <= 0)):
            raise ValueError("frequencies must be positive and strictly increasing")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def from_dense(cls, w) -> "CosinePoly":
        w = np.asarray(w, dtype=float)
        idx = np.flatnonzero(w[1:]) + 1
        return cls(float(w[0]), idx, w[idx])

    @property
    def degree(self) -> int:
        return int(self.freqs[-1]) if self.freqs.size else 0

    @property
    def support(self) -> list[int]:
        return [int(h) for h in self.freqs]

    def dense(self) -> np.ndarray:
        w = np.zeros(self.degree + 1)
        w[0] = self.a0
        w[self.freqs] += self.coeffs
        return w

    def at_zero(self) -> float:
        return math.fsum([self.a0, *self.coeffs.tolist()])

    def __call__(self, xi):
        return evaluate(self.dense(), xi)

    def derivative(self, xi, order: int = 1):
        return evaluate_derivative(self.dense(), xi, order)

    def certify(self, grid_size: int, tol: float = 1e-12, **kw):
        cert = certify_min(self.dense(), grid_size, tol, **kw)
        return replace(self, certified_lower=cert.lower_bound), cert

    def to_dict(self) -> dict:
        return {"a0": self.a0, "freqs": self.support,
                "coeffs": [float(x) for x in self.coeffs],
                "certified_lower": self.certified_lower}


def evaluate(w, xi):
    """sum_n w[n] cos(2 pi n xi) at arbitrary real xi (arguments reduced mod 1)."""
    w = np.asarray(w, dtype=float)
    xi = np.asarray(xi, dtype=float)
    flat = np.atleast_1d(xi).ravel()
    n = np.flatnonzero(w)
    out = np.empty(flat.size)
    step = max(1, _CHUNK // max(1, n.size))
    for s in range(0, flat.size, step):
        ph = np.outer(flat[s:s + step], n)
        ph -= np.floor(ph)
        out[s:s + step] = np.cos(2 * np.pi * ph) @ w[n]
    return out.reshape(xi.shape) if xi.ndim else float(out[0])


def evaluate_derivative(w, xi, order: int = 1):
    w = np.asarray(w, dtype=float)
    n = np.arange(w.size, dtype=float)
    scale = (2 * np.pi * n) ** order
    xi = np.asarray(xi, dtype=float)
    flat = np.atleast_1d(xi).ravel()
    ph = np.outer(flat, n)
    ph -= np.floor(ph)
    trig = [np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin][order % 4]
    out = trig(2 * np.pi * ph) @ (w * scale)
    return out.reshape(xi.shape) if xi.ndim else float(out[0])


def grid_values(w, K: int, derivative: bool = False):
    """Values at j/K for j = 0..K//2 by one real FFT (frequencies folded mod K).

    With ``derivative=True`` also return the first derivative on the grid.
    """
    w = np.asarray(w, dtype=float)
    if K < 2 or K % 2:
        raise ValueError("grid size must be even and at least 2")
    n = np.arange(w.size)
    folded = np.bincount(n % K, weights=w, minlength=K)
    G = np.fft.rfft(folded).real
    if not derivative:
        return G
    folded = np.bincount(n % K, weights=w * n, minlength=K)
    return G, 2 * np.pi * np.fft.rfft(folded).imag


def dyadic_values(w, p, Q: int, derivative: bool = False):
    """Values (and optionally derivatives) at p/Q by direct summation.

    The phase p*n mod Q is formed in exact integer arithmetic (wrap-around
    uint64 products when Q is a power of two) before scaling by 2 pi.
    """
    w = np.asarray(w, dtype=float)
    n = np.flatnonzero(w)
    wn = w[n]
    dn = -2 * np.pi * n * wn
    p = np.atleast_1d(np.asarray(p, dtype=np.int64))
    out = np.empty(p.size)
    dout = np.empty(p.size)
    pow2 = Q & (Q - 1) == 0
    step = max(1, _CHUNK // max(1, n.size))
    for s in range(0, p.size, step):
        ps = p[s:s + step]
        if pow2:
            r = np.multiply.outer(ps.astype(np.uint64), n.astype(np.uint64)) & np.uint64(Q - 1)
        else:
            r = np.mod(np.multiply.outer(ps.astype(object), n.astype(object)), Q)
        ang = (2 * np.pi / Q) * r.astype(float)
        out[s:s + step] = np.cos(ang) @ wn
        if derivative:
            dout[s:s + step] = np.sin(ang) @ dn
    return (out, dout) if derivative else out


def moment(w, k: int) -> float:
    """(2 pi)^k sum n^k |w_n|, a bound on the k-th derivative."""
    w = np.asarray(w, dtype=float)
    n = np.arange(w.size, dtype=float)
    return float((2 * np.pi) ** k * np.sum(n ** k * np.abs(w)))


def second_derivative_bound(w) -> float:
    return moment(w, 2)


def lipschitz_slack(w, K: int) -> float:
    """First-order grid slack: half-spacing times the bound on |G'|."""
    return moment(w, 1) / (2.0 * K)


def _hermite_min(fa, fb, da, db, h):
    """Minimum over [0, 1] of the cubic Hermite interpolant on a cell of width h."""
    c1 = h * da
    c2 = 3 * (fb - fa) - h * (2 * da + db)
    c3 = 2 * (fa - fb) + h * (da + db)
    best = np.minimum(fa, fb)
    # roots of c1 + 2 c2 s + 3 c3 s^2
    a, b, c = 3 * c3, 2 * c2, c1
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - 4 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        quad = np.abs(a) > 1e-14 * (np.abs(b) + np.abs(c) + 1e-300)
        q = -0.5 * (b + np.copysign(sq, b))
        r1 = np.where(quad, q / a, -c / b)
        r2 = np.where(quad, c / q, np.nan)
    for r in (r1, r2):
        ok = np.isfinite(r) & (r > 0) & (r < 1) & (disc >= 0)
        rr = np.where(ok, r, 0.0)
        val = ((c3 * rr + c2) * rr + c1) * rr + fa
        best = np.where(ok, np.minimum(best, val), best)
    return best


def certify_min(w, grid_size: int, tol: float = 1e-12, refine: int = 8,
                max_depth: int = 8, max_open: int = 200_000) -> Certificate:
    """Measured minimum over the grid plus refinements, and a lower bound
    on the true minimum over the whole circle.

    Each cell is bounded below by the minimum of the cubic Hermite
    interpolant of its endpoint values and slopes, less M4 w^4 / 384 where
    M4 bounds the fourth derivative.
    """
    w = np.asarray(w, dtype=float)
    K = int(grid_size)
    G, dG = grid_values(w, K, derivative=True)
    M4 = moment(w, 4)
    j = int(np.argmin(G))
    best, best_xi = float(G[j]), j / K
    grid_min = best
    evals = G.size

    fa, fb, da, db = G[:-1], G[1:], dG[:-1], dG[1:]
    lb = _hermite_min(fa, fb, da, db, 1.0 / K) - M4 / (384.0 * K ** 4)
    cells = np.arange(fa.size, dtype=np.int64)
    Q, depth = K, 0
    closed_lb = math.inf
    while True:
        is_open = lb < best - tol
        if (~is_open).any():
            closed_lb = min(closed_lb, float(lb[~is_open].min()))
        cells, lb = cells[is_open], lb[is_open]
        fa, fb, da, db = fa[is_open], fb[is_open], da[is_open], db[is_open]
        if (not cells.size or depth >= max_depth or cells.size > max_open
                or Q * refine > 2**53):
            break
        depth += 1
        Q *= refine
        pts = (cells[:, None] * refine + np.arange(1, refine)).ravel()
        v, dv = dyadic_values(w, pts, Q, derivative=True)
        v = v.reshape(cells.size, refine - 1)
        dv = dv.reshape(cells.size, refine - 1)
        evals += v.size
        k = np.unravel_index(np.argmin(v), v.shape)
        if v[k] < best:
            best = float(v[k])
            best_xi = float(pts[k[0] * (refine - 1) + k[1]]) / Q
        fv = np.hstack([fa[:, None], v, fb[:, None]])
        dfv = np.hstack([da[:, None], dv, db[:, None]])
        fa, fb = fv[:, :-1].ravel(), fv[:, 1:].ravel()
        da, db = dfv[:, :-1].ravel(), dfv[:, 1:].ravel()
        cells = (cells[:, None] * refine + np.arange(refine)).ravel()
        lb = _hermite_min(fa, fb, da, db, 1.0 / Q) - M4 / (384.0 * Q ** 4)
    if cells.size:
        closed_lb = min(closed_lb, float(lb.min()))
    lower = min(closed_lb, best)
    return Certificate(best, best_xi, lower, grid_min, K, depth, evals)
