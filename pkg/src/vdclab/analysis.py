"""Numerical checks of the analytic chain behind the witness construction.

Each check evaluates both sides of an inequality or identity at finite
scale and returns a small record with the measured margin.  The implied
constants of the asymptotic statements are frozen here (``C_DECOMP``,
``C_MAIN``, ``C_VDC``, ``C_EXPSUM``) and can be overridden per call.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable

import numpy as np

from .cosine import CosinePoly, grid_values
from .growth import DomainError, GrowthFunction
from .kernels import fejer_t, fejer_z
from .sequence import IntegerSet, guarded_ceil_inverse, identity_start

C_DECOMP = 8.0
C_MAIN = 4.0
C_VDC = 10.0
C_EXPSUM = 10.0
REL_TOL = 1e-9


class BridgeViolation(AssertionError):
    pass


def default_m(N: int, c: float) -> int:
    """Default truncation level round(N^(1/(5c))), at least 1."""
    return max(1, round(N ** (1.0 / (5.0 * c))))


def torus_norm(x):
    """Distance to the nearest integer."""
    x = np.asarray(x, dtype=float)
    fr = x - np.floor(x)
    return np.minimum(fr, 1.0 - fr)


def sawtooth(x):
    """{x} - 1/2, in [-1/2, 1/2)."""
    x = np.asarray(x, dtype=float)
    out = x - np.floor(x) - 0.5
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# generalised Van der Corput inequality

@dataclass(frozen=True)
class GvdcResult:
    lhs: float
    rhs: float
    slack: float
    holds: bool


def autocorrelations(y, H: int) -> np.ndarray:
    """|sum_{n<=N-h} y_{n+h} conj(y_n)| for h = 0..H."""
    y = np.asarray(y, dtype=complex)
    N = y.size
    L = 1 << max(1, math.ceil(math.log2(2 * N + 1)))
    Y = np.fft.fft(y, L)
    r = np.fft.ifft(np.abs(Y) ** 2)
    out = np.zeros(H + 1)
    k = min(H, N - 1)
    out[:k + 1] = np.abs(r[:k + 1])
    return out


def check_gvdc_inequality(y, T: CosinePoly) -> GvdcResult:
    """Both sides of |sum y|^2 <= (N+H)(a0 sum|y|^2 + sum_h |a_h| |sum y_{n+h} conj y_n|)."""
    if T.certified_lower is None:
        raise ValueError("T must carry a non-negativity certificate")
    if T.certified_lower < -REL_TOL:
        raise ValueError(f"T is not certified non-negative (lower bound {T.certified_lower:.3e})")
    if abs(T.at_zero() - 1.0) > REL_TOL:
        raise ValueError("T(0) must equal 1")
    y = np.asarray(y, dtype=complex)
    N, H = y.size, T.degree
    s = y.sum()
    lhs = float((s * s.conjugate()).real)
    ac = autocorrelations(y, H)
    energy = math.fsum((np.abs(y) ** 2).tolist())
    cross = math.fsum((np.abs(T.coeffs) * ac[T.freqs]).tolist())
    rhs = (N + H) * (T.a0 * energy + cross)
    slack = rhs - lhs
    return GvdcResult(lhs, rhs, slack, slack >= -REL_TOL * max(rhs, 1.0))


def fejer_polynomial(H: int) -> CosinePoly:
    """F_{H+1}/(H+1) in cosine form: the classical Van der Corput choice."""
    h = np.arange(1, H + 1)
    a = 2.0 / (H + 1) * (1.0 - h / (H + 1))
    return CosinePoly(1.0 / (H + 1), h, a, certified_lower=0.0)


def autocorrelation_polynomial(b) -> CosinePoly:
    """|sum b_k e(k xi)|^2 / (sum b_k)^2, non-negative by construction."""
    b = np.asarray(b, dtype=float)
    s = b.sum()
    if s == 0:
        raise ValueError("sum of b must be non-zero")
    r = np.correlate(b, b, mode="full")[b.size - 1:] / (s * s)
    h = np.arange(1, b.size)
    a0 = float(r[0])
    return CosinePoly(a0, h, 2.0 * r[1:], certified_lower=0.0)


# ---------------------------------------------------------------------------
# decomposition of the witness transform

@dataclass(frozen=True)
class DecompositionReport:
    N: int
    M: int
    xi: float
    lhs: float
    main: float
    i1: float
    residual: float
    budget: float

    @property
    def ok(self) -> bool:
        return abs(self.residual) <= self.budget

    def to_dict(self) -> dict:
        return asdict(self)


def _eta_values(f: GrowthFunction, N: int) -> np.ndarray:
    """eta(n) for n = 1..N+1."""
    start = identity_start(f)
    if start is None or start > 1:
        raise DomainError(
            f"the floor identity for {f.describe()} is only trusted from n = {start}; "
            "the decomposition needs it on all of [1, N]")
    return np.asarray(f.inverse(np.arange(1, N + 2, dtype=float)), dtype=float)


def shifted_sawtooth(eta: np.ndarray, ceil_eta: np.ndarray) -> np.ndarray:
    """x - ceil(x) + 1/2, which is {x} - 1/2 except at integers where it is 1/2."""
    return eta - ceil_eta + 0.5


def exact_splitting(f: GrowthFunction, N: int):
    """(indicator, eta difference, sawtooth difference) on n = 1..N.

    1_S(n) = (eta(n+1) - eta(n)) - (s(eta(n+1)) - s(eta(n))) with
    s(x) = x - ceil(x) + 1/2, which is the sawtooth away from integers.
    """
    eta = _eta_values(f, N)
    ce = guarded_ceil_inverse(f, np.arange(1, N + 2)).astype(float)
    ind = np.diff(ce)
    saw = shifted_sawtooth(eta, ce)
    return ind, np.diff(eta), np.diff(saw)


def _sawtooth_series(x: np.ndarray, M: int, chunk: int = 1 << 22) -> np.ndarray:
    """sum_{m=1}^M sin(2 pi m x) / (pi m), the negated truncated sawtooth."""
    fr = x - np.floor(x)
    out = np.zeros(fr.size)
    m = np.arange(1, M + 1, dtype=float)
    step = max(1, chunk // M)
    for s in range(0, fr.size, step):
        ph = np.outer(fr[s:s + step], m)
        ph -= np.floor(ph)
        out[s:s + step] = np.sin(2 * np.pi * ph) @ (1.0 / (np.pi * m))
    return out


class Decomposer:
    """Precomputes the xi-independent weights of the decomposition at (f, N, M)."""

    def __init__(self, f: GrowthFunction, N: int, M: int, C: float = C_DECOMP):
        if M < 1:
            raise ValueError("M must be at least 1")
        self.f, self.N, self.M, self.C = f, int(N), int(M), float(C)
        eta = _eta_values(f, self.N)
        ce = guarded_ceil_inverse(f, np.arange(1, self.N + 2)).astype(float)
        n = np.arange(1, self.N + 1)
        F = fejer_z(self.N, n)
        series = _sawtooth_series(eta, self.M)
        self.w_lhs = F * np.diff(ce)
        self.w_main = F * np.diff(eta)
        self.w_i1 = F * np.diff(series)
        self.n = n
        nu = torus_norm(eta)
        with np.errstate(divide="ignore"):
            mins = np.minimum(1.0, 1.0 / (self.M * nu))
        self.budget_terms = math.fsum(mins[:-1].tolist()) / self.N + \
            math.fsum(mins[1:].tolist()) / self.N

    def _avg(self, w, xi) -> float:
        ph = np.outer(np.atleast_1d(xi), self.n)
        ph -= np.floor(ph)
        return np.cos(2 * np.pi * ph) @ w / self.N

    def __call__(self, xi) -> list[DecompositionReport]:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        lhs = self._avg(self.w_lhs, xi)
        main = self._avg(self.w_main, xi)
        i1 = self._avg(self.w_i1, xi)
        budget = self.C * self.budget_terms
        return [DecompositionReport(self.N, self.M, float(x), float(a), float(b),
                                    float(c), float(a - b - c), budget)
                for x, a, b, c in zip(xi, lhs, main, i1)]


def decompose(f: GrowthFunction, N: int, M: int, xi: float,
              C: float = C_DECOMP) -> DecompositionReport:
    return Decomposer(f, N, M, C)(xi)[0]


def main_term_weights(f: GrowthFunction, N: int) -> np.ndarray:
    """Dense cosine coefficients of E F_N(n) cos(2 pi xi n)(eta(n+1) - eta(n))."""
    eta = _eta_values(f, N)
    w = np.zeros(N + 1)
    w[1:] = fejer_z(N, np.arange(1, N + 1)) * np.diff(eta) / N
    return w


def main_term_min(f: GrowthFunction, N: int, grid_size: int) -> float:
    if grid_size < 8 * N:
        raise ValueError(f"grid_size {grid_size} below 8N = {8 * N}")
    return float(grid_values(main_term_weights(f, N), grid_size).min())


def fejer_average(N: int, xi):
    """E_{n in [N]} F_N(n) cos(2 pi xi n) in closed form, (F_N^T(xi) - 1) / (2N)."""
    return (fejer_t(N, xi) - 1.0) / (2.0 * N)


# ---------------------------------------------------------------------------
# exponential sums

def _phases(f: GrowthFunction, m: int, n: np.ndarray) -> np.ndarray:
    eta = np.asarray(f.inverse(n.astype(float)), dtype=float)
    fr = eta - np.floor(eta)
    ph = m * fr
    return ph - np.floor(ph)


def _fsum_e(ph: np.ndarray) -> complex:
    ang = 2 * np.pi * ph
    return complex(math.fsum(np.cos(ang).tolist()), math.fsum(np.sin(ang).tolist()))


def dyadic_blocks(lo: int, hi: int) -> list[tuple[int, int, int]]:
    """(j, a, b) with [a, b] = [2^j, 2^(j+1)) cap [lo, hi], non-empty only."""
    out = []
    j = 0
    while (1 << j) <= hi:
        a, b = max(lo, 1 << j), min(hi, (1 << (j + 1)) - 1)
        if a <= b:
            out.append((j, a, b))
        j += 1
    return out


def expsum(f: GrowthFunction, m: int, lo: int, hi: int) -> complex:
    """sum_{lo <= n <= hi} e(m eta(n)) by compensated direct summation."""
    if m == 0:
        raise ValueError("m must be non-zero")
    n = np.arange(int(lo), int(hi) + 1)
    return _fsum_e(_phases(f, m, n))


def expsum_dyadic(f: GrowthFunction, m: int, lo: int, hi: int) -> complex:
    """The same sum assembled block by block over dyadic ranges."""
    total = 0j
    for _, a, b in dyadic_blocks(int(lo), int(hi)):
        total += expsum(f, m, a, b)
    return total


def expsum_bound(f: GrowthFunction, m: int, lo: int, hi: int,
                 C: float = C_EXPSUM) -> float:
    """C |m|^(1/2) sum over dyadic blocks of (2^(j+1))^(1 - 1/(2c))."""
    e = 1.0 - 1.0 / (2.0 * f.c)
    return C * math.sqrt(abs(m)) * sum(2.0 ** ((j + 1) * e)
                                       for j, _, _ in dyadic_blocks(int(lo), int(hi)))


@dataclass(frozen=True)
class ExpsumCheck:
    m: int
    lo: int
    hi: int
    direct: complex
    dyadic: complex
    bound: float
    agree: bool
    within_bound: bool


def check_expsum(f: GrowthFunction, m: int, lo: int, hi: int,
                 C: float = C_EXPSUM) -> ExpsumCheck:
    d = expsum(f, m, lo, hi)
    b = expsum_dyadic(f, m, lo, hi)
    bound = expsum_bound(f, m, lo, hi, C)
    agree = abs(d - b) <= 1e-8 * (hi - lo + 1)
    return ExpsumCheck(m, lo, hi, d, b, bound, agree, abs(d) <= bound)


# ---------------------------------------------------------------------------
# second-derivative test

@dataclass(frozen=True)
class SecondDerivativeCheck:
    status: str  # pass | fail | premise
    lhs: float
    bound: float
    margin: float
    detail: str = ""


def check_second_derivative_test(phase: Callable, phase2: Callable, interval,
                                 lam: float, alpha: float, C: float = C_VDC,
                                 samples: int = 1024) -> SecondDerivativeCheck:
    """|sum_{n in I} e(phase(n))| <= C (alpha |I| lam^(1/2) + lam^(-1/2)).

    ``phase`` maps an integer array to phases reduced mod 1 (or raw reals);
    ``phase2`` is its second derivative.  The premise
    lam <= |phase''| <= alpha lam is sampled on the interval first.
    """
    a, b = int(interval[0]), int(interval[1])
    if not lam > 0:
        return SecondDerivativeCheck("premise", math.nan, math.nan, math.nan,
                                     "lambda must be positive")
    t = np.unique(np.concatenate([np.linspace(a, b, samples), [a, b]]))
    d2 = np.abs(np.asarray(phase2(t), dtype=float))
    rtol = 1e-9
    if d2.min() < lam * (1 - rtol) or d2.max() > alpha * lam * (1 + rtol):
        return SecondDerivativeCheck(
            "premise", math.nan, math.nan, math.nan,
            f"|f''| in [{d2.min():.3e}, {d2.max():.3e}] vs [{lam:.3e}, {alpha * lam:.3e}]")
    n = np.arange(a, b + 1)
    ph = np.asarray(phase(n), dtype=float)
    lhs = abs(_fsum_e(ph - np.floor(ph)))
    length = b - a + 1
    bound = C * (alpha * length * math.sqrt(lam) + 1.0 / math.sqrt(lam))
    return SecondDerivativeCheck("pass" if lhs <= bound else "fail", lhs, bound,
                                 bound - lhs)


def eta_second_derivative(f: GrowthFunction, t):
    """eta''(t) = -h''(eta) / h'(eta)^3."""
    u = np.asarray(f.inverse(np.asarray(t, dtype=float)), dtype=float)
    d1 = np.asarray(f.derivative(u, 1), dtype=float)
    d2 = np.asarray(f.derivative(u, 2), dtype=float)
    return -d2 / d1 ** 3


def eta_block_check(f: GrowthFunction, m: int, j: int,
                    C: float = C_VDC) -> SecondDerivativeCheck:
    """Second-derivative test for m * eta on the block [2^j, 2^(j+1))."""
    a, b = 1 << j, (1 << (j + 1)) - 1
    e_hi = float(eta_second_derivative(f, float(1 << (j + 1))))
    e_lo = float(eta_second_derivative(f, float(a)))
    lam = abs(m * e_hi)
    alpha = abs(e_lo / e_hi)
    return check_second_derivative_test(
        lambda n: _phases(f, m, np.asarray(n)),
        lambda t: m * eta_second_derivative(f, t),
        (a, b), lam, alpha, C)


def quadratic_check(Q: int, C: float = C_VDC) -> SecondDerivativeCheck:
    """Phase t^2 / (2Q) on [1, Q] with lambda = 1/Q, alpha = 1."""
    def phase(n):
        n = np.asarray(n, dtype=np.int64)
        r = (n * n) % (2 * Q)  # exact reduction of n^2 mod 2Q
        return r / (2.0 * Q)
    return check_second_derivative_test(phase, lambda t: np.full(np.shape(t), 1.0 / Q),
                                        (1, Q), 1.0 / Q, 1.0, C)


# ---------------------------------------------------------------------------
# bridges between the extremal problem and the witness constant

def check_delta_leq_2gamma(extremal, T: CosinePoly, slack: float = 0.0,
                           tol: float = 1e-9) -> float:
    """Margin of |A|/N <= 2 (a0 + slack); raises ``BridgeViolation`` when negative.

    ``slack`` is the certified amount by which T may dip below zero: the
    shifted polynomial (T + slack)/(1 + slack) is non-negative and has
    constant term at most a0 + slack.
    """
    if getattr(extremal, "status", "exact") != "exact":
        raise ValueError("the extremal result must be exact")
    if T.certified_lower is None:
        raise ValueError("T must carry a non-negativity certificate")
    if T.degree > extremal.N:
        raise ValueError("T must be supported on [1, N]")
    lhs = extremal.best_size / extremal.N
    rhs = 2.0 * (T.a0 + slack)
    margin = rhs + tol - lhs
    if margin < 0:
        raise BridgeViolation(
            f"|A|/N = {lhs:.12g} exceeds 2 (a0 + slack) = {rhs:.12g} at N = {extremal.N}"
            f" ({extremal.set_id})")
    return margin


def check_large(f: GrowthFunction | IntegerSet, N: int, delta2: float,
                factor: float = 4.0) -> float:
    """Margin of delta2 >= eta(N/2) / (factor N)."""
    return delta2 - float(f.inverse(N / 2.0)) / (factor * N)


# ---------------------------------------------------------------------------

def to_csv(rows, columns=None) -> str:
    """Rows of dataclasses or dicts as CSV with a fixed column order."""
    rows = [asdict(r) if hasattr(r, "__dataclass_fields__") else dict(r) for r in rows]
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


DECOMPOSITION_COLUMNS = [f.name for f in fields(DecompositionReport)]
