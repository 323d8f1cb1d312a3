"""Catalog of growth functions h with growth rate c slightly above 1.

Four closed-form families are supported::

    pure      h(t) = t^c
    powlog    h(t) = t^c (log t)^A
    subexp    h(t) = t^c exp(A (log t)^B),   0 < B < 1
    iterlog   h(t) = t^c l_m(t),             l_m = log composed m times

Values and derivatives are vectorised over numpy arrays.  The inverse eta is
closed form for pure powers and a safeguarded Newton iteration in log space
otherwise.  Decisions that depend on the exact position of h(n) relative to an
integer go through :func:`compare_to_int`, which falls back to mpmath.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import numpy as np

KINDS = ("pure", "powlog", "subexp", "iterlog")

# c must lie here for the theorem-mode experiments
THEOREM_C_RANGE = (1.0, 1.2)

MP_DPS = 50
_EXACT_TIE = mpmath.mpf(10) ** (-(MP_DPS - 12))


class DomainError(ValueError):
    """Raised when a growth function is evaluated outside its valid range."""


class ThresholdError(RuntimeError):
    """Raised when no validity threshold exists below the scan horizon."""


def _tower(m: int) -> float:
    # l_m is defined for t > e^^(m-1): 0, 1, e, e^e, ...
    edge = 0.0
    for _ in range(m - 1):
        edge = math.exp(edge) if edge else 1.0
    return edge


@dataclass(frozen=True)
class GrowthFunction:
    kind: str
    c: float
    A: float = 0.0
    B: float = 0.5
    m: int = 1
    threshold: int | None = None
    base: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown growth function kind {self.kind!r}")
        if not self.c > 1.0:
            raise ValueError(f"growth rate must exceed 1, got c={self.c}")
        if self.kind == "subexp" and not 0.0 < self.B < 1.0:
            raise ValueError(f"subexp needs 0 < B < 1, got B={self.B}")
        if self.kind == "iterlog" and self.m < 1:
            raise ValueError(f"iterlog needs m >= 1, got m={self.m}")
        object.__setattr__(self, "base", _find_base(self))

    # -- description ---------------------------------------------------

    @property
    def params(self) -> dict:
        if self.kind == "powlog":
            return {"A": self.A}
        if self.kind == "subexp":
            return {"A": self.A, "B": self.B}
        if self.kind == "iterlog":
            return {"m": self.m}
        return {}

    def describe(self) -> str:
        c = f"t^{self.c:g}"
        if self.kind == "powlog":
            return f"{c}*log(t)^{self.A:g}"
        if self.kind == "subexp":
            return f"{c}*exp({self.A:g}*log(t)^{self.B:g})"
        if self.kind == "iterlog":
            return f"{c}*log^[{self.m}](t)"
        return c

    def to_dict(self) -> dict:
        return {"kind": self.kind, "c": self.c, **self.params,
                "threshold": self.threshold}

    @property
    def edge(self) -> float:
        """Open lower end of the natural domain of the closed form."""
        if self.kind in ("powlog", "subexp"):
            return 1.0
        if self.kind == "iterlog":
            return _tower(self.m)
        return 0.0

    # -- evaluation ----------------------------------------------------

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(~(t > self.edge)):
            raise DomainError(f"{self.describe()} is undefined for t <= {self.edge}")
        return t

    def _g(self, t):
        """Slowly varying factor g and its first two derivatives."""
        if self.kind == "pure":
            one = np.ones_like(t)
            return one, 0 * one, 0 * one
        if self.kind == "powlog":
            A, u = self.A, np.log(t)
            g = u ** A
            g1 = A * u ** (A - 1) / t
            g2 = A * ((A - 1) * u ** (A - 2) - u ** (A - 1)) / t ** 2
            return g, g1, g2
        if self.kind == "subexp":
            A, B, u = self.A, self.B, np.log(t)
            g = np.exp(A * u ** B)
            k = A * B * u ** (B - 1)
            g1 = g * k / t
            g2 = g * (k ** 2 + A * B * ((B - 1) * u ** (B - 2) - u ** (B - 1))) / t ** 2
            return g, g1, g2
        # iterlog: l_m' = 1/(l_0 ... l_{m-1}),  l_m'' = -l_m' * sum_k 1/(l_0 ... l_k)
        logs = [t]
        for _ in range(self.m):
            logs.append(np.log(logs[-1]))
        prods, p = [], np.ones_like(t)
        for k in range(self.m):
            p = p * logs[k]
            prods.append(p)
        g1 = 1.0 / prods[-1]
        g2 = -g1 * sum(1.0 / q for q in prods)
        return logs[-1], g1, g2

    def value(self, t):
        t = self._check(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            g, _, _ = self._g(t)
            return t ** self.c * g

    def derivative(self, t, order: int = 1):
        if order not in (1, 2):
            raise ValueError(f"unsupported derivative order {order}")
        t = self._check(t)
        c = self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            g, g1, g2 = self._g(t)
            p, p1 = t ** c, c * t ** (c - 1)
            if order == 1:
                return p1 * g + p * g1
            p2 = c * (c - 1) * t ** (c - 2)
            return p2 * g + 2 * p1 * g1 + p * g2

    def log_value(self, u):
        """log h(e^u), used by the Newton inverse."""
        t = np.exp(u)
        if self.kind == "pure":
            return self.c * u
        if self.kind == "powlog":
            return self.c * u + self.A * np.log(u)
        if self.kind == "subexp":
            return self.c * u + self.A * u ** self.B
        logs = [t]
        for _ in range(self.m):
            logs.append(np.log(logs[-1]))
        return self.c * u + np.log(logs[-1])

    def value_mp(self, t, dps: int = MP_DPS):
        """High-precision h(t); c, A, B are read as their shortest decimal repr."""
        with mpmath.workdps(dps):
            t = mpmath.mpf(t)
            c = mpmath.mpf(repr(self.c))
            p = mpmath.power(t, c)
            if self.kind == "pure":
                return +p
            if self.kind == "powlog":
                return p * mpmath.power(mpmath.log(t), mpmath.mpf(repr(self.A)))
            if self.kind == "subexp":
                A, B = mpmath.mpf(repr(self.A)), mpmath.mpf(repr(self.B))
                return p * mpmath.exp(A * mpmath.power(mpmath.log(t), B))
            x = t
            for _ in range(self.m):
                x = mpmath.log(x)
            return p * x

    # -- inverse -------------------------------------------------------

    def inverse(self, y):
        """eta(y): the unique t >= base with h(t) = y."""
        y = np.asarray(y, dtype=float)
        lo_val = float(self.value(self.base))
        if np.any(~(y >= lo_val)):
            raise DomainError(
                f"inverse of {self.describe()} needs y >= h({self.base}) = {lo_val}")
        if self.kind == "pure":
            return y ** (1.0 / self.c)
        return np.exp(_newton_log_inverse(self, np.log(y)))


def _newton_log_inverse(f: GrowthFunction, logy):
    """Solve log h(e^u) = logy for u by bracketed Newton steps."""
    scalar = np.ndim(logy) == 0
    logy = np.atleast_1d(np.asarray(logy, dtype=float))
    lo = np.full_like(logy, math.log(f.base))
    hi = np.maximum(logy / f.c, lo) + 1.0
    for _ in range(200):
        short = f.log_value(hi) < logy
        if not short.any():
            break
        hi = np.where(short, lo + 2.0 * (hi - lo), hi)
    u = np.clip(logy / f.c, lo, hi)
    for _ in range(100):
        resid = f.log_value(u) - logy
        lo = np.where(resid <= 0, u, lo)
        hi = np.where(resid >= 0, u, hi)
        t = np.exp(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = t * f.derivative(t, 1) / f.value(t)
            step = resid / slope
        nxt = u - step
        bad = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = np.abs(nxt - u) <= 1e-15 * np.maximum(1.0, np.abs(u))
        u = nxt
        if done.all():
            break
    return u[0] if scalar else u


def _find_base(f: GrowthFunction) -> int:
    """Smallest integer from which h is positive and increasing."""
    start = max(1, math.floor(f.edge) + 1)
    if f.kind == "pure":
        return 1
    t = np.arange(start, start + 20000, dtype=float)
    t = np.concatenate([t, np.geomspace(t[-1] + 1, 1e15, 4000)])
    with np.errstate(all="ignore"):
        ok = (f.value(t) > 0) & (f.derivative(t, 1) > 0)
    ok &= np.isfinite(f.value(t))
    if ok[-1] == False:  # noqa: E712
        raise DomainError(f"{f.describe()} is not eventually increasing")
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return start
    return int(math.floor(t[bad[-1]])) + 1


# -- module-level operations ------------------------------------------


def make_function(kind: str, c: float, **params) -> GrowthFunction:
    keep = {k: params[k] for k in ("A", "B", "m") if k in params}
    if "m" in keep:
        keep["m"] = int(keep["m"])
    return GrowthFunction(kind, float(c), **keep)


def evaluate(f: GrowthFunction, t):
    return f.value(t)


def derivative(f: GrowthFunction, order: int, t):
    return f.derivative(t, order)


def inverse(f: GrowthFunction, y):
    return f.inverse(y)


def _rational_exponent(c: float) -> Fraction:
    return Fraction(repr(c))


def compare_to_int(f: GrowthFunction, t: int, k: int) -> int:
    """Exact sign of h(t) - k for integer t, k.

    Uses 50-digit arithmetic; a difference below 1e-38 is treated as an
    exact tie, settled by integer powers for pure powers with decimal c.
    """
    t, k = int(t), int(k)
    with mpmath.workdps(MP_DPS):
        diff = f.value_mp(t) - k
        if abs(diff) > _EXACT_TIE:
            return 1 if diff > 0 else -1
    if f.kind != "pure":
        return 0
    if k <= 0:
        return 1
    q = _rational_exponent(f.c)
    lhs, rhs = t ** q.numerator, k ** q.denominator
    return (lhs > rhs) - (lhs < rhs)


def detect_threshold(f: GrowthFunction, horizon: int = 10**6,
                     spacing: float = 0.5) -> int:
    """Smallest T <= horizon from which the scan up to ``horizon`` finds
    h > 0, h' > 1, h increasing, and eta(n+1) - eta(n) < spacing for
    every integer n in [h(T), horizon]."""
    horizon = int(horizon)
    if horizon < 10:
        raise ValueError("horizon must be at least 10")
    t = np.arange(f.base, horizon + 1, dtype=float)
    if t.size == 0:
        raise ThresholdError(f"no integer in [{f.base}, {horizon}]")
    h = f.value(t)
    ok = (h > 0) & (f.derivative(t, 1) > 1)
    ok[1:] &= np.diff(h) > 0
    bad = np.flatnonzero(~ok)
    T = int(t[bad[-1]]) + 1 if bad.size else int(t[0])
    if T > horizon:
        raise ThresholdError(
            f"{f.describe()}: h' > 1 fails up to the horizon {horizon}")
    n0 = max(1, math.ceil(float(f.value(f.base))))
    if n0 < horizon:
        n = np.arange(n0, horizon + 1, dtype=float)
        eta = f.inverse(np.append(n, horizon + 1.0))
        wide = np.flatnonzero(np.diff(eta) >= spacing)
        if wide.size:
            n_bad = int(n[wide[-1]])
            T = max(T, math.floor(float(f.inverse(n_bad))) + 1)
    if T > horizon:
        raise ThresholdError(
            f"{f.describe()}: eta spacing < {spacing} fails below the horizon {horizon}")
    return T


def with_threshold(f: GrowthFunction, horizon: int = 10**6) -> GrowthFunction:
    return replace(f, threshold=detect_threshold(f, horizon))


def in_theorem_range(c: float) -> bool:
    return THEOREM_C_RANGE[0] < c < THEOREM_C_RANGE[1]
