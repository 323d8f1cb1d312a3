"""Fejer-weighted indicator of S_h and the witness cosine polynomial.

With Psi_N(n) = (1 - n/N) 1_S(n), delta2 = E Psi_N and delta1 the depth of
the most negative value of xi -> E Psi_N(n) cos(2 pi xi n), the polynomial

    T(xi) = (delta1 + E Psi_N(n) cos(2 pi n xi)) / (delta1 + delta2)

is non-negative, has T(0) = 1, is supported on S, and has constant term
delta1 / (delta1 + delta2).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .cosine import Certificate, CosinePoly, certify_min, grid_values
from .growth import GrowthFunction
from .kernels import fejer_z
from .sequence import IntegerSet, generate

DEFAULT_GRID_MULT = 16
DEFAULT_CERT_TOL = 1e-11


class GridTooCoarse(RuntimeError):
    pass


class DegenerateWitness(ValueError):
    pass


Weight = Callable[[int, np.ndarray], np.ndarray]


def fejer_weight(N: int, n: np.ndarray) -> np.ndarray:
    return fejer_z(N, n)


@dataclass(frozen=True)
class WitnessReport:
    function: str
    c: float
    N: int
    delta1: float
    delta2: float
    gamma_hat: float
    argmin_xi: float
    cert_slack: float
    grid_size: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def grid_size_for(N: int, grid_mult: int = DEFAULT_GRID_MULT) -> int:
    """Power of two at least grid_mult * N."""
    return 1 << max(1, math.ceil(math.log2(max(2, grid_mult * N))))


def build_psi(f: GrowthFunction | IntegerSet, N: int,
              weight: Weight = fejer_weight) -> np.ndarray:
    """Psi_N on 0..N (index 0 unused, always 0)."""
    S = f.restrict(N) if isinstance(f, IntegerSet) else generate(f, N)
    n = np.arange(N + 1)
    psi = weight(N, n) * S.indicator(N)
    psi[0] = 0.0
    return psi


def mean_psi(psi) -> float:
    """delta2 = (1/N) sum Psi_N(n), summed exactly."""
    N = len(psi) - 1
    return math.fsum(np.asarray(psi, dtype=float)[1:].tolist()) / N


def cosine_transform(psi, xi):
    """Direct E_{n in [N]} Psi_N(n) cos(2 pi xi n)."""
    from .cosine import evaluate

    N = len(psi) - 1
    return evaluate(np.asarray(psi, dtype=float) / N, xi)


def cosine_transform_grid(psi, grid_size: int) -> np.ndarray:
    N = len(psi) - 1
    return grid_values(np.asarray(psi, dtype=float) / N, grid_size)


def min_cosine_transform(psi, grid_size: int, tol: float = DEFAULT_CERT_TOL,
                         max_slack: float | None = None):
    """Return (delta1, argmin_xi, cert_slack, certificate).

    delta1 = max(0, -min) where the minimum is taken over the grid
    {j / grid_size} and the refinement points added by the certificate;
    the true minimum over the circle is at least -delta1 - cert_slack.
    """
    N = len(psi) - 1
    if grid_size < 8 * N:
        raise ValueError(f"grid_size {grid_size} below 8N = {8 * N}")
    cert = certify_min(np.asarray(psi, dtype=float) / N, grid_size, tol)
    if max_slack is not None and cert.slack > max_slack:
        raise GridTooCoarse(
            f"certification slack {cert.slack:.3e} exceeds {max_slack:.3e}")
    return max(0.0, -cert.measured_min), cert.argmin_xi, cert.slack, cert


def assemble_witness(delta1: float, delta2: float, psi) -> CosinePoly:
    denom = delta1 + delta2
    if not denom > 0:
        raise DegenerateWitness("delta1 + delta2 must be positive")
    N = len(psi) - 1
    psi = np.asarray(psi, dtype=float)
    h = np.flatnonzero(psi)
    return CosinePoly(delta1 / denom, h, psi[h] / (N * denom))


def witness(f: GrowthFunction, N: int, grid_mult: int = DEFAULT_GRID_MULT,
            tol: float = DEFAULT_CERT_TOL, weight: Weight = fejer_weight):
    """Full pipeline at one scale: (report, polynomial or None, certificate)."""
    psi = build_psi(f, N, weight)
    delta2 = mean_psi(psi)
    K = grid_size_for(N, grid_mult)
    name = f.describe()
    if delta2 <= 0:
        rep = WitnessReport(name, f.c, N, 0.0, 0.0, math.nan, 0.0, 0.0, K, True)
        return rep, None, None
    delta1, xi, slack, cert = min_cosine_transform(psi, K, tol)
    poly = assemble_witness(delta1, delta2, psi)
    poly = CosinePoly(poly.a0, poly.freqs, poly.coeffs,
                      certified_lower=(delta1 + cert.lower_bound) / (delta1 + delta2))
    rep = WitnessReport(name, f.c, N, delta1, delta2, poly.a0, xi, slack, K,
                        degenerate=delta1 == 0.0)
    return rep, poly, cert


def certified_witness_min(poly: CosinePoly, cert: Certificate, delta1: float,
                          delta2: float) -> float:
    """Lower bound for min T implied by the certificate of G."""
    return (delta1 + cert.lower_bound) / (delta1 + delta2)
