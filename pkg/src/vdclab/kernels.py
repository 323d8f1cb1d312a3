"""Fejer and Dirichlet kernels on Z and on the circle R/Z."""
from __future__ import annotations

import numpy as np

# below this |sin(pi xi)| the closed forms switch to their Taylor expansion
SMALL_SIN = 1e-8


def fejer_z(N: int, n):
    """(1 - |n|/N)_+ ."""
    if N < 1:
        raise ValueError("N must be positive")
    n = np.abs(np.asarray(n, dtype=float))
    return np.maximum(1.0 - n / N, 0.0)


def _reduce(xi):
    xi = np.asarray(xi, dtype=float)
    return xi - np.rint(xi)


def fejer_t(N: int, xi):
    """(1/N) (sin(pi N xi) / sin(pi xi))^2, equal to N at xi = 0 mod 1."""
    if N < 1:
        raise ValueError("N must be positive")
    x = np.pi * _reduce(xi)
    s = np.sin(x)
    small = np.abs(s) < SMALL_SIN
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.sin(N * x) / s) ** 2 / N
    series = N * (1.0 - (N * N - 1.0) * x * x / 3.0)
    return np.where(small, series, out)


def dirichlet(N: int, xi):
    """sin((2N+1) pi xi) / sin(pi xi), equal to 2N+1 at xi = 0 mod 1."""
    if N < 0:
        raise ValueError("N must be non-negative")
    L = 2 * N + 1
    x = np.pi * _reduce(xi)
    s = np.sin(x)
    small = np.abs(s) < SMALL_SIN
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(L * x) / s
    series = L * (1.0 - (L * L - 1.0) * x * x / 6.0)
    return np.where(small, series, out)


def trig_sum(coeffs, xi):
    """sum_k coeffs[k] e(k xi) for k = -K..K, coeffs given for k = -K..K.

    Real part only; the coefficient sequences used here are even.  This
    is the direct-summation oracle for the closed forms above.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    K = (coeffs.size - 1) // 2
    k = np.arange(-K, K + 1)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    phase = np.outer(xi, k)
    phase -= np.rint(phase)
    return np.cos(2 * np.pi * phase) @ coeffs


def fejer_coefficients(N: int, K: int | None = None) -> np.ndarray:
    K = N if K is None else K
    return fejer_z(N, np.arange(-K, K + 1))


def dirichlet_coefficients(N: int, K: int | None = None) -> np.ndarray:
    K = N if K is None else K
    k = np.arange(-K, K + 1)
    return (np.abs(k) <= N).astype(float)


def convolve_coefficients(a, b) -> np.ndarray:
    """Coefficients of f * g on the circle: the pointwise product."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    K = max(a.size, b.size)
    return _pad(a, K) * _pad(b, K)


def _pad(a, size):
    extra = (size - a.size) // 2
    return np.pad(a, extra)
