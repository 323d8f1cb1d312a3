"""Property suites shared by the ``verify`` command and the test-suite.

Each suite returns a :class:`SuiteResult`; none raises on a failed check.
``smoke=True`` shrinks every sweep so the whole set runs in seconds.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .growth import make_function, with_threshold
from .kernels import (convolve_coefficients, dirichlet, dirichlet_coefficients,
                      fejer_coefficients, fejer_t, trig_sum)
from .sequence import generate, identity_start, indicator_by_identity
from .witness import build_psi, cosine_transform, grid_size_for, witness

THEOREM_CS = (1.05, 1.1, 1.19)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    failures: int
    detail: str = ""
    seconds: float = 0.0
    rows: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<28} {self.checks:>8} checks  {self.seconds:7.2f}s  {self.detail}"


def _timed(fn):
    def run(*args, **kw):
        t = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def indicator_identity(cs=THEOREM_CS, horizon: int = 10**6, smoke: bool = False) -> SuiteResult:
    """Ceiling-difference membership against direct enumeration on [h(T), horizon]."""
    if smoke:
        horizon = min(horizon, 10**4)
    checks = fails = 0
    notes = []
    for c in cs:
        f = with_threshold(make_function("pure", c), 10**6)
        start = identity_start(f)
        lo = min(start, horizon)
        enum = generate(f, horizon + 1).indicator(horizon + 1)
        ident = indicator_by_identity(f, lo, horizon)
        bad = int(np.count_nonzero(ident != enum[lo:horizon + 1]))
        checks += ident.size
        fails += bad
        notes.append(f"c={c}: T={f.threshold}, from n={lo}, {bad} mismatches")
    return SuiteResult("indicator identity", fails == 0, checks, fails, "; ".join(notes))


@_timed
def kernel_identities(smoke: bool = False) -> SuiteResult:
    """Fejer non-negativity, Fejer as an average of Dirichlet kernels,
    D_n * D_N0 = D_min(n, N0) and the mixed identity F_N * D_N0."""
    rng = np.random.default_rng(12345)
    checks = fails = 0
    worst = {"neg": 0.0, "avg": 0.0, "dd": 0.0, "mixed": 0.0}
    Ns = [1, 2, 3, 7, 16, 64] if smoke else [1, 2, 3, 5, 8, 17, 64, 100, 256, 511, 512]
    xi = np.concatenate([rng.random(10**4 - 4), [0.0, 1e-12, 0.5, 1 - 1e-10]])
    for N in Ns:
        F = fejer_t(N, xi)
        worst["neg"] = min(worst["neg"], float(F.min()))
        fails += int(np.count_nonzero(F < -1e-12))
        checks += F.size
        grid = np.arange(16 * N) / (16 * N)
        avg = sum(dirichlet(n, grid) for n in range(N)) / N
        err = float(np.abs(fejer_t(N, grid) - avg).max())
        worst["avg"] = max(worst["avg"], err / N)
        fails += int(err > 1e-9 * N)
        checks += 1
    orders = range(0, 17) if smoke else range(0, 65)
    pts = rng.random(64)
    for n in orders:
        for N0 in orders:
            K = max(n, N0)
            lhs = convolve_coefficients(dirichlet_coefficients(n, K),
                                        dirichlet_coefficients(N0, K))
            err = float(np.abs(trig_sum(lhs, pts) - dirichlet(min(n, N0), pts)).max())
            worst["dd"] = max(worst["dd"], err)
            fails += int(err > 1e-9)
            checks += 1
    for N in orders:
        if N == 0:
            continue
        for N0 in orders:
            K = max(N, N0)
            lhs = convolve_coefficients(fejer_coefficients(N, K), dirichlet_coefficients(N0, K))
            if N0 <= N:
                rhs = (N0 / N) * fejer_t(N0, pts) if N0 else 0.0
                rhs = rhs + ((N - N0) / N) * dirichlet(N0, pts)
            else:
                rhs = fejer_t(N, pts)
            err = float(np.abs(trig_sum(lhs, pts) - rhs).max())
            worst["mixed"] = max(worst["mixed"], err)
            fails += int(err > 1e-9)
            checks += 1
    detail = (f"min F={worst['neg']:.2e}, avg err/N={worst['avg']:.2e}, "
              f"D*D err={worst['dd']:.2e}, F*D err={worst['mixed']:.2e}")
    return SuiteResult("kernel identities", fails == 0, checks, fails, detail)


def random_trial(rng, N_max: int = 256):
    """One (y, T) pair: complex y and a normalised autocorrelation polynomial."""
    N = int(rng.integers(1, N_max + 1))
    y = rng.normal(size=N) + 1j * rng.normal(size=N)
    H = int(rng.integers(1, N + 1))
    b = rng.normal(size=H + 1) + rng.uniform(0.0, 2.0)
    if abs(b.sum()) < 1e-3:
        b[0] += 1.0
    return y, analysis.autocorrelation_polynomial(b)


@_timed
def gvdc_trials(trials: int = 1000, seed: int = 0, smoke: bool = False) -> SuiteResult:
    """Generalised Van der Corput inequality on random and classical inputs."""
    if smoke:
        trials = min(trials, 100)
    rng = np.random.default_rng(seed)
    fails = 0
    worst = math.inf
    for _ in range(trials):
        y, T = random_trial(rng)
        r = analysis.check_gvdc_inequality(y, T)
        fails += int(not r.holds)
        worst = min(worst, r.slack / max(r.rhs, 1e-300))
    extra = 0
    for N, H in [(1, 1), (10, 3), (100, 10), (256, 255)]:
        r = analysis.check_gvdc_inequality(np.ones(N), analysis.fejer_polynomial(H))
        fails += int(not r.holds or abs(r.lhs - N * N) > 1e-9 * N * N)
        extra += 1
    f = make_function("pure", 1.1)
    for N in (16, 64, 256):
        _, T, _ = witness(f, N)
        for _ in range(5):
            y = rng.normal(size=N) + 1j * rng.normal(size=N)
            r = analysis.check_gvdc_inequality(y, T)
            fails += int(not r.holds)
            extra += 1
    return SuiteResult("generalised vdC inequality", fails == 0, trials + extra, fails,
                       f"min relative slack {worst:.3e}")


@_timed
def second_derivative(cs=THEOREM_CS, j_max: int = 20, m_max_exp: int = 8,
                      C: float = analysis.C_VDC, smoke: bool = False) -> SuiteResult:
    """Second-derivative test on quadratic phases and on m*eta over dyadic blocks."""
    if smoke:
        j_max, m_max_exp, cs = min(j_max, 10), min(m_max_exp, 4), cs[:1]
    checks = fails = premise = 0
    worst = math.inf
    for Q in [2**k for k in range(1, 17 if not smoke else 11)] + [10, 1000, 12345]:
        r = analysis.quadratic_check(Q, C)
        checks += 1
        fails += int(r.status != "pass")
        worst = min(worst, r.margin / r.bound)
    for c in cs:
        f = make_function("pure", c)
        for j in range(j_max + 1):
            for k in range(m_max_exp + 1):
                for s in (1, -1):
                    r = analysis.eta_block_check(f, s * (1 << k), j, C)
                    checks += 1
                    if r.status == "premise":
                        premise += 1
                    elif r.status == "fail":
                        fails += 1
                    else:
                        worst = min(worst, r.margin / r.bound)
    ok = fails == 0 and premise == 0
    return SuiteResult("second-derivative test", ok, checks, fails + premise,
                       f"premise failures {premise}, min relative margin {worst:.3f}")


@_timed
def main_term(cs=(1.05, 1.1), exps=range(10, 17), C: float = analysis.C_MAIN,
              grid_mult: int = 16, smoke: bool = False) -> SuiteResult:
    """Grid minimum of the main term times N stays above -C."""
    if smoke:
        exps = range(6, 9)
    checks = fails = 0
    worst = math.inf
    rows = []
    for c in cs:
        f = make_function("pure", c)
        for e in exps:
            N = 1 << e
            v = analysis.main_term_min(f, N, grid_size_for(N, grid_mult)) * N
            rows.append({"c": c, "N": N, "min_times_N": v})
            worst = min(worst, v)
            checks += 1
            fails += int(v < -C)
    return SuiteResult("main-term floor", fails == 0, checks, fails,
                       f"min(grid min * N) = {worst:.4f} vs -{C:g}", rows=rows)


def decomposition_sweep(f, Ns, Ms, xi_count: int = 32, seed: int = 0,
                        C: float = analysis.C_DECOMP) -> list:
    """DecompositionReports over the (N, M) grid with seeded random xi."""
    rng = np.random.default_rng(seed)
    out = []
    for N in Ns:
        xis = rng.random(xi_count)
        for M in Ms:
            out.extend(analysis.Decomposer(f, N, M, C)(xis))
    return out


def median_trend(reports) -> dict:
    """Per N: medians of |residual| over xi by M and the log-log slope in M."""
    by = {}
    for r in reports:
        by.setdefault(r.N, {}).setdefault(r.M, []).append(abs(r.residual))
    out = {}
    for N, cells in by.items():
        Ms = sorted(cells)
        med = [float(np.median(cells[M])) for M in Ms]
        slope = float(np.polyfit(np.log2(Ms), np.log2(med), 1)[0]) if len(Ms) > 1 else 0.0
        out[N] = {"M": Ms, "median": med, "slope": slope}
    return out


@_timed
def decomposition(c: float = 1.1, Ns=(2**10, 2**12, 2**14), Ms=tuple(2**k for k in range(4, 11)),
                  xi_count: int = 32, seed: int = 0, C: float = analysis.C_DECOMP,
                  smoke: bool = False) -> SuiteResult:
    """|residual| <= budget in every cell; residual medians trend down in M."""
    if smoke:
        Ns, Ms = (2**8,), tuple(2**k for k in range(4, 8))
    f = make_function("pure", c)
    reps = decomposition_sweep(f, Ns, Ms, xi_count, seed, C)
    fails = sum(not r.ok for r in reps)
    ratio = max(abs(r.residual) / r.budget for r in reps)
    trend = median_trend(reps)
    down = {N: t["slope"] < 0 and t["median"][-1] < t["median"][0] for N, t in trend.items()}
    fails += sum(not d for d in down.values())
    slopes = ", ".join(f"N={N}: {t['slope']:+.2f}" for N, t in trend.items())
    return SuiteResult("decomposition budget", fails == 0, len(reps) + len(down), fails,
                       f"max |residual|/budget {ratio:.2e} at C={C:g}; median slopes {slopes}",
                       rows=reps)


@_timed
def exact_splitting(cs=THEOREM_CS, N: int = 2**16, smoke: bool = False) -> SuiteResult:
    """1_S = eta difference minus sawtooth difference, and the lhs agrees with G."""
    if smoke:
        N = 2**10
    checks = fails = 0
    worst = 0.0
    for c in cs:
        f = make_function("pure", c)
        ind, de, ds = analysis.exact_splitting(f, N)
        enum = generate(f, N).indicator(N)[1:]
        err = float(np.abs(ind - (de - ds)).max())
        worst = max(worst, err)
        fails += int(err > 1e-10) + int(np.count_nonzero(ind != enum))
        checks += 2
    f = make_function("pure", 1.1)
    M = 64
    n0 = 1024
    dec = analysis.Decomposer(f, n0, M)
    xis = np.random.default_rng(7).random(16)
    psi = build_psi(f, n0)
    for r in dec(xis):
        fails += int(abs(r.lhs - cosine_transform(psi, r.xi)) > 1e-10)
        checks += 1
    return SuiteResult("exact splitting", fails == 0, checks, fails,
                       f"max pointwise error {worst:.2e}")


ALL = {
    "kernels": kernel_identities,
    "indicator": indicator_identity,
    "splitting": exact_splitting,
    "gvdc": gvdc_trials,
    "second-derivative": second_derivative,
    "main-term": main_term,
    "decomposition": decomposition,
}


def run_all(smoke: bool = False, seed: int = 0, C: float = analysis.C_DECOMP,
            C_main: float = analysis.C_MAIN, C_vdc: float = analysis.C_VDC,
            horizon: int = 10**6) -> list[SuiteResult]:
    return [
        kernel_identities(smoke=smoke),
        indicator_identity(horizon=horizon, smoke=smoke),
        exact_splitting(smoke=smoke),
        gvdc_trials(seed=seed, smoke=smoke),
        second_derivative(C=C_vdc, smoke=smoke),
        main_term(C=C_main, smoke=smoke),
        decomposition(seed=seed, C=C, smoke=smoke),
    ]
