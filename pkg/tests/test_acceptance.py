"""Acceptance criteria, one test each at the stated tolerances.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the pytest run (see conftest.py) and when this file is executed
directly with ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from vdclab import analysis, verify
from vdclab.extremal import exhaustive, is_admissible, solve_exact
from vdclab.growth import make_function
from vdclab.lpgamma import gamma_lp, make_instance, solve_with_cuts
from vdclab.sequence import generate
from vdclab.witness import witness

LINES = []

THEOREM_CS = (1.05, 1.1, 1.19)
BRIDGE_CS = (1.05, 1.1)
BRIDGE_N = range(1, 201)


def record(number: int, title: str, ok: bool, detail: str, seconds: float,
           limit: float | None = None) -> None:
    if limit is not None and seconds > limit:
        ok = False
        detail += f"; runtime {seconds:.1f}s over {limit:g}s"
    tag = "PASS" if ok else "FAIL"
    LINES.append(f"[{tag}] {number:>2}. {title}: {detail} ({seconds:.1f}s)")
    assert ok, LINES[-1]


def _suite(number: int, title: str, result: verify.SuiteResult, limit=None):
    detail = f"{result.checks} checks, {result.failures} failures; {result.detail}"
    record(number, title, result.passed, detail, result.seconds, limit)


# -- shared sweeps ---------------------------------------------------------

@pytest.fixture(scope="module")
def witness_sweep():
    """Witness reports for every c at N = 2^10..2^18 and at c = 1.05 up to 2^20."""
    t = time.perf_counter()
    out = {}
    for c in THEOREM_CS:
        f = make_function("pure", c)
        top = 20 if c == 1.05 else 18
        out[c] = {1 << e: witness(f, 1 << e) for e in range(10, top + 1)}
    return out, time.perf_counter() - t


@pytest.fixture(scope="module")
def bridge_rows():
    """Exact extremal size, witness and LP optimum for each c and N <= 200."""
    t = time.perf_counter()
    rows = []
    for c in BRIDGE_CS:
        f = make_function("pure", c)
        S = generate(f, max(BRIDGE_N))
        for N in BRIDGE_N:
            ex = solve_exact(S, N)
            rep, T, _ = witness(f, N)
            rows.append({"c": c, "N": N, "ex": ex, "rep": rep, "T": T,
                         "lp": gamma_lp(S, N)})
    return rows, time.perf_counter() - t


# -- criteria --------------------------------------------------------------

def test_01_indicator_identity():
    _suite(1, "ceiling-difference membership", verify.indicator_identity(THEOREM_CS, 10**6),
           limit=30)


def test_02_kernel_identities():
    _suite(2, "kernel identities", verify.kernel_identities(), limit=20)


def test_03_witness_validity(witness_sweep):
    sweep, seconds = witness_sweep
    c = 1.05
    f = make_function("pure", c)
    S = set(generate(f, 1 << 18).tolist())
    bad = []
    worst_zero = 0.0
    worst_min = math.inf
    for N in [1 << e for e in range(10, 19)]:
        rep, T, _ = sweep[c][N]
        if T is None:
            bad.append(f"N={N}: no witness")
            continue
        err = abs(T.at_zero() - 1.0)
        worst_zero = max(worst_zero, err)
        worst_min = min(worst_min, T.certified_lower)
        if err > 1e-12 or T.certified_lower < -1e-9 or not set(T.support) <= S:
            bad.append(f"N={N}")
    record(3, "witness validity at c=1.05, N=2^10..2^18", not bad,
           f"max |T(0)-1| {worst_zero:.1e}, certified min {worst_min:.2e}"
           + (f"; failing {bad}" if bad else ""), seconds, limit=300)


def test_04_large_delta2(witness_sweep):
    sweep, seconds = witness_sweep
    checks, bad = 0, []
    worst = math.inf
    for c, reps in sweep.items():
        f = make_function("pure", c)
        for N, (rep, _, _) in reps.items():
            margin = analysis.check_large(f, N, rep.delta2)
            worst = min(worst, margin)
            checks += 1
            if margin < 0:
                bad.append((c, N))
    record(4, "delta2 >= eta(N/2)/(4N)", not bad,
           f"{checks} scales, min margin {worst:.4f}" + (f"; failing {bad}" if bad else ""),
           seconds)


def test_05_slopes(witness_sweep):
    sweep, seconds = witness_sweep
    c = 1.05
    Ns = [1 << e for e in range(12, 21)]
    d1 = [sweep[c][N][0].delta1 for N in Ns]
    gh = [sweep[c][N][0].gamma_hat for N in Ns]
    s1 = float(np.polyfit(np.log2(Ns), np.log2(d1), 1)[0])
    sg = float(np.polyfit(np.log2(Ns), np.log2(gh), 1)[0])
    t1 = -1 / (5 * c)
    tg = -(6 / (5 * c) - 1)
    ok = s1 <= t1 + 0.08 and sg <= tg + 0.1
    record(5, "log-log slopes at c=1.05, N=2^12..2^20", ok,
           f"delta1 slope {s1:.4f} (target {t1:.4f}, limit {t1 + 0.08:.4f}); "
           f"gamma_hat slope {sg:.4f} (target {tg:.4f}, limit {tg + 0.1:.4f})",
           seconds, limit=1800)


def test_06_extremal_oracle():
    t = time.perf_counter()
    rng = np.random.default_rng(6)
    instances = []
    for _ in range(100):
        N = int(rng.integers(1, 21))
        density = rng.uniform(0.05, 0.35)
        S = [s for s in range(1, N + 1) if rng.random() < density]
        instances.append((S, N))
    instances.append((generate(make_function("pure", 1.1), 20).tolist(), 20))
    bad = []
    for S, N in instances:
        ex = solve_exact(S, N)
        size, lex = exhaustive(S, N)
        if (ex.status != "exact" or ex.best_size != size or ex.witness_set != lex
                or not is_admissible(ex.witness_set, S)):
            bad.append((tuple(S), N))
    record(6, "exact extremal vs exhaustive enumeration", not bad,
           f"{len(instances)} instances, {len(bad)} mismatches",
           time.perf_counter() - t, limit=120)


def test_07_bridge(bridge_rows):
    rows, seconds = bridge_rows
    bad, checks = [], 0
    worst_w = worst_lp = math.inf
    for r in rows:
        ex = r["ex"]
        if ex.status != "exact":
            continue
        try:
            if r["T"] is not None:
                worst_w = min(worst_w, analysis.check_delta_leq_2gamma(ex, r["T"]))
                checks += 1
            lp = r["lp"]
            worst_lp = min(worst_lp,
                           analysis.check_delta_leq_2gamma(ex, lp.poly, lp.cert_slack))
            checks += 1
        except analysis.BridgeViolation as exc:
            bad.append(str(exc))
    record(7, "bridge |A|/N <= 2 a0 for c in {1.05, 1.1}, N <= 200", not bad,
           f"{checks} checks, min margin witness {worst_w:.4f}, LP {worst_lp:.4f}"
           + (f"; {bad[:3]}" if bad else ""), seconds)


def test_08_lp_sanity(bridge_rows):
    t = time.perf_counter()
    rows, _ = bridge_rows
    single = gamma_lp([1], 1).a0_opt
    ok_single = abs(single - 0.5) <= 1e-9
    over = [(r["c"], r["N"]) for r in rows
            if r["T"] is not None and r["lp"].a0_opt > r["rep"].gamma_hat + 1e-9]
    S = generate(make_function("pure", 1.1), 64)
    sol = solve_with_cuts(make_instance(S, 64), tol=1e-6, max_rounds=20)
    rounds = len(sol.history) - 1
    ok_cuts = sol.cert_slack < 1e-6 and rounds <= 20
    record(8, "LP sanity", ok_single and not over and ok_cuts,
           f"S={{1}}: a0={single:.12f}; a0_opt > gamma_hat + 1e-9 on {len(over)} of "
           f"{sum(r['T'] is not None for r in rows)} instances; cuts on S_1.1 cap [64]: "
           f"slack {sol.cert_slack:.1e} after {rounds} rounds",
           time.perf_counter() - t)


def test_09_gvdc():
    _suite(9, "generalised van der Corput inequality", verify.gvdc_trials(1000, seed=0))


def test_10_decomposition():
    _suite(10, "decomposition budget, C=8", verify.decomposition())


def test_11_main_term_floor():
    _suite(11, "main-term floor, C'=4", verify.main_term())


def test_12_second_derivative():
    _suite(12, "second-derivative test, C''=10", verify.second_derivative())


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
