import math

import numpy as np
import pytest

from vdclab import analysis
from vdclab.cosine import CosinePoly
from vdclab.extremal import ExtremalResult, solve_exact
from vdclab.growth import DomainError, make_function
from vdclab.kernels import fejer_t
from vdclab.lpgamma import gamma_lp
from vdclab.sequence import generate
from vdclab.witness import build_psi, cosine_transform, witness


def brute_rhs(y, T):
    """Oracle: both sides of the inequality by explicit double loops."""
    N = len(y)
    lhs = abs(sum(y)) ** 2
    acc = T.a0 * sum(abs(v) ** 2 for v in y)
    for h, a in zip(T.freqs, T.coeffs):
        acc += abs(a) * abs(sum(y[n + h] * np.conj(y[n]) for n in range(N - h)))
    return lhs, (N + T.degree) * acc


def test_sawtooth_examples():
    assert analysis.sawtooth(0.25) == -0.25
    assert analysis.sawtooth(0.0) == -0.5
    assert analysis.sawtooth(-1.3) == pytest.approx(0.2)
    assert analysis.torus_norm(2.9) == pytest.approx(0.1)


def test_gvdc_zero_and_fejer():
    T = analysis.fejer_polynomial(4)
    r = analysis.check_gvdc_inequality(np.zeros(10), T)
    assert r.lhs == 0 and r.rhs == 0 and r.slack == 0 and r.holds
    r = analysis.check_gvdc_inequality(np.ones(50), T)
    assert r.lhs == pytest.approx(2500.0) and r.holds
    assert T.at_zero() == pytest.approx(1.0)
    assert fejer_t(5, 0.3) / 5 == pytest.approx(T(0.3))


def test_gvdc_matches_brute_force(rng):
    for _ in range(30):
        y = rng.normal(size=int(rng.integers(1, 40))) + 1j * rng.normal(size=1)
        b = rng.normal(size=int(rng.integers(2, 12))) + 1.0
        T = analysis.autocorrelation_polynomial(b)
        r = analysis.check_gvdc_inequality(y, T)
        lhs, rhs = brute_rhs(list(y), T)
        assert r.lhs == pytest.approx(lhs, rel=1e-10)
        assert r.rhs == pytest.approx(rhs, rel=1e-10)
        assert r.holds


def test_gvdc_rejects_uncertified():
    with pytest.raises(ValueError):
        analysis.check_gvdc_inequality(np.ones(4), CosinePoly(0.5, [1], [0.5]))
    with pytest.raises(ValueError):
        analysis.check_gvdc_inequality(np.ones(4), CosinePoly(0.5, [1], [0.6], certified_lower=0))


def test_autocorrelation_polynomial_is_nonnegative(rng):
    T = analysis.autocorrelation_polynomial(rng.normal(size=9) + 0.5)
    assert T.at_zero() == pytest.approx(1.0)
    assert T(np.linspace(0, 0.5, 5001)).min() >= -1e-12


def test_exact_splitting_pointwise(f11):
    ind, de, ds = analysis.exact_splitting(f11, 5000)
    assert np.abs(ind - (de - ds)).max() <= 1e-10
    assert np.array_equal(ind.astype(bool), generate(f11, 5000).indicator(5000)[1:])


def test_decompose_lhs_matches_transform(f11):
    psi = build_psi(f11, 1024)
    for xi in (0.0, 0.123, 0.4999):
        r = analysis.decompose(f11, 1024, 32, xi)
        assert r.lhs == pytest.approx(cosine_transform(psi, xi), abs=1e-10)
        assert abs(r.residual) <= r.budget
    r0 = analysis.decompose(f11, 1024, 32, 0.0)
    assert r0.main > 0


def test_residual_shrinks_with_large_m(f11):
    rng = np.random.default_rng(9)
    xis = rng.random(32)
    meds = []
    for k in (4, 8, 12, 16):
        reps = analysis.Decomposer(f11, 1024, 1 << k)(xis)
        meds.append(np.median([abs(r.residual) for r in reps]))
    assert meds[-1] < meds[0]


def test_decompose_domain(f11):
    with pytest.raises(DomainError):
        analysis.decompose(make_function("powlog", 1.1, A=1.0), 64, 4, 0.1)
    with pytest.raises(ValueError):
        analysis.decompose(f11, 64, 0, 0.1)


def test_main_term_examples(f11):
    N = 1024
    w = analysis.main_term_weights(f11, N)
    assert analysis.main_term_min(f11, N, 16 * N) * N >= -4
    at0 = w.sum()
    assert at0 > 0
    assert at0 == pytest.approx(f11.inverse(float(N)) / N, rel=0.6)
    with pytest.raises(ValueError):
        analysis.main_term_min(f11, N, N)


def test_fejer_average_closed_form():
    N = 37
    n = np.arange(1, N + 1)
    for xi in (0.0, 0.2, 0.31, 0.5):
        direct = np.sum((1 - n / N) * np.cos(2 * np.pi * xi * n)) / N
        assert analysis.fejer_average(N, xi) == pytest.approx(direct, abs=1e-14)
        assert analysis.fejer_average(N, xi) >= -1.0 / N


def test_expsum_properties(f11):
    assert analysis.expsum(make_function("pure", 1.5), 1, 1, 1) == pytest.approx(1.0)
    # h(4) = 8 exactly for c = 3/2, so eta(8) = 4 and the phase is an integer
    assert analysis.expsum(make_function("pure", 1.5), 3, 8, 8) == pytest.approx(1.0)
    r = analysis.check_expsum(f11, 1, 1, 1 << 16)
    assert r.agree and r.within_bound
    a = analysis.expsum(f11, 5, 1, 5000)
    b = analysis.expsum(f11, -5, 1, 5000)
    assert a == pytest.approx(b.conjugate(), abs=1e-9)
    with pytest.raises(ValueError):
        analysis.expsum(f11, 0, 1, 10)


def test_dyadic_blocks():
    assert analysis.dyadic_blocks(1, 10) == [(0, 1, 1), (1, 2, 3), (2, 4, 7), (3, 8, 10)]
    assert analysis.dyadic_blocks(5, 6) == [(2, 5, 6)]


def test_second_derivative_examples(f11):
    lin = analysis.check_second_derivative_test(lambda n: 0.3 * n, lambda t: 0 * t, (1, 100), 0.0, 1.0)
    assert lin.status == "premise"
    bad = analysis.check_second_derivative_test(lambda n: n * n / 20.0, lambda t: 0 * t + 0.1,
                                                (1, 100), 1.0, 2.0)
    assert bad.status == "premise"
    for Q in (16, 1000, 1 << 14):
        r = analysis.quadratic_check(Q)
        assert r.status == "pass" and r.bound == pytest.approx(20 * math.sqrt(Q))
    r = analysis.eta_block_check(f11, 16, 12)
    assert r.status == "pass"


def test_eta_second_derivative(f11):
    t = 1000.0
    c = 1.1
    want = (1 / c) * (1 / c - 1) * t ** (1 / c - 2)
    assert analysis.eta_second_derivative(f11, t) == pytest.approx(want, rel=1e-12)


def test_bridge_examples(f11):
    ex = solve_exact([1], 4)
    T = CosinePoly(0.5, [1], [0.5], certified_lower=0.0)
    assert analysis.check_delta_leq_2gamma(ex, T) >= 0
    S = generate(f11, 40)
    ex = solve_exact(S, 40)
    _, W, _ = witness(f11, 40)
    assert analysis.check_delta_leq_2gamma(ex, W) >= 0
    g = make_function("pure", 1.05)
    S = generate(g, 40)
    lp = gamma_lp(S, 40)
    assert analysis.check_delta_leq_2gamma(solve_exact(S, 40), lp.poly, lp.cert_slack) >= 0


def test_bridge_violation_is_loud():
    fake = ExtremalResult(4, "{1}", 4, (1, 2, 3, 4), "exact", 0)
    # not a valid T (it dips to -0.5), so the inequality can fail
    T = CosinePoly(0.25, [1], [0.75], certified_lower=0.0)
    with pytest.raises(analysis.BridgeViolation):
        analysis.check_delta_leq_2gamma(fake, T)


def test_large_margin(f11):
    rep, _, _ = witness(f11, 4096)
    assert analysis.check_large(f11, 4096, rep.delta2) >= 0


def test_default_m():
    assert analysis.default_m(1 << 10, 1.1) == round(1024 ** (1 / 5.5))
    assert analysis.default_m(1, 1.1) == 1


def test_csv_is_deterministic(f11):
    reps = analysis.Decomposer(f11, 256, 8)([0.1, 0.2])
    a = analysis.to_csv(reps, analysis.DECOMPOSITION_COLUMNS)
    b = analysis.to_csv(analysis.Decomposer(f11, 256, 8)([0.1, 0.2]), analysis.DECOMPOSITION_COLUMNS)
    assert a == b and a.splitlines()[0] == ",".join(analysis.DECOMPOSITION_COLUMNS)
