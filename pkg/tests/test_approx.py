import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from hsprg.approx import (
    EMPIRICAL_C,
    EMPIRICAL_SMALL_C,
    amplifier,
    amplifier_exact,
    build_P,
    certificate_at_budget,
    certify_error,
    check_P_properties,
    eval_poly,
    eval_upper_formula_float,
    ramp_modulus,
    remez_best_sign_approx,
    schedule,
)
from hsprg.chebpoly import UniPoly, cheb_extrema_nodes
from hsprg.errors import (
    CertificateFailedError,
    InvalidConfigError,
    InvalidInputError,
    PreconditionError,
)


# ---------------------------------------------------------------------------
# schedule


def test_schedule_example_eighth():
    # independent re-evaluation of the formulas at eps = 1/8, C = 4, c = 2
    sch = schedule(0.125, 4.0, 2.0)
    ln8 = math.log(8.0)
    assert sch.a == pytest.approx((1 / 64) / (4 * ln8), rel=1e-12)
    assert sch.a == pytest.approx(1.8786e-3, rel=1e-4)
    assert sch.Z == pytest.approx(4 * ln8 / 0.25, rel=1e-12)
    assert sch.Z == pytest.approx(33.27, abs=5e-3)
    assert sch.Z == pytest.approx(sch.eps / (2 * sch.a), rel=1e-12)


@pytest.mark.parametrize("eps", [0.05, 0.125, 0.2, 0.35, 0.5])
def test_schedule_K_and_parity(eps):
    sch = schedule(eps)
    assert sch.K == 4 * sch.m + 2
    assert sch.m % 2 == 0
    assert sch.L == math.ceil(8 * math.log(10 / eps) ** 2 / eps**2)
    assert sch.t_sep == math.ceil(math.log(10 / eps))


def test_schedule_L_value_at_02():
    assert schedule(0.2).L == 3061


def test_theorem_mode_constants():
    sch = schedule(0.05, 240768.0, 188.0, "theorem")
    assert 10 * sch.c_const - sch.C_const / 128 == -1.0
    with pytest.raises(InvalidConfigError, match="10\\*c_const"):
        schedule(0.05, 100.0, 188.0, "theorem")
    with pytest.raises(InvalidConfigError, match="even"):
        schedule(0.05, 242048.0, 189.0, "theorem")
    with pytest.raises(InvalidConfigError, match="0.1"):
        schedule(0.2, 240768.0, 188.0, "theorem")


def test_schedule_rejects_bad_inputs():
    with pytest.raises(InvalidConfigError):
        schedule(0.95)
    with pytest.raises(InvalidInputError):
        schedule(0.2, -1.0)
    with pytest.raises(InvalidConfigError):
        schedule(0.2, 1.0, 1.0, "bogus")


def test_schedule_log_base_switch():
    nat = schedule(0.25, log_base=math.e)
    two = schedule(0.25, log_base=2.0)
    assert two.a == pytest.approx(nat.a * math.log(2.0), rel=1e-12)
    assert two.t_sep == math.ceil(math.log2(10 / 0.25))


# ---------------------------------------------------------------------------
# amplifier


def test_amplifier_k1_is_identity_after_rescale():
    # A_1(u) = (1+u)/2, so 2 A_1(u) - 1 = u
    amp = amplifier(1)
    assert float(amp.coeffs[0]) == pytest.approx(0.5, abs=1e-18)
    assert float(amp.coeffs[1]) == pytest.approx(0.5, abs=1e-18)
    assert amplifier_exact(1, Fraction(1, 3)) == Fraction(2, 3)


def test_amplifier_exact_values():
    assert amplifier_exact(2, Fraction(0)) == Fraction(3, 4)
    for k in range(1, 13):
        assert amplifier_exact(k, Fraction(1)) == 1
        assert amplifier_exact(k, Fraction(-1)) == 0


def test_amplifier_eval_matches_exact():
    amp = amplifier(2)
    assert float(amp(0.0)) == pytest.approx(0.75, abs=1e-15)
    assert eval_poly(amp, 0.0) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8, 13, 21, 30])
def test_amplifier_claim_bounds(k):
    # on [3/5, 1]: 2 A_k(u) - 1 in [1 - 2 exp(-k/6), 1]; mirrored on the left
    amp = amplifier(k)
    grid = np.linspace(0.6, 1.0, 500)
    vals = 2.0 * amp.eval_float(grid) - 1.0
    lo = 1.0 - 2.0 * math.exp(-k / 6.0)
    assert np.all(vals <= 1.0 + 1e-12)
    assert np.all(vals >= lo - 1e-12)
    neg = 2.0 * amp.eval_float(-grid) - 1.0
    assert np.all(neg >= -1.0 - 1e-12)
    assert np.all(neg <= -lo + 1e-12)


def test_amplifier_rejects_zero():
    with pytest.raises(InvalidInputError):
        amplifier(0)


# ---------------------------------------------------------------------------
# Remez solver


def test_remez_analytic_oracle():
    # hand-solved equioscillation at m=0: r0 = 2/(1+a), M = (1-a)/(1+a),
    # alternation at the endpoints {a^2, 1}; check 1 - a r0 = -(1 - r0)
    a = 1.0 / 3.0
    sa = remez_best_sign_approx(a, 0)
    r0 = float(sa.r.coeffs[0])
    assert r0 == pytest.approx(1.5, abs=1e-10)
    assert sa.M == pytest.approx(0.5, abs=1e-10)
    assert len(sa.alternation_points) == 2
    assert sa.alternation_points[0] == pytest.approx(a * a, abs=1e-10)
    assert sa.alternation_points[1] == pytest.approx(1.0, abs=1e-10)
    assert (1 - a * r0) == pytest.approx(-(1 - r0), abs=1e-9)
    assert sa.error_signs == (1, -1)


@settings(max_examples=12, deadline=None)
@given(st.floats(0.08, 0.6), st.integers(0, 6))
def test_remez_oddness(a, m):
    sa = remez_best_sign_approx(a, m)
    for k, c in enumerate(sa.p.coeffs):
        if k % 2 == 0:
            assert c == 0
    # p(-t) = -p(t) at sample points
    for t in (0.1, 0.33, 0.8, 1.2):
        with mp.workprec(sa.prec):
            assert abs(sa.p(t) + sa.p(-t)) < mpf(10) ** -20


def test_remez_equioscillation_m10():
    sa = remez_best_sign_approx(0.1, 10)
    assert len(sa.alternation_points) == 12
    signs = sa.error_signs
    assert all(signs[i] != signs[i + 1] for i in range(11))
    # |p(t_i) - 1| equals M to high relative accuracy at every t_i
    with mp.workprec(sa.prec):
        for z in sa.alternation_points:
            err = abs(float(sa.p(mpmath.sqrt(mpf(z)))) - 1.0)
            assert err == pytest.approx(sa.M, rel=1e-8)
    assert sa.grid_max == pytest.approx(sa.M, rel=1e-8)


def test_remez_error_monotone_in_degree():
    a = 0.3
    ms = range(0, 13)
    errs = [remez_best_sign_approx(a, m).M for m in ms]
    for lo_m, hi_m in zip(errs, errs[1:]):
        assert hi_m <= lo_m * (1 + 1e-9)


def test_remez_rejects_bad_inputs():
    with pytest.raises(InvalidInputError):
        remez_best_sign_approx(1.5, 3)
    with pytest.raises(InvalidInputError):
        remez_best_sign_approx(0.5, -1)


# ---------------------------------------------------------------------------
# certificates


def test_ramp_modulus_example():
    # omega(1/ell) = 1/(a ell) whenever 1/ell <= 2a
    a = 0.2
    for ell in (63, 125, 1000):
        assert ramp_modulus(a, 1 / ell) == pytest.approx(1 / (a * ell), rel=1e-12)
    assert ramp_modulus(0.2, 1.0) == 2.0  # clamped far apart


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1, 0.2, 0.25])
def test_amplification_arithmetic(eps):
    # 2 exp(-k/6) < eps^2 for k = ceil(15 ln(1/eps)), any eps <= 1/4
    k = math.ceil(15 * math.log(1 / eps))
    assert 2 * math.exp(-k / 6) < eps * eps


def test_certify_error_passes():
    cert = certify_error(0.25, 0.2)
    assert cert.ell == 100 and cert.j_degree == 99
    assert cert.k_amp == math.ceil(15 * math.log(5.0))
    assert cert.measured_error <= 0.2**2
    assert cert.j_error <= cert.jackson_bound
    assert cert.jackson_bound == pytest.approx(6 / (0.25 * 100), rel=1e-12)
    assert cert.passed


def test_certify_error_budget_failure_tiny_c():
    # a sched whose 2m cannot even fit the ramp approximant
    sch = schedule(0.2, EMPIRICAL_C, EMPIRICAL_SMALL_C)
    with pytest.raises(CertificateFailedError, match="budget"):
        certify_error(sch.a, sch.eps, sch)


def test_certify_error_budget_failure_weak_amplification():
    # constants tuned so the budget fits J but allows only k = 2 rounds
    # of amplification: measured error stays near 0.39, far above eps^2
    eps = 0.2
    C = eps * eps / (0.5 * math.log(1 / eps))  # makes a = 0.5
    c = 15.0
    sch = schedule(eps, C, c)
    assert abs(sch.a - 0.5) < 1e-12
    assert 2 * sch.m >= 49
    with pytest.raises(CertificateFailedError, match="exceeds eps"):
        certify_error(sch.a, eps, sch)


def test_certify_error_schedule_consistency():
    sch = schedule(0.2)
    with pytest.raises(PreconditionError):
        certify_error(0.5, 0.2, sch)


def test_certificate_ordering_small_grid():
    # optimality: the best approximation at the certificate's degree budget
    # is at least as good as the certificate itself
    for a, m in [(1 / 3, 38), (0.5, 25), (0.5, 45)]:
        sa = remez_best_sign_approx(a, m)
        cert = certificate_at_budget(a, 2 * m)
        assert cert.q_degree <= 2 * m
        assert sa.M <= cert.measured_error, (a, m)


def test_certificate_budget_too_small():
    with pytest.raises(PreconditionError):
        certificate_at_budget(0.5, 10)


# ---------------------------------------------------------------------------
# the upper approximator P


def test_build_P_degree_and_identity(P_small, sched_small):
    P = P_small
    assert P.P.degree == 2 * P.source_p.degree
    assert P.K == sched_small.K
    # wherever p(t+a) = 1 exactly, P = (2+eps^2)^2/2 - 1 in [1, 1+eps]
    eps = sched_small.eps
    peak = 0.5 * (2 + eps * eps) ** 2 - 1
    assert 1.0 <= peak <= 1.0 + eps


def test_build_P_matches_formula(P_small):
    # the materialized coefficients agree with the defining square form
    a = P_small.a
    ts = np.linspace(-1 - a, 1 - a, 401)
    via_coeffs = P_small.P.eval_float(ts)
    via_formula = eval_upper_formula_float(P_small, ts)
    assert np.max(np.abs(via_coeffs - via_formula)) < 1e-10


def test_build_P_above_minus_one(P_small):
    a = P_small.a
    ts = np.linspace(-1 - a, 1 - a, 2001)
    assert np.min(P_small.P.eval_float(ts)) >= -1.0 - 1e-12


def test_build_P_precondition():
    toy = remez_best_sign_approx(1 / 3, 0)  # M = 0.5 >> eps^2
    with pytest.raises(PreconditionError):
        build_P(toy, 0.2)
    forced = build_P(toy, 0.2, require_certified=False)
    assert forced.P.degree == 2


def test_check_P_properties_pass(P_small):
    rep = check_P_properties(P_small)
    assert rep.label == "sampled"
    assert rep.all_passed
    assert rep.property1_ok and rep.property2_ok
    assert rep.property3_ok and rep.property4_ok
    assert rep.p_monotone_left and rep.p_monotone_right
    # Thm 4.5 item 2 on a grid: p stays inside [-(1+eps^2), 1+eps^2] on [-a,a]
    assert rep.p_band_low >= -1e-12 and rep.p_band_high >= -1e-12


def test_check_P_properties_negative_control():
    # the m=0 toy approximant has error 0.5 >> eps^2: the eps-band fails
    toy = remez_best_sign_approx(1 / 3, 0)
    forced = build_P(toy, 0.05, require_certified=False)
    rep = check_P_properties(forced)
    assert not rep.property2_ok
    assert not rep.all_passed


def test_check_P_density_guard(P_small):
    with pytest.raises(InvalidInputError):
        check_P_properties(P_small, grid_density=100)


def test_growth_bound_at_one(P_small):
    # |P(1)| <= 2 * 4^K, comfortably
    val = abs(eval_upper_formula_float(P_small, np.array([1.0]))[0])
    assert math.log(val) <= math.log(2) + P_small.K * math.log(4)


# ---------------------------------------------------------------------------
# eval_poly and the growth fact


def test_eval_poly_examples():
    const = UniPoly(-1, 1, (mpf(7),))
    assert eval_poly(const, 123.0) == 7
    t1 = UniPoly(-1, 1, (mpf(0), mpf(1)))
    assert float(eval_poly(t1, 0.625)) == pytest.approx(0.625, abs=1e-18)
    with pytest.raises(InvalidInputError):
        eval_poly(const, math.nan)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 15),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=16),
)
def test_chebyshev_growth_fact(degree, raw_coeffs):
    # a polynomial bounded by b at the d+1 Chebyshev extrema satisfies
    # |p(t)| <= b (2|t|)^d for |t| >= 1
    coeffs = tuple(mpf(c) for c in raw_coeffs[: degree + 1])
    if all(c == 0 for c in coeffs):
        coeffs = (mpf(1),) + coeffs[1:]
    poly = UniPoly(-1, 1, coeffs)
    d = poly.degree
    nodes = [float(x) for x in cheb_extrema_nodes(-1, 1, max(d, 1))]
    b = max(abs(float(poly(x))) for x in nodes)
    for t in np.linspace(1.0, 10.0, 37):
        bound = b * (2 * t) ** d
        val = abs(float(poly(t)))
        assert val <= bound * (1 + 1e-9) + 1e-15
        val = abs(float(poly(-t)))
        assert val <= bound * (1 + 1e-9) + 1e-15
