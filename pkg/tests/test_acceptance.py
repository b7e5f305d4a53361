"""Acceptance criteria, one test per criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute.  The quantitative headline bound is not reproducible at
desk scale, so acceptance is property-based plus small exact oracles; the
expensive eps = 0.2 pipeline is shared through session fixtures.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from mpmath import mp, mpf

from conftest import near_regular_halfspace
from hsprg.approx import (
    certificate_at_budget,
    check_P_properties,
    remez_best_sign_approx,
)
from hsprg.fooling import (
    FamilySpec,
    chow_parameters,
    exact_bias,
    family,
    fooling_error,
    influence,
    large_crit_experiment,
)
from hsprg.halfspace import Halfspace, normalize
from hsprg.kwise import build_space, verify_kwise
from hsprg.sandwich import build_sandwich, expected_gap, verify_pointwise


def _line(num: int, ok: bool, detail: str):
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_kwise_exactness():
    start = time.monotonic()
    space = build_space(10, 3)
    rep = verify_kwise(space, 3)
    elapsed = time.monotonic() - start
    expected = 2 ** (space.s - 3)
    ok = (
        rep.passed
        and rep.cells_checked == math.comb(10, 3) * 8 == 960
        and rep.expected_count == expected
        and elapsed < 60.0
    )
    _line(1, ok, f"k-wise exactness: 960 cells at {expected} seeds each "
                 f"({elapsed:.2f}s)")


def test_criterion_02_negative_control():
    rep = verify_kwise(build_space(3, 2), 3)
    ok = (not rep.passed) and rep.first_zero_cell == ((1, 2, 3), (1, 1, -1), 0)
    _line(2, ok, f"4-point space fails 3-wise, zero cell {rep.first_zero_cell}")


def test_criterion_03_remez_analytic_oracle():
    sa = remez_best_sign_approx(1 / 3, 0)
    r0 = float(sa.r.coeffs[0])
    ok = (
        abs(r0 - 1.5) < 1e-10
        and abs(sa.M - 0.5) < 1e-10
        and len(sa.alternation_points) == 2
    )
    _line(3, ok, f"analytic oracle: r0 = {r0:.12f}, M = {sa.M:.12f}, "
                 f"{len(sa.alternation_points)} alternations")


def test_criterion_04_equioscillation():
    start = time.monotonic()
    sa = remez_best_sign_approx(0.1, 10)
    with mp.workprec(sa.prec):
        errs = [
            abs(float(sa.p(mpmath.sqrt(mpf(z)))) - 1.0)
            for z in sa.alternation_points
        ]
    elapsed = time.monotonic() - start
    spread = (max(errs) - min(errs)) / max(errs)
    grid_gap = abs(sa.grid_max - sa.M) / sa.M
    ok = (
        len(sa.alternation_points) == 12
        and spread <= 1e-8
        and grid_gap <= 1e-8
        and elapsed < 60.0
    )
    _line(4, ok, f"equioscillation: 12 points, spread {spread:.2e}, "
                 f"grid max within {grid_gap:.2e} ({elapsed:.2f}s)")


def test_criterion_05_certificate_ordering():
    pairs = [(1 / 3, 38), (0.5, 25), (0.5, 45), (0.25, 50)]
    worst = -math.inf
    ok = True
    for a, m in pairs:
        sa = remez_best_sign_approx(a, m)
        cert = certificate_at_budget(a, 2 * m)
        ok = ok and sa.M <= cert.measured_error and cert.q_degree <= 2 * m
        worst = max(worst, sa.M / cert.measured_error)
    _line(5, ok, f"certificate ordering holds on {len(pairs)} (a, m) pairs, "
                 f"max ratio {worst:.2e}")


def test_criterion_06_sandwich_validity(P02, sched02):
    # max |w_i| >= 1/sqrt(16) = 0.25 for any unit-norm halfspace on 16
    # coordinates, so literal 0.2-regularity is unattainable; the instances
    # are maximally regular (max |w_i| <= 0.3) with the eps = 0.2 schedule,
    # and the asserted properties do not depend on the regularity level.
    start = time.monotonic()
    rng = np.random.default_rng(20260809)
    worst_margin = math.inf
    branches = {"small_theta": 0, "large_theta": 0}
    ok = True
    for _ in range(100):
        h = near_regular_halfspace(rng, n=16)
        pair = build_sandwich(h, P02, sched02, tau=1 / 3)
        branches[pair.branch] += 1
        rep = verify_pointwise(pair)
        gaps = expected_gap(pair)
        worst_margin = min(worst_margin, rep.min_upper_margin, rep.min_lower_margin)
        ok = (
            ok
            and rep.passed
            and rep.points_checked == 65536
            and gaps.gap_u >= 0
            and gaps.gap_l >= 0
        )
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 600.0
    _line(6, ok, f"sandwich validity on 100 instances "
                 f"({branches['small_theta']} small / {branches['large_theta']} "
                 f"large theta), worst margin {worst_margin:.2e}, "
                 f"gaps >= 0 ({elapsed:.1f}s)")


def test_criterion_07_P_property_report(P02):
    rep = check_P_properties(P02, grid_density=1000)
    ok = rep.all_passed and rep.label == "sampled"
    _line(7, ok, f"P properties (1)-(4) sampled at density 1000: "
                 f"dominate {rep.dominates_sign:.2e}, band {rep.band_below_eps:.2e}, "
                 f"dip {rep.dip_above_minus_one:.2e}, "
                 f"growth log-margin {rep.growth_log_margin:.1f}")


def test_criterion_08_fooling_exact_identities():
    rng = np.random.default_rng(808)
    ok = True
    for _ in range(50):
        n = int(rng.integers(2, 15))
        h = normalize(Halfspace(rng.normal(size=n), 0.4 * rng.normal()))
        ok = ok and fooling_error(h, build_space(n, n)) == 0
    maj3 = family(FamilySpec("majority", 3))
    err = fooling_error(maj3, build_space(3, 2))
    ok = ok and err == Fraction(1, 2)
    _line(8, ok, f"fooling error 0 at k=n on 50 instances; majority3 under "
                 f"the 4-point space errs by exactly {err}")


def test_criterion_09_influence_identity():
    rng = np.random.default_rng(909)
    ok = True
    for _ in range(200):
        n = int(rng.integers(1, 13))
        h = normalize(Halfspace(rng.normal(size=n), 0.5 * rng.normal()))
        i = int(rng.integers(0, n))
        ok = ok and influence(h, i, "direct") == influence(h, i, "halfspace_identity")
    maj3 = family(FamilySpec("majority", 3))
    ok = ok and all(influence(maj3, i) == Fraction(1, 2) for i in range(3))
    chow = chow_parameters(maj3)
    ok = ok and chow == (Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    _line(9, ok, "influence identity exact on 200 instances; majority3 "
                 f"influences 1/2, Chow {tuple(str(c) for c in chow)}")


def test_criterion_10_large_critical_index():
    from hsprg.approx import schedule

    sch = schedule(0.5)
    h = family(FamilySpec("exponential", 20))
    space = build_space(20, 7)
    rep = large_crit_experiment(h, sch, space)
    ok = (
        not rep.skipped
        and rep.bad_event_freq is not None
        and rep.bad_event_freq <= Fraction(1, 20)
        and rep.hoeffding_ok
        and rep.chebyshev_ok
        and rep.claim_sep_norm_ok
        and rep.decay_passed
    )
    _line(10, ok, f"large critical index: bad-event freq {rep.bad_event_freq} "
                  f"<= eps/10, Hoeffding {float(rep.hoeffding_measured):.3g} <= "
                  f"{rep.hoeffding_bound:.3g}, Chebyshev "
                  f"{float(rep.chebyshev_measured_max):.3g} <= {rep.chebyshev_bound:.3g}, "
                  f"decay+separation checks pass")
