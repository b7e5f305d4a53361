import numpy as np
import pytest

from hsprg.approx import build_P, remez_best_sign_approx, schedule
from hsprg.halfspace import Halfspace, normalize


@pytest.fixture(scope="session")
def sched02():
    """The empirical schedule at eps = 0.2 shared by the expensive tests."""
    return schedule(0.2)


@pytest.fixture(scope="session")
def sign02(sched02):
    return remez_best_sign_approx(sched02.a, sched02.m)


@pytest.fixture(scope="session")
def P02(sched02, sign02):
    return build_P(sign02, sched02.eps)


@pytest.fixture(scope="session")
def sched_small():
    """A cheap schedule (degree 42) for fast pipeline tests."""
    return schedule(0.35)


@pytest.fixture(scope="session")
def P_small(sched_small):
    sa = remez_best_sign_approx(sched_small.a, sched_small.m)
    return build_P(sa, sched_small.eps)


def near_regular_halfspace(rng, n=16, theta_scale=0.8) -> Halfspace:
    """A random halfspace with max |w_i| close to the 1/sqrt(n) minimum.

    Unit-norm weights on n coordinates force max |w_i| >= 1/sqrt(n), so
    perfect 0.2-regularity is unreachable at n = 16; these instances stay
    within max |w_i| <= 0.3, i.e. regular at tau = 1/3.
    """
    mags = 1.0 + 0.2 * rng.random(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    base = normalize(Halfspace(mags * signs, 0.0))
    # theta applies after normalization so both threshold branches occur
    theta = float(rng.normal() * theta_scale)
    return Halfspace(base.weights, theta)
