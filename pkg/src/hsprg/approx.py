"""Minimax approximation machinery for the sign function.

This module provides:

* the parameter schedule tying the target fooling error eps to the
  approximation window ``a``, the polynomial degree budget ``K = 4m + 2``,
  the argument scale ``Z``, and the head-size / separation quantities used
  by the decomposition of non-regular halfspaces;
* the binomial-tail amplifying polynomial ``A_k``;
* a weighted Remez exchange solver computing the best uniform approximation
  ``r`` of degree m to ``1/sqrt(z)``-type targets, from which the odd
  best approximant ``p(t) = t r(t^2)`` to sign(t) on [-1,-a] u [a,1] is
  assembled;
* an independently constructed error certificate (ramp interpolant plus
  amplification) that upper-bounds the optimal error without going through
  the exchange;
* the one-sided approximator ``P(t) = (1 + eps^2 + p(t+a))^2 / 2 - 1`` that
  dominates sign(t) everywhere, with a sampled property checker.

All polynomial arithmetic is done in the Chebyshev basis with mpmath
coefficients; linear systems in the exchange are solved at a working
precision of at least max(128, 4 m) bits, since the reference systems are
far too ill-conditioned for double precision at the degrees involved.
Values are immutable and functions pure; a single exchange is sequential
internally, but independent solver instances can run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from .chebpoly import (
    UniPoly,
    cheb_extrema_nodes,
    cheb_gauss_nodes,
    fit_through_values,
    power_basis_to_cheb,
)
from .errors import (
    CertificateFailedError,
    InvalidConfigError,
    InvalidInputError,
    NumericalFailureError,
    PreconditionError,
)

# Constants validated against the stated schedule constraints.  The theorem
# pair satisfies 10 c - C/128 = -1 exactly with c even; the empirical pair
# keeps degrees desk-sized, with every claim verified by measurement.
THEOREM_C = 240768.0
THEOREM_SMALL_C = 188.0
EMPIRICAL_C = 1.0
EMPIRICAL_SMALL_C = 1.0

_PREC_GUARD = 64


# ---------------------------------------------------------------------------
# parameter schedule


@dataclass(frozen=True)
class ParamSchedule:
    """Derived quantities for a target error eps and constants (C, c).

    a        approximation window edge, eps^2 / (C log(1/eps))
    m        degree parameter, ceil(c log(1/eps) / a) rounded up to even
    K        degree budget for the one-sided approximator, 4m + 2
    Z        argument scale, eps / (2a)
    L        head size for the critical-index decomposition
    t_sep    number of separated head coordinates
    sep_step integer spacing of the separated coordinates
    """

    eps: float
    C_const: float
    c_const: float
    a: float
    m: int
    K: int
    Z: float
    L: int
    t_sep: int
    sep_step: int
    mode: str
    log_base: float

    def log_inv(self, x: float) -> float:
        """log(1/x) in this schedule's base."""
        return math.log(1.0 / x) / math.log(self.log_base)


def schedule(
    eps: float,
    C_const: float = EMPIRICAL_C,
    c_const: float = EMPIRICAL_SMALL_C,
    mode: str = "empirical",
    log_base: float = math.e,
) -> ParamSchedule:
    """Build the parameter schedule for a target error eps.

    ``mode="theorem"`` enforces the constant constraints under which the
    quantitative guarantees hold (and restricts eps < 0.1); the resulting
    degrees are astronomically large, so theorem mode is only useful for
    schedule arithmetic.  ``mode="empirical"`` accepts any eps in (0, 0.9]
    and small constants; claims must then be verified by measurement.
    """
    if not (math.isfinite(eps) and math.isfinite(C_const) and math.isfinite(c_const)):
        raise InvalidInputError("schedule arguments must be finite")
    if C_const <= 0 or c_const <= 0:
        raise InvalidInputError("C_const and c_const must be positive")
    if mode not in ("theorem", "empirical"):
        raise InvalidConfigError(f"unknown mode {mode!r}")
    if log_base <= 1:
        raise InvalidConfigError("log_base must exceed 1")
    if mode == "theorem":
        if not 0 < eps < 0.1:
            raise InvalidConfigError("theorem mode requires 0 < eps < 0.1")
        if 10.0 * c_const - C_const / 128.0 > -1.0:
            raise InvalidConfigError(
                "theorem mode requires 10*c_const - C_const/128 <= -1 "
                f"(got {10.0 * c_const - C_const / 128.0})"
            )
        if c_const != int(c_const) or int(c_const) % 2 != 0:
            raise InvalidConfigError("theorem mode requires c_const to be even")
    else:
        # the window [a, 1] degenerates as eps -> 1; 0.9 keeps it meaningful
        if not 0 < eps <= 0.9:
            raise InvalidConfigError("empirical mode requires 0 < eps <= 0.9")

    # eps is used as given: no rounding to a power of two, so none of the
    # derived integer quantities may silently rely on that classical
    # normalization assumption
    ln = math.log(log_base)
    log_inv_eps = math.log(1.0 / eps) / ln
    a = eps * eps / (C_const * log_inv_eps)
    m = math.ceil(c_const * log_inv_eps / a)
    if m % 2 == 1:
        m += 1
    K = 4 * m + 2
    Z = eps / (2.0 * a)
    log_10_eps = math.log(10.0 / eps) / ln
    L = math.ceil(8.0 * log_10_eps**2 / (eps * eps))
    t_sep = math.ceil(log_10_eps)
    sep_step = math.ceil(4.0 / (eps * eps) * log_inv_eps)
    return ParamSchedule(
        eps=eps,
        C_const=C_const,
        c_const=c_const,
        a=a,
        m=m,
        K=K,
        Z=Z,
        L=L,
        t_sep=t_sep,
        sep_step=sep_step,
        mode=mode,
        log_base=log_base,
    )


# ---------------------------------------------------------------------------
# amplifying polynomial


@lru_cache(maxsize=None)
def _amplifier_power_coeffs(k: int) -> tuple:
    """Exact power-basis coefficients of A_k as Fractions."""
    power = [Fraction(0)] * (k + 1)
    denom = Fraction(1, 2**k)
    for j in range((k + 1) // 2, k + 1):
        cj = Fraction(math.comb(k, j)) * denom
        pa = [Fraction(math.comb(j, r)) for r in range(j + 1)]
        pb = [Fraction((-1) ** s * math.comb(k - j, s)) for s in range(k - j + 1)]
        for r, ar in enumerate(pa):
            if ar:
                for s, bs in enumerate(pb):
                    if bs:
                        power[r + s] += cj * ar * bs
    return tuple(power)


def amplifier_exact(k: int, u: Fraction) -> Fraction:
    """Evaluate A_k at a rational point with exact arithmetic."""
    acc = Fraction(0)
    for c in reversed(_amplifier_power_coeffs(k)):
        acc = acc * u + c
    return acc


def amplifier(k: int, prec: int = 128) -> UniPoly:
    """The degree-k amplifying polynomial on [-1, 1].

    A_k(u) is the probability that a Binomial(k, (1+u)/2) variable reaches
    k/2; it pushes inputs in [3/5, 1] toward 1 at rate exp(-k/6).
    Coefficients are expanded in exact rational arithmetic and converted.
    """
    if k < 1:
        raise InvalidInputError("amplifier order must be at least 1")
    cheb = power_basis_to_cheb(list(_amplifier_power_coeffs(k)))
    with mp.workprec(prec + _PREC_GUARD):
        coeffs = tuple(mpf(c.numerator) / c.denominator for c in cheb)
    return UniPoly(-1, 1, coeffs)


# ---------------------------------------------------------------------------
# weighted Remez exchange


@dataclass(frozen=True)
class RemezResult:
    poly: UniPoly
    level: float
    level_mp: mpf
    references: tuple
    signs: tuple
    grid_max: float
    iterations: int
    prec: int


def _solve_reference_system(refs, degree, f_mp, w_mp, lo, hi):
    """Solve for coefficients and levelled error E at the given references."""
    n = degree + 2
    A = mp.matrix(n, n)
    b = mp.matrix(n, 1)
    span = hi - lo
    for i, x in enumerate(refs):
        y = (2 * x - (hi + lo)) / span
        w = w_mp(x)
        tprev, tcur = mpf(1), y
        for j in range(degree + 1):
            if j == 0:
                tv = mpf(1)
            elif j == 1:
                tv = y
            else:
                tprev, tcur = tcur, 2 * y * tcur - tprev
                tv = tcur
            A[i, j] = w * tv
        A[i, degree + 1] = mpf((-1) ** i)
        b[i] = f_mp(x)
    sol = mp.lu_solve(A, b)
    coeffs = tuple(sol[j] for j in range(degree + 1))
    return coeffs, sol[degree + 1]


def _alternating_candidates(errs: np.ndarray) -> list[int]:
    """Indices of per-run |error| maxima; runs are maximal same-sign blocks."""
    cands: list[int] = []
    cur_sign = 0.0
    cur_best = -1
    for i, e in enumerate(errs):
        s = math.copysign(1.0, e) if e != 0 else 0.0
        if s == 0.0:
            continue
        if s != cur_sign:
            if cur_best >= 0:
                cands.append(cur_best)
            cur_sign = s
            cur_best = i
        elif abs(e) > abs(errs[cur_best]):
            cur_best = i
    if cur_best >= 0:
        cands.append(cur_best)
    return cands


def _reduce_to_target(cands: list[int], errs: np.ndarray, target: int) -> list[int]:
    """Trim an alternating candidate list to exactly ``target`` entries."""
    cands = list(cands)
    while len(cands) > target:
        vals = [abs(errs[i]) for i in cands]
        if (len(cands) - target) % 2 == 1:
            if vals[0] <= vals[-1]:
                cands.pop(0)
            else:
                cands.pop()
        else:
            j = min(range(len(cands) - 1), key=lambda i: max(vals[i], vals[i + 1]))
            del cands[j : j + 2]
    return cands


def _refine_extremum(err_mp, sign, x1, x2, x3, rounds=3):
    """Sharpen a bracketed extremum of sign*err by parabolic interpolation."""
    f = lambda x: sign * err_mp(x)
    pts = [(x1, f(x1)), (x2, f(x2)), (x3, f(x3))]
    pts.sort()
    for _ in range(rounds):
        (xa, va), (xb, vb), (xc, vc) = pts
        denom = (xb - xa) * (vb - vc) - (xb - xc) * (vb - va)
        if denom == 0:
            break
        vx = xb - ((xb - xa) ** 2 * (vb - vc) - (xb - xc) ** 2 * (vb - va)) / (2 * denom)
        if not (xa < vx < xc) or vx == xb:
            break
        fv = f(vx)
        quad = sorted(pts + [(vx, fv)])
        kbest = max(range(4), key=lambda i: quad[i][1])
        if kbest == 0:
            pts = quad[0:3]
        elif kbest == 3:
            pts = quad[1:4]
        else:
            pts = quad[kbest - 1 : kbest + 2]
    xbest, vbest = max(pts, key=lambda q: q[1])
    return xbest, sign * vbest


def weighted_remez(
    lo: float,
    hi: float,
    degree: int,
    f_mp: Callable,
    w_mp: Callable,
    f_np: Callable,
    w_np: Callable,
    prec: int,
    tol: float = 1e-12,
    max_iter: int = 200,
    extra_points: Sequence[float] = (),
    initial_refs: Sequence | None = None,
) -> RemezResult:
    """Best uniform approximation minimizing max |f(x) - w(x) r(x)| on [lo, hi].

    Multi-point exchange: each iteration solves the levelled system at the
    current m+2 references, locates the alternating local extrema of the
    error on a Chebyshev-spaced grid (float), sharpens them with parabolic
    steps in working precision, and declares convergence once the levelled
    spread (max-min of |error| at the new references) drops below ``tol``
    relative to the maximum.
    """
    lo_f, hi_f = float(lo), float(hi)
    target = degree + 2
    npts = max(4096, 32 * target)
    base = 0.5 * (lo_f + hi_f) - 0.5 * (hi_f - lo_f) * np.cos(
        np.pi * np.arange(npts) / (npts - 1)
    )
    extras = np.asarray(
        [x for x in extra_points if lo_f < x < hi_f], dtype=np.float64
    )

    with mp.workprec(prec + _PREC_GUARD):
        lo_mp, hi_mp = mpf(lo), mpf(hi)
        if initial_refs is None:
            refs = cheb_extrema_nodes(lo_mp, hi_mp, degree + 1)
        else:
            refs = [mpf(x) for x in initial_refs]
        if len(refs) != target:
            raise InvalidInputError("initial reference set has wrong size")

        poly = None
        level = mpf(0)
        for iteration in range(1, max_iter + 1):
            coeffs, E = _solve_reference_system(refs, degree, f_mp, w_mp, lo_mp, hi_mp)
            poly = UniPoly(lo_mp, hi_mp, coeffs)
            err_mp = lambda x: f_mp(x) - w_mp(x) * poly(x)

            grid = np.unique(
                np.concatenate(
                    [base, extras, np.asarray([float(r) for r in refs])]
                )
            )
            # float cancellation noise drowns levels below ~1e-13; fall back
            # to a reduced-precision mpf sweep for very small levelled errors
            if E != 0 and abs(E) < mpf("1e-10"):
                sweep_prec = min(
                    prec + _PREC_GUARD, max(96, int(-mpmath.log(abs(E), 2)) + 48)
                )
                with mp.workprec(sweep_prec):
                    errs = np.asarray(
                        [float(err_mp(mpf(x))) for x in grid], dtype=np.float64
                    )
            else:
                errs = np.asarray(f_np(grid), dtype=np.float64) - np.asarray(
                    w_np(grid), dtype=np.float64
                ) * poly.eval_float(grid)
            cands = _alternating_candidates(errs)
            if len(cands) < target:
                raise NumericalFailureError(
                    f"error has only {len(cands)} alternations, need {target}",
                    refs,
                )
            cands = _reduce_to_target(cands, errs, target)

            new_refs = []
            new_vals = []
            for idx in cands:
                sgn = 1 if errs[idx] > 0 else -1
                if idx == 0 or idx == len(grid) - 1 or (
                    extras.size and np.any(np.abs(extras - grid[idx]) == 0)
                ):
                    x = mpf(grid[idx])
                    new_refs.append(x)
                    new_vals.append(err_mp(x))
                    continue
                x, v = _refine_extremum(
                    err_mp, sgn, mpf(grid[idx - 1]), mpf(grid[idx]), mpf(grid[idx + 1])
                )
                new_refs.append(x)
                new_vals.append(v)

            order = sorted(range(target), key=lambda i: new_refs[i])
            new_refs = [new_refs[i] for i in order]
            new_vals = [new_vals[i] for i in order]
            for i in range(target - 1):
                if not new_refs[i] < new_refs[i + 1]:
                    raise NumericalFailureError("reference collision", new_refs)

            mags = [abs(v) for v in new_vals]
            vmax, vmin = max(mags), min(mags)
            alternating = all(
                new_vals[i] * new_vals[i + 1] < 0 for i in range(target - 1)
            )
            refs = new_refs
            if vmax == 0 or (alternating and float((vmax - vmin) / vmax) < tol):
                coeffs, E = _solve_reference_system(
                    refs, degree, f_mp, w_mp, lo_mp, hi_mp
                )
                poly = UniPoly(lo_mp, hi_mp, coeffs)
                level = abs(E)
                signs = tuple(
                    1 if f_mp(x) - w_mp(x) * poly(x) > 0 else -1 for x in refs
                )
                return RemezResult(
                    poly=poly,
                    level=float(level),
                    level_mp=level,
                    references=tuple(refs),
                    signs=signs,
                    grid_max=max(float(vmax), float(np.max(np.abs(errs)))),
                    iterations=iteration,
                    prec=prec,
                )

    raise NumericalFailureError(
        f"Remez exchange did not converge in {max_iter} iterations", refs
    )


# ---------------------------------------------------------------------------
# best sign approximation


@dataclass(frozen=True)
class SignApprox:
    """Best odd approximation p(t) = t r(t^2) to sign(t) on [-1,-a] u [a,1].

    ``alternation_points`` are the equioscillation abscissae z_i of the
    reduced problem on [a^2, 1]; the images t_i = sqrt(z_i) carry error of
    magnitude exactly M with alternating signs.
    """

    p: UniPoly
    r: UniPoly
    a: float
    M: float
    alternation_points: tuple
    error_signs: tuple
    grid_max: float
    prec: int

    @property
    def degree(self) -> int:
        return 2 * self.r.degree + 1


def remez_best_sign_approx(
    a: float,
    m: int,
    precision_bits: int | None = None,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> SignApprox:
    """Optimal degree-(2m+1) odd approximation to sign(t).

    Solves the equivalent weighted problem min max_{z in [a^2,1]}
    |1 - sqrt(z) r(z)| over degree-m polynomials r, then materializes
    p(t) = t r(t^2) on [-1, 1] with an exact odd projection (even-index
    Chebyshev coefficients zeroed).
    """
    if not 0 < a < 1:
        raise InvalidInputError("need 0 < a < 1")
    if m < 0:
        raise InvalidInputError("need m >= 0")
    prec = precision_bits if precision_bits is not None else max(128, 4 * m)

    res = weighted_remez(
        a * a,
        1.0,
        m,
        f_mp=lambda z: mpf(1),
        w_mp=mpmath.sqrt,
        f_np=lambda z: np.ones_like(z),
        w_np=np.sqrt,
        prec=prec,
        tol=tol,
        max_iter=max_iter,
    )
    r = res.poly
    with mp.workprec(prec + _PREC_GUARD):
        nodes = cheb_gauss_nodes(mpf(-1), mpf(1), 2 * m + 2)
        vals = [x * r(x * x) for x in nodes]
        raw = fit_through_values(mpf(-1), mpf(1), vals)
        coeffs = tuple(
            c if k % 2 == 1 else mpf(0) for k, c in enumerate(raw.coeffs)
        )
    p = UniPoly(-1, 1, coeffs)
    return SignApprox(
        p=p,
        r=r,
        a=float(a),
        M=res.level,
        alternation_points=tuple(float(z) for z in res.references),
        error_signs=res.signs,
        grid_max=res.grid_max,
        prec=prec,
    )


# ---------------------------------------------------------------------------
# error certificate via ramp interpolation plus amplification


def ramp_modulus(a: float, delta: float) -> float:
    """Modulus of continuity of the ramp (slope 1/a, clamped at +-1)."""
    return min(delta / a, 2.0)


@dataclass(frozen=True)
class ErrorCertificate:
    a: float
    eps: float | None
    ell: int
    j_degree: int
    k_amp: int
    q_degree: int
    j_error: float
    measured_error: float
    target: float | None
    jackson_bound: float
    passed: bool


@lru_cache(maxsize=32)
def _ramp_solve(a: float, gdeg: int, prec: int) -> RemezResult:
    """Best odd ramp approximant, reduced to z = t^2 coordinates on [0, 1].

    The odd polynomial J(t) = t g(t^2) of degree 2 gdeg + 1 minimizing the
    uniform error to the ramp equals the unrestricted best approximation
    (the target is odd and the optimum unique), so solving the reduced
    weighted problem loses nothing and keeps the exchange non-degenerate.
    """
    aa = a * a

    def f_mp(z):
        z = mpf(z)
        return mpmath.sqrt(z) / a if z < aa else mpf(1)

    def f_np(z):
        return np.minimum(np.sqrt(np.maximum(z, 0.0)) / a, 1.0)

    # weight sqrt(z) vanishes at z = 0, where the error is pinned to 0;
    # start the references away from the origin and let the exchange move
    init_lo = aa / 16.0
    init = cheb_extrema_nodes(mpf(init_lo), mpf(1), gdeg + 1)
    return weighted_remez(
        0.0,
        1.0,
        gdeg,
        f_mp=f_mp,
        w_mp=lambda z: mpmath.sqrt(mpf(z)),
        f_np=f_np,
        w_np=lambda z: np.sqrt(np.maximum(z, 0.0)),
        prec=prec,
        extra_points=(aa,),
        initial_refs=init,
    )


def _measure_q_error(g: UniPoly, amp: UniPoly, a: float, grid_points: int) -> float:
    """Max |q - sign| over [a,1] and [-1,-a] for q = 2 A_k((4/5) t g(t^2)) - 1."""
    worst = 0.0
    for side in (+1.0, -1.0):
        ts = np.linspace(a, 1.0, grid_points) * side
        jv = ts * g.eval_float(ts * ts)
        qv = 2.0 * amp.eval_float(0.8 * jv) - 1.0
        worst = max(worst, float(np.max(np.abs(qv - side))))
    return worst


def certify_error(
    a: float,
    eps: float,
    sched: ParamSchedule | None = None,
    grid_points: int | None = None,
    prec: int = 192,
) -> ErrorCertificate:
    """Constructive upper bound on the optimal sign-approximation error.

    Builds the best ramp approximant J of degree at most ceil(25/a),
    amplifies it as q = 2 A_k((4/5) J) - 1 with k = ceil(15 ln(1/eps)),
    and measures max |q - sign| over a dense grid of [a, 1] (both signs).
    The measurement must come in at or below eps^2; since q is a polynomial
    of degree ell * k, the optimal approximant of any degree >= deg(q) does
    at least as well.

    When a schedule is supplied, the certificate must additionally fit that
    schedule's degree budget 2m (its whole point is to bound the error of
    the degree-(2m+1) optimum).  Theorem-grade constants guarantee the fit;
    small empirical constants typically cannot amplify enough within budget
    and fail here, which is the expected outcome.
    """
    if not 0 < a < 1:
        raise InvalidInputError("need 0 < a < 1")
    if not 0 < eps < 1:
        raise InvalidInputError("need 0 < eps < 1")
    if sched is not None:
        if abs(sched.a - a) > 1e-9 * max(1.0, abs(sched.a)) or sched.eps != eps:
            raise PreconditionError("schedule inconsistent with (a, eps)")
    ell = math.ceil(25.0 / a)
    ell_odd = ell if ell % 2 == 1 else ell - 1
    gdeg = (ell_odd - 1) // 2
    k_amp = math.ceil(15.0 * math.log(1.0 / eps))
    if sched is not None:
        budget = 2 * sched.m
        if budget < ell_odd:
            raise CertificateFailedError(
                f"schedule budget 2m = {budget} cannot fit the degree-{ell_odd} "
                "ramp approximant; constants too small for this eps"
            )
        k_amp = min(k_amp, budget // ell_odd)
    res = _ramp_solve(float(a), gdeg, prec)
    amp = amplifier(k_amp)
    deg_q = ell_odd * k_amp
    if grid_points is None:
        grid_points = max(4001, 8 * (deg_q + 1))
    measured = _measure_q_error(res.poly, amp, float(a), grid_points)
    target = eps * eps
    cert = ErrorCertificate(
        a=float(a),
        eps=float(eps),
        ell=ell,
        j_degree=ell_odd,
        k_amp=k_amp,
        q_degree=deg_q,
        j_error=res.level,
        measured_error=measured,
        target=target,
        jackson_bound=6.0 / (a * ell),
        passed=measured <= target,
    )
    if not cert.passed:
        raise CertificateFailedError(
            f"certificate error {measured:.3e} exceeds eps^2 = {target:.3e}; "
            "constants too small for this eps"
        )
    return cert


def certificate_at_budget(
    a: float,
    budget: int,
    grid_points: int | None = None,
    prec: int = 192,
) -> ErrorCertificate:
    """The same certificate constrained to total degree <= budget.

    The amplification order is the largest k with deg(J) * k <= budget, so
    the measured error upper-bounds the optimal minimax error at any degree
    of at least ``budget``.
    """
    ell = math.ceil(25.0 / a)
    ell_odd = ell if ell % 2 == 1 else ell - 1
    if budget < ell_odd:
        raise PreconditionError(
            f"budget {budget} cannot fit the degree-{ell_odd} ramp approximant"
        )
    gdeg = (ell_odd - 1) // 2
    res = _ramp_solve(float(a), gdeg, prec)
    k_amp = budget // ell_odd
    amp = amplifier(k_amp)
    deg_q = ell_odd * k_amp
    if grid_points is None:
        grid_points = max(4001, 8 * (deg_q + 1))
    measured = _measure_q_error(res.poly, amp, float(a), grid_points)
    return ErrorCertificate(
        a=float(a),
        eps=None,
        ell=ell,
        j_degree=ell_odd,
        k_amp=k_amp,
        q_degree=deg_q,
        j_error=res.level,
        measured_error=measured,
        target=None,
        jackson_bound=6.0 / (a * ell),
        passed=True,
    )


# ---------------------------------------------------------------------------
# the one-sided approximator P


@dataclass(frozen=True)
class UpperApprox:
    """P(t) = (1 + eps^2 + p(t + a))^2 / 2 - 1, dominating sign(t) everywhere."""

    P: UniPoly
    source_p: SignApprox
    eps: float
    K: int

    @property
    def a(self) -> float:
        return self.source_p.a


def build_P(
    p: SignApprox,
    eps: float,
    a: float | None = None,
    require_certified: bool = True,
) -> UpperApprox:
    """Materialize P from a sign approximant with error at most eps^2.

    The square and shift are performed by interpolation at the 2 deg(p) + 1
    Chebyshev nodes of the working interval [-1-a, 1-a] (chosen so the inner
    argument t + a stays inside p's basis interval, keeping coefficients
    O(1)), followed by an exact-degree fit.
    """
    if a is None:
        a = p.a
    if abs(a - p.a) > 1e-12:
        raise PreconditionError("a does not match the sign approximant")
    if require_certified and not p.M <= eps * eps:
        raise PreconditionError(
            f"sign approximation error {p.M:.3e} exceeds eps^2 = {eps * eps:.3e}"
        )
    deg_p = p.degree
    D = 2 * deg_p
    with mp.workprec(p.prec + _PREC_GUARD):
        a_mp = mpf(a)
        lo, hi = -1 - a_mp, 1 - a_mp
        eps2 = mpf(eps) ** 2
        nodes = cheb_gauss_nodes(lo, hi, D + 1)
        vals = [(1 + eps2 + p.p(x + a_mp)) ** 2 / 2 - 1 for x in nodes]
        P = fit_through_values(lo, hi, vals)
    return UpperApprox(P=P, source_p=p, eps=float(eps), K=D)


def eval_upper_formula_float(P: UpperApprox, ts: np.ndarray) -> np.ndarray:
    """Evaluate P through its defining square form, in float64.

    Safe far outside the working interval, where the coefficient path would
    overflow; agrees with the materialized coefficients to working precision.
    """
    pv = P.source_p.p.eval_float(np.asarray(ts, dtype=np.float64) + P.a)
    u = 1.0 + P.eps**2 + pv
    return 0.5 * u * u - 1.0


@dataclass(frozen=True)
class PPropertyReport:
    """Sampled margins for the four properties of the upper approximator.

    All checks are grid evaluations and labelled ``sampled``; they do not
    prove the properties for every real t.  Margins are signed distances
    into the allowed region, so every margin >= -tol means a pass.
    """

    eps: float
    a: float
    K: int
    grid_density: int
    dominates_sign: float
    lower_flank: float
    band_above_sign: float
    band_below_eps: float
    dip_above_minus_one: float
    dip_below_one_plus_eps: float
    growth_log_margin: float
    p_band_low: float
    p_band_high: float
    p_monotone_left: bool
    p_monotone_right: bool
    label: str
    tol: float

    @property
    def property1_ok(self) -> bool:
        return self.dominates_sign >= -self.tol and self.lower_flank >= -self.tol

    @property
    def property2_ok(self) -> bool:
        return self.band_above_sign >= -self.tol and self.band_below_eps >= -self.tol

    @property
    def property3_ok(self) -> bool:
        return (
            self.dip_above_minus_one >= -self.tol
            and self.dip_below_one_plus_eps >= -self.tol
        )

    @property
    def property4_ok(self) -> bool:
        return self.growth_log_margin >= -1e-9

    @property
    def all_passed(self) -> bool:
        return (
            self.property1_ok
            and self.property2_ok
            and self.property3_ok
            and self.property4_ok
        )


def _segment_grid(lo: float, hi: float, density: int, min_points: int = 33) -> np.ndarray:
    n = max(min_points, int(math.ceil((hi - lo) * density)) + 1)
    return np.linspace(lo, hi, n)


def check_P_properties(P: UpperApprox, grid_density: int = 1000) -> PPropertyReport:
    """Sampled verification of the four properties of P.

    Checks, on grids of the stated density: domination of sign(t) from
    above on both flanks, the eps-band on [-1/2,-2a] u [0,1/2], the bounded
    dip on (-2a, 0), and the growth bound |P| <= 2 (4|t|)^K on 1/2 <= |t| <= 10
    (compared in log space).  Also samples the band and one-sided
    monotonicity of the underlying odd approximant.
    """
    if grid_density < 1000:
        raise InvalidInputError("grid density must be at least 1000 per unit")
    a = P.a
    eps = P.eps
    K = P.K
    tol = 1e-9

    neg_flank = _segment_grid(-0.5, -2 * a, grid_density)
    pos_flank = _segment_grid(0.0, 0.5, grid_density)
    dip = _segment_grid(-2 * a, 0.0, grid_density)[1:-1]
    band = np.concatenate([neg_flank, pos_flank])

    band_vals = P.P.eval_float(band)
    band_sign = np.where(band >= 0, 1.0, -1.0)
    dip_vals = P.P.eval_float(dip)

    # growth range, via the defining form of P (float-safe at |t| = 10)
    grow = np.concatenate(
        [-_segment_grid(0.5, 10.0, grid_density), _segment_grid(0.5, 10.0, grid_density)]
    )
    pv = P.source_p.p.eval_float(grow + a)
    u = 1.0 + eps**2 + pv
    with np.errstate(over="ignore"):
        grow_vals = 0.5 * u * u - 1.0
    big = np.abs(u) > 1e12
    log_abs_P = np.empty_like(u)
    log_abs_P[big] = 2.0 * np.log(np.abs(u[big])) - math.log(2.0)
    small = ~big
    log_abs_P[small] = np.log(np.maximum(np.abs(grow_vals[small]), 1e-300))
    growth_log_margin = float(
        np.min(math.log(2.0) + K * np.log(4.0 * np.abs(grow)) - log_abs_P)
    )

    # domination margins: flanks + dip + growth range
    grow_sign = np.where(grow >= 0, 1.0, -1.0)
    dom_grow = np.where(
        grow_sign > 0, np.where(big, np.inf, grow_vals - 1.0), grow_vals + 1.0
    )
    dominates_sign = float(
        min(
            np.min(band_vals - band_sign),
            np.min(dip_vals + 1.0),
            np.min(dom_grow),
        )
    )
    # sign(t) >= -P(-t): margin P(-t) + sign(t)
    refl_band = P.P.eval_float(-band)
    refl_dip = P.P.eval_float(-dip)
    pv_r = P.source_p.p.eval_float(-grow + a)
    u_r = 1.0 + eps**2 + pv_r
    with np.errstate(over="ignore"):
        refl_grow = 0.5 * u_r * u_r - 1.0
    big_r = np.abs(u_r) > 1e12
    lower_flank = float(
        min(
            np.min(refl_band + band_sign),
            np.min(refl_dip + np.where(dip >= 0, 1.0, -1.0)),
            np.min(np.where(big_r, np.inf, refl_grow) + grow_sign),
        )
    )

    band_above_sign = float(np.min(band_vals - band_sign))
    band_below_eps = float(np.min(band_sign + eps - band_vals))
    dip_above = float(np.min(dip_vals + 1.0)) if dip.size else math.inf
    dip_below = float(np.min(1.0 + eps - dip_vals)) if dip.size else math.inf

    # underlying p: band on [-a, a] and monotonicity outside [-1, 1]
    inner = _segment_grid(-a, a, grid_density)
    p_inner = P.source_p.p.eval_float(inner)
    eps2 = eps * eps
    p_band_low = float(np.min(p_inner + 1.0 + eps2))
    p_band_high = float(np.min(1.0 + eps2 - p_inner))
    dp = P.source_p.p.derivative()
    left = _segment_grid(-3.0, -1.0, grid_density)
    right = _segment_grid(1.0, 3.0, grid_density)
    p_monotone_left = bool(np.all(dp.eval_float(left) >= 0))
    p_monotone_right = bool(np.all(dp.eval_float(right) >= 0))

    return PPropertyReport(
        eps=eps,
        a=a,
        K=K,
        grid_density=grid_density,
        dominates_sign=dominates_sign,
        lower_flank=lower_flank,
        band_above_sign=band_above_sign,
        band_below_eps=band_below_eps,
        dip_above_minus_one=dip_above,
        dip_below_one_plus_eps=dip_below,
        growth_log_margin=growth_log_margin,
        p_band_low=p_band_low,
        p_band_high=p_band_high,
        p_monotone_left=p_monotone_left,
        p_monotone_right=p_monotone_right,
        label="sampled",
        tol=tol,
    )


def eval_poly(poly: UniPoly, t: float):
    """Evaluate a Chebyshev-basis polynomial at t (Clenshaw recurrence).

    Extrapolation outside the basis interval uses the same recurrence.
    """
    if isinstance(t, (int, float)) and not math.isfinite(t):
        raise InvalidInputError(f"non-finite evaluation point {t}")
    return poly(t)
