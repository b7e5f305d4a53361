"""Fooling experiments and derandomized estimation.

Everything here counts: biases are exact integer counts over the full cube
or over all seeds of a sample space, turned into rationals, so fooling
errors and estimator identities can be asserted with equality rather than
tolerance.  The quantitative fooling bound is not reproducible at desk
scale (theorem-grade constants force astronomically large degrees and
supports), so the harness reports empirical error curves plus the exact,
scale-free identities: zero error at full independence, the influence
identity, and the Hoeffding/Chebyshev bound statements.

Sweep cells are independent pure computations (parallelizable, merged in
declared row order); exhaustive counts use integer tallies, so any range
partition merges exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .approx import ParamSchedule
from .errors import InvalidInputError, PreconditionError, ResourceLimitError
from .halfspace import (
    Halfspace,
    SortedHalfspace,
    all_sign_vectors,
    check_geometric_decay,
    critical_index,
    decompose,
    evaluate_many,
    normalize,
    separated_indices,
    sort_weights,
)
from .kwise import KWiseSpace, enumerate_support

EXACT_N_LIMIT = 30
HEAD_ENUM_LIMIT = 24


# ---------------------------------------------------------------------------
# exact biases


@dataclass(frozen=True)
class BiasReport:
    """Exact count of +1 outcomes; ``bias`` is E[h] as a rational."""

    plus_count: int
    total: int
    distribution_tag: str

    @property
    def bias(self) -> Fraction:
        return Fraction(2 * self.plus_count - self.total, self.total)

    @property
    def prob_plus(self) -> Fraction:
        return Fraction(self.plus_count, self.total)


def _cube_sign_blocks(n: int, chunk_bits: int = 16):
    if n <= chunk_bits:
        yield all_sign_vectors(n)
        return
    lows = all_sign_vectors(chunk_bits)
    for hi in range(1 << (n - chunk_bits)):
        his = np.array(
            [1.0 - 2.0 * ((hi >> j) & 1) for j in range(n - chunk_bits)],
            dtype=np.float64,
        )
        block = np.empty((lows.shape[0], n), dtype=np.float64)
        block[:, :chunk_bits] = lows
        block[:, chunk_bits:] = his
        yield block


def exact_bias(h: Halfspace) -> BiasReport:
    """E_U[h] by exhaustive integer counting over all 2^n points."""
    if h.n > EXACT_N_LIMIT:
        raise ResourceLimitError(
            f"n={h.n} exceeds the exact-enumeration guard ({EXACT_N_LIMIT}); "
            "use Monte Carlo sampling instead"
        )
    plus = 0
    for X in _cube_sign_blocks(h.n):
        plus += int(np.count_nonzero(evaluate_many(h, X) == 1))
    return BiasReport(plus_count=plus, total=1 << h.n, distribution_tag="uniform")


def bias_under_space(h: Halfspace, space: KWiseSpace) -> BiasReport:
    """E_D[h], weighting support points by seed multiplicity."""
    if space.n != h.n:
        raise InvalidInputError("space dimension does not match halfspace")
    plus = 0
    for block in enumerate_support(space):
        plus += int(np.count_nonzero(evaluate_many(h, block.astype(np.float64)) == 1))
    return BiasReport(
        plus_count=plus,
        total=1 << space.s,
        distribution_tag=f"kwise(n={space.n},k={space.k},s={space.s})",
    )


def fooling_error(h: Halfspace, space: KWiseSpace) -> Fraction:
    """|E_D[h] - E_U[h]| as an exact rational."""
    return abs(bias_under_space(h, space).bias - exact_bias(h).bias)


@dataclass(frozen=True)
class CountReport:
    estimate: Fraction
    exact: Fraction | None
    realized_error: Fraction | None


def approx_count(h: Halfspace, space: KWiseSpace) -> CountReport:
    """Deterministic estimate of Pr_U[h = 1] from the space's point set."""
    est = bias_under_space(h, space).prob_plus
    exact = None
    err = None
    if h.n <= EXACT_N_LIMIT:
        exact = exact_bias(h).prob_plus
        err = abs(est - exact)
    return CountReport(estimate=est, exact=exact, realized_error=err)


# ---------------------------------------------------------------------------
# influence and Chow parameters


def _flip_influence_direct(h: Halfspace, i: int) -> Fraction:
    """Pr[h(x) != h(x with coordinate i negated)], exhaustively."""
    flips = 0
    for X in _cube_sign_blocks(h.n):
        hv = evaluate_many(h, X)
        Xf = X.copy()
        Xf[:, i] = -Xf[:, i]
        flips += int(np.count_nonzero(hv != evaluate_many(h, Xf)))
    return Fraction(flips, 1 << h.n)


def _influence_halfspace(h: Halfspace, i: int) -> Halfspace:
    """The halfspace whose bias equals the influence of coordinate i.

    Built as sign(sum_{j != i} w_j y_j - theta y_i + |w_i|).  The absolute
    value makes the identity hold for negative weights too (influence is
    invariant under negating a coordinate, the raw identity is not).  With
    ties Pr[sum_{j != i} w_j y_j = |w_i| + theta] the two sides differ by
    exactly that probability; generic real weights have none.
    """
    w = h.weights.copy()
    v = abs(float(w[i]))
    w[i] = -h.theta
    return Halfspace(w, -v)


def influence(
    h: Halfspace,
    i: int,
    method: str = "direct",
    space: KWiseSpace | None = None,
) -> Fraction:
    """Influence of coordinate i (0-based), as an exact rational in [0, 1].

    ``direct`` counts flips; ``halfspace_identity`` takes the exact bias of
    the associated halfspace; ``via_space`` estimates that bias under a
    k-wise space.  The first two agree exactly in the absence of ties.
    """
    if not 0 <= i < h.n:
        raise InvalidInputError(f"coordinate {i} out of range")
    if method == "direct":
        return _flip_influence_direct(h, i)
    if method == "halfspace_identity":
        return exact_bias(_influence_halfspace(h, i)).bias
    if method == "via_space":
        if space is None:
            raise InvalidInputError("via_space needs a space")
        return bias_under_space(_influence_halfspace(h, i), space).bias
    raise InvalidInputError(f"unknown influence method {method!r}")


def chow_parameters(
    h: Halfspace, method: str = "exact", space: KWiseSpace | None = None
) -> tuple[Fraction, ...]:
    """(E[h], E[h x_1], ..., E[h x_n]) as exact rationals.

    These are the level-0 and level-1 Fourier coefficients; they determine
    the halfspace uniquely.
    """
    if method == "exact":
        if h.n > EXACT_N_LIMIT:
            raise ResourceLimitError("exact Chow parameters capped at n=30")
        blocks = _cube_sign_blocks(h.n)
        total = 1 << h.n
    elif method == "via_space":
        if space is None:
            raise InvalidInputError("via_space needs a space")
        blocks = (b.astype(np.float64) for b in enumerate_support(space))
        total = 1 << space.s
    else:
        raise InvalidInputError(f"unknown chow method {method!r}")
    sums = np.zeros(h.n + 1, dtype=np.int64)
    for X in blocks:
        hv = evaluate_many(h, X).astype(np.int64)
        sums[0] += int(hv.sum())
        sums[1:] += (hv[None, :] @ X.astype(np.int64)).ravel()
    return tuple(Fraction(int(s), total) for s in sums)


# ---------------------------------------------------------------------------
# halfspace families


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for a test halfspace; generated instances are normalized."""

    name: str
    n: int
    params: dict = field(default_factory=dict)
    rng_seed: int | None = None


def family(spec: FamilySpec) -> Halfspace:
    """Instantiate a named family.

    majority: equal weights 1/sqrt(n); geometric(rho): w_i proportional to
    rho^i; exponential: w_i proportional to 2^(n-i) (the regime where
    integer representations need exponentially large weights);
    gaussian_random: Philox-seeded normal weights, normalized.
    """
    n = spec.n
    if n < 1:
        raise InvalidInputError("family dimension must be positive")
    theta = float(spec.params.get("theta", 0.0))
    if spec.name == "majority":
        w = np.ones(n)
    elif spec.name == "geometric":
        rho = float(spec.params.get("rho", 0.5))
        if rho <= 0:
            raise InvalidInputError("geometric family needs rho > 0")
        w = rho ** np.arange(1, n + 1, dtype=np.float64)
    elif spec.name == "exponential":
        w = 2.0 ** (n - np.arange(1, n + 1, dtype=np.float64))
    elif spec.name == "gaussian_random":
        seed = spec.rng_seed if spec.rng_seed is not None else 0
        gen = np.random.Generator(np.random.Philox(key=seed))
        w = gen.normal(size=n)
        if not np.any(w):
            w = np.ones(n)
    else:
        raise InvalidInputError(f"unknown family {spec.name!r}")
    return normalize(Halfspace(w, theta))


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    family: str
    n: int
    k: int
    s: int
    bias_uniform: Fraction
    bias_space: Fraction
    fooling_error_exact: Fraction
    fooling_error_float: float


CSV_COLUMNS = (
    "family,n,k,s,bias_uniform,bias_space,fooling_error_exact,fooling_error_float"
)


def sweep(
    h_family: FamilySpec,
    k_range,
    eps_grid=(),
) -> tuple[list[SweepRow], dict[float, int | None]]:
    """Fooling error of one family across independence levels.

    Returns the rows in the order of ``k_range`` plus, for each eps in
    ``eps_grid``, the smallest swept k whose error is at most eps (None if
    no swept k achieves it).
    """
    from .kwise import build_space

    h = family(h_family)
    base = exact_bias(h)
    rows = []
    for k in k_range:
        space = build_space(h.n, int(k))
        rep = bias_under_space(h, space)
        err = abs(rep.bias - base.bias)
        rows.append(
            SweepRow(
                family=h_family.name,
                n=h.n,
                k=int(k),
                s=space.s,
                bias_uniform=base.bias,
                bias_space=rep.bias,
                fooling_error_exact=err,
                fooling_error_float=float(err),
            )
        )
    tradeoff: dict[float, int | None] = {}
    for eps in eps_grid:
        hit = None
        for row in sorted(rows, key=lambda r: r.k):
            if row.fooling_error_exact <= Fraction(eps).limit_denominator(10**9):
                hit = row.k
                break
        tradeoff[float(eps)] = hit
    return rows, tradeoff


def sweep_rows_to_csv(rows) -> str:
    """Render sweep rows with exact rationals; byte-stable across runs."""
    lines = [CSV_COLUMNS]
    for r in rows:
        lines.append(
            f"{r.family},{r.n},{r.k},{r.s},"
            f"{r.bias_uniform},{r.bias_space},"
            f"{r.fooling_error_exact},{r.fooling_error_float!r}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the large-critical-index experiment


@dataclass(frozen=True)
class LargeCritReport:
    """Measurements for halfspaces whose critical index exceeds the head.

    The head assignment is "bad" when the residual threshold lands within
    a quarter reference weight of zero; separation of the picked head
    coordinates makes that rare.  For good assignments the tail sum rarely
    reaches the residual threshold: exponentially rarely under uniform
    (Hoeffding) and quadratically rarely under any pairwise-independent
    projection (Chebyshev).
    """

    skipped: bool
    skip_reason: str | None
    eps: float = math.nan
    head_size: int = 0
    tail_size: int = 0
    crit_index: float = math.nan
    L: int = 0
    separated: tuple = ()
    sep_reference_index: int = 0
    w_ref: float = math.nan
    bad_event_freq: Fraction | None = None
    bad_event_bound: float = math.nan
    bad_event_ok: bool = False
    separation_theory_bound: float = math.nan
    separation_sufficient: bool = False
    sigma_tail: float = math.nan
    claim_sep_norm_ok: bool = False
    tail_threshold: float = math.nan
    hoeffding_measured: Fraction | None = None
    hoeffding_bound: float = math.nan
    hoeffding_ok: bool = False
    chebyshev_measured_max: Fraction | None = None
    chebyshev_bound: float = math.nan
    chebyshev_ok: bool = False
    uniform_flip_max: Fraction | None = None
    space_flip_max: Fraction | None = None
    head_marginal_uniform: bool | None = None
    independence_sufficient: bool = False
    fooling_error_exact: Fraction | None = None
    decay_passed: bool = False


def large_crit_experiment(
    h: Halfspace,
    sched: ParamSchedule,
    space: KWiseSpace,
    head_size: int | None = None,
) -> LargeCritReport:
    """Measure the head-determines-value phenomenon exhaustively.

    Enumerates all head assignments, counting how often the residual
    threshold theta' = theta - sum_H w_i x_i comes within w_ref/4 of zero
    (the bad event), then measures tail-tilt probabilities at the
    sigma_T/(4 eps) threshold under the uniform distribution and under the
    space's conditional projections, comparing against the Hoeffding and
    Chebyshev bound statements.  ``head_size`` overrides the schedule's
    head length (diagnostic use; the default follows the decomposition).
    Precondition violations return a skip record instead of raising.
    """
    eps = sched.eps
    hs = normalize(h)
    sh = sort_weights(hs)
    n = sh.n
    dec = decompose(sh, eps, sched)

    if head_size is None:
        if dec.crit_index <= dec.L:
            return LargeCritReport(
                skipped=True,
                skip_reason=(
                    f"critical index {dec.crit_index} is not beyond L={dec.L}; "
                    "the small-critical-index regime applies"
                ),
            )
        head_count = min(dec.L, n)
    else:
        head_count = min(int(head_size), n)
    if head_count > HEAD_ENUM_LIMIT:
        return LargeCritReport(
            skipped=True,
            skip_reason=f"head size {head_count} exceeds the enumeration guard "
            f"({HEAD_ENUM_LIMIT})",
        )
    if space.n != n:
        return LargeCritReport(
            skipped=True, skip_reason="space dimension does not match halfspace"
        )

    w = sh.weights
    theta = sh.theta
    head_idx = np.arange(head_count)
    tail_idx = np.arange(head_count, n)
    tail_size = n - head_count

    sep = [k for k in separated_indices(n, eps, sched.t_sep, sched.sep_step) if k <= head_count]
    ref_idx = min(1 + len(sep) * sched.sep_step, head_count)
    w_ref = abs(float(w[ref_idx - 1]))

    sigma_tail = float(np.sqrt(np.sum(w[tail_idx] ** 2))) if tail_size else 0.0
    tail_threshold = sigma_tail / (4.0 * eps)
    claim_ok = sigma_tail < eps * w_ref or (tail_size == 0)

    # head enumeration: residual thresholds for all 2^|H| assignments
    H = all_sign_vectors(head_count)
    theta_res = theta - H @ w[head_idx]
    bad_mask = np.abs(theta_res) <= w_ref / 4.0
    bad_freq = Fraction(int(np.count_nonzero(bad_mask)), len(theta_res))
    bad_bound = eps / 10.0
    sep_bound = 2.0 ** (-len(sep)) if sep else 1.0

    # uniform tail side
    hoeff_bound = 2.0 * math.exp(-1.0 / (32.0 * eps * eps))
    if tail_size == 0:
        hoeff_measured = Fraction(0)
        uniform_flip_max = Fraction(0)
    else:
        T = all_sign_vectors(tail_size)
        tail_sums = np.sort(T @ w[tail_idx])
        total_t = len(tail_sums)
        exceed = int(np.count_nonzero(np.abs(tail_sums) >= tail_threshold))
        hoeff_measured = Fraction(exceed, total_t)
        # actual sign flips against -sign(theta') for good assignments
        good_res = theta_res[~bad_mask]
        flips_max = Fraction(0)
        if good_res.size:
            pos = good_res[good_res > 0]
            neg = good_res[good_res <= 0]
            worst = 0
            if pos.size:
                # flip iff tail_sum >= theta' (sign(0)=+1 favors flip at ties)
                cnt = total_t - np.searchsorted(tail_sums, pos, side="left")
                worst = max(worst, int(cnt.max()))
            if neg.size:
                cnt = np.searchsorted(tail_sums, neg, side="left")
                worst = max(worst, int(cnt.max()))
            flips_max = Fraction(worst, total_t)
        uniform_flip_max = flips_max

    # space side: conditional tail behaviour per occurring head pattern
    cheb_bound = 16.0 * eps * eps
    cheb_measured = None
    space_flip_max = None
    head_uniform = None
    if space.s <= 26:
        pts = np.concatenate(list(enumerate_support(space)), axis=0).astype(np.float64)
        codes = (
            ((1 - pts[:, head_idx].astype(np.int64)) // 2)
            @ (1 << np.arange(head_count - 1, -1, -1, dtype=np.int64))
        )
        res_seed = theta - pts[:, head_idx] @ w[head_idx]
        good_seed = np.abs(res_seed) > w_ref / 4.0
        if tail_size:
            tails = pts[:, tail_idx] @ w[tail_idx]
        else:
            tails = np.zeros(len(pts))
        exceed_seed = np.abs(tails) >= tail_threshold if tail_size else np.zeros(len(pts), bool)
        flip_seed = np.where(
            res_seed > 0, tails >= res_seed, tails < res_seed
        ) if tail_size else np.zeros(len(pts), bool)

        uniq, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
        exceed_counts = np.bincount(inverse, weights=exceed_seed.astype(np.float64))
        flip_counts = np.bincount(inverse, weights=flip_seed.astype(np.float64))
        good_pattern = np.bincount(inverse, weights=good_seed.astype(np.float64)) > 0

        head_uniform = bool(
            len(uniq) == min(1 << head_count, 1 << space.s)
            and np.all(counts == counts[0])
        )
        if np.any(good_pattern):
            if tail_size:
                sel = good_pattern
                worst_i = int(np.argmax(exceed_counts[sel] / counts[sel]))
                gsel = np.nonzero(sel)[0]
                gi = gsel[worst_i]
                cheb_measured = Fraction(int(exceed_counts[gi]), int(counts[gi]))
                wf = int(np.argmax(flip_counts[sel] / counts[sel]))
                gf = gsel[wf]
                space_flip_max = Fraction(int(flip_counts[gf]), int(counts[gf]))
            else:
                cheb_measured = Fraction(0)
                space_flip_max = Fraction(0)
        else:
            cheb_measured = Fraction(0)
            space_flip_max = Fraction(0)

    # realized fooling error, when exact enumeration is feasible
    ferr = None
    if n <= EXACT_N_LIMIT and space.s <= 26:
        ferr = fooling_error(hs, space)

    decay = check_geometric_decay(sh, eps, sched)

    return LargeCritReport(
        skipped=False,
        skip_reason=None,
        eps=eps,
        head_size=head_count,
        tail_size=tail_size,
        crit_index=dec.crit_index,
        L=dec.L,
        separated=tuple(sep),
        sep_reference_index=ref_idx,
        w_ref=w_ref,
        bad_event_freq=bad_freq,
        bad_event_bound=bad_bound,
        bad_event_ok=bad_freq <= Fraction(bad_bound).limit_denominator(10**12),
        separation_theory_bound=sep_bound,
        separation_sufficient=sep_bound <= bad_bound,
        sigma_tail=sigma_tail,
        claim_sep_norm_ok=bool(claim_ok),
        tail_threshold=tail_threshold,
        hoeffding_measured=hoeff_measured,
        hoeffding_bound=hoeff_bound,
        hoeffding_ok=float(hoeff_measured) <= hoeff_bound,
        chebyshev_measured_max=cheb_measured,
        chebyshev_bound=cheb_bound,
        chebyshev_ok=(cheb_measured is None or float(cheb_measured) <= cheb_bound),
        uniform_flip_max=uniform_flip_max,
        space_flip_max=space_flip_max,
        head_marginal_uniform=head_uniform,
        independence_sufficient=space.k >= min(head_count + 2, space.n),
        fooling_error_exact=ferr,
        decay_passed=decay.passed,
    )
