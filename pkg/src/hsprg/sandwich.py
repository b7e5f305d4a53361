"""Sandwiching polynomials for regular halfspaces.

Given the one-sided univariate approximator P (which dominates sign
everywhere), a halfspace h(x) = sign(w.x - theta) is squeezed between two
multivariate polynomials obtained by composing P with the scaled margin
(w.x - theta)/Z.  The composition is never expanded into monomials: a side
is stored as (polynomial, affine form, scale, orientation) and evaluated
through that record, so the multilinear degree is deg(P) by bookkeeping.

Branches by threshold magnitude:

* |theta| <= Z/4: upper P((w.x - theta)/Z), lower -P((theta - w.x)/Z);
* theta  >  Z/4: upper P((w.x - Z/4)/Z), lower the constant -1 (the
  halfspace is nearly always -1);
* theta  < -Z/4: the mirror image through the negated halfspace
  sign(-w.x + theta): upper the constant +1, lower -P((-w.x - Z/4)/Z).

The expected sandwich gaps under the uniform distribution certify fooling;
their quantitative bounds hold only with theorem-grade constants, so in
empirical mode they are reported as diagnostics while non-negativity (a
pointwise fact) is always asserted.

Evaluation is pure; exhaustive sums run over point ranges in a fixed order,
so results are deterministic and range partitions merge cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .approx import ParamSchedule, UpperApprox
from .chebpoly import UniPoly
from .errors import InvalidInputError, PreconditionError, ResourceLimitError
from .halfspace import Halfspace, all_sign_vectors, evaluate_many

EXHAUSTIVE_N_LIMIT = 24


@dataclass(frozen=True)
class CompositionSide:
    """One side of a sandwich: orientation * P((weights . x + offset)/scale).

    A constant side stores only ``constant`` and evaluates to it everywhere.
    """

    poly: UniPoly | None
    weights: np.ndarray | None
    offset: float
    scale: float
    negate: bool
    constant: float | None = None

    def __post_init__(self):
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64).copy()
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def arguments(self, X: np.ndarray) -> np.ndarray:
        return (X @ self.weights + self.offset) / self.scale

    def eval_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate at the rows of X (float path)."""
        X = np.asarray(X, dtype=np.float64)
        if self.is_constant:
            return np.full(X.shape[0], self.constant, dtype=np.float64)
        vals = self.poly.eval_float(self.arguments(X))
        return -vals if self.negate else vals

    def structure(self) -> tuple:
        """Hashable record of the composition, for structural comparisons."""
        if self.is_constant:
            return ("const", self.constant)
        return (
            "comp",
            tuple(float(c) for c in self.poly.coeffs),
            tuple(self.weights.tolist()),
            self.offset,
            self.scale,
            self.negate,
        )


@dataclass(frozen=True)
class SandwichPair:
    """upper(x) >= h(x) >= lower(x) at every cube point."""

    upper: CompositionSide
    lower: CompositionSide
    branch: str  # "small_theta" | "large_theta"
    mirrored: bool
    h: Halfspace
    eps: float
    Z: float
    K: int
    mode: str = "empirical"

    @property
    def multilinear_degree(self) -> int:
        """Composition with an affine form cannot exceed deg(P)."""
        for side in (self.upper, self.lower):
            if not side.is_constant:
                return side.poly.degree
        return 0


def build_sandwich(
    h: Halfspace,
    P: UpperApprox,
    sched: ParamSchedule,
    tau: float | None = None,
) -> SandwichPair:
    """Sandwich a regular halfspace between compositions of P.

    ``tau`` overrides the regularity level enforced on h (default: the
    schedule's eps).  Pointwise validity of the sandwich only needs the
    one-sided properties of P; regularity governs the size of the expected
    gaps, so relaxing tau is safe for validity experiments.
    """
    from .halfspace import critical_index, sort_weights

    if not h.is_normalized:
        raise PreconditionError("halfspace must be normalized")
    level = sched.eps if tau is None else tau
    if critical_index(sort_weights(h), level) != 1:
        raise PreconditionError(
            f"halfspace is not {level}-regular (some |w_i| > {level})"
        )
    if abs(P.eps - sched.eps) > 1e-12:
        raise PreconditionError("P was built for a different eps")
    Z = sched.Z
    theta = h.theta
    w = h.weights
    if abs(theta) <= Z / 4.0:
        upper = CompositionSide(P.P, w, -theta, Z, negate=False)
        lower = CompositionSide(P.P, -w, theta, Z, negate=True)
        branch, mirrored = "small_theta", False
    elif theta > Z / 4.0:
        upper = CompositionSide(P.P, w, -Z / 4.0, Z, negate=False)
        lower = CompositionSide(None, None, 0.0, 1.0, negate=False, constant=-1.0)
        branch, mirrored = "large_theta", False
    else:
        # theta < -Z/4: sandwich the negated halfspace sign(-w.x + theta)
        # and flip; its constant lower becomes our constant upper
        upper = CompositionSide(None, None, 0.0, 1.0, negate=False, constant=1.0)
        lower = CompositionSide(P.P, -w, -Z / 4.0, Z, negate=True)
        branch, mirrored = "large_theta", True
    return SandwichPair(
        upper=upper,
        lower=lower,
        branch=branch,
        mirrored=mirrored,
        h=h,
        eps=sched.eps,
        Z=Z,
        K=P.K,
        mode=sched.mode,
    )


@dataclass(frozen=True)
class PointwiseReport:
    min_upper_margin: float
    min_lower_margin: float
    argmin_upper: tuple | None
    argmin_lower: tuple | None
    points_checked: int
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.min_upper_margin >= -self.tol and self.min_lower_margin >= -self.tol
        )


def verify_pointwise(
    pair: SandwichPair,
    points: np.ndarray | None = None,
    tol: float = 1e-9,
    chunk: int = 1 << 16,
) -> PointwiseReport:
    """Check upper >= h >= lower at every cube point (or a supplied sample).

    The eps^2 slack inside P makes true violations structurally impossible;
    the tolerance only absorbs float evaluation noise.
    """
    n = pair.h.n
    if points is None:
        if n > EXHAUSTIVE_N_LIMIT:
            raise ResourceLimitError(
                f"exhaustive check capped at n={EXHAUSTIVE_N_LIMIT}; pass points"
            )
        blocks = _cube_blocks(n, chunk)
    else:
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != n:
            raise InvalidInputError("points must be an (m, n) array")
        blocks = [pts]

    min_u, min_l = math.inf, math.inf
    arg_u = arg_l = None
    count = 0
    for X in blocks:
        hv = evaluate_many(pair.h, X).astype(np.float64)
        uv = pair.upper.eval_many(X)
        lv = pair.lower.eval_many(X)
        mu = uv - hv
        ml = hv - lv
        iu = int(np.argmin(mu))
        il = int(np.argmin(ml))
        if mu[iu] < min_u:
            min_u, arg_u = float(mu[iu]), tuple(int(v) for v in X[iu])
        if ml[il] < min_l:
            min_l, arg_l = float(ml[il]), tuple(int(v) for v in X[il])
        count += X.shape[0]
    return PointwiseReport(
        min_upper_margin=min_u,
        min_lower_margin=min_l,
        argmin_upper=arg_u,
        argmin_lower=arg_l,
        points_checked=count,
        tol=tol,
    )


def _cube_blocks(n: int, chunk: int):
    total = 1 << n
    if total <= chunk:
        yield all_sign_vectors(n)
        return
    lows = all_sign_vectors(int(math.log2(chunk)))
    high_bits = n - int(math.log2(chunk))
    for hi in range(1 << high_bits):
        his = np.array(
            [1.0 - 2.0 * ((hi >> j) & 1) for j in range(high_bits)], dtype=np.float64
        )
        block = np.empty((chunk, n), dtype=np.float64)
        block[:, : lows.shape[1]] = lows
        block[:, lows.shape[1] :] = his
        yield block


@dataclass(frozen=True)
class GapReport:
    branch: str
    gap_u: float
    gap_l: float
    bound_u: float
    bound_l: float
    bound_label: str
    mode: str
    samples: int
    ci_u: float | None
    ci_l: float | None

    @property
    def bound_value(self) -> float:
        return self.bound_u

    @property
    def within_bounds(self) -> bool:
        """Whether the measured gaps satisfy the quoted bounds.

        Guaranteed only with theorem-grade constants; diagnostic otherwise.
        """
        return self.gap_u <= self.bound_u and self.gap_l <= self.bound_l

    def to_json(self) -> dict:
        out = {
            "branch": self.branch,
            "gap_u": repr(self.gap_u),
            "gap_l": repr(self.gap_l),
            "bound_10eps": repr(self.bound_u),
            "mode": self.mode,
        }
        if self.ci_u is not None:
            out["ci"] = {"gap_u": repr(self.ci_u), "gap_l": repr(self.ci_l)}
        return out


def expected_gap(
    pair: SandwichPair,
    mode: str = "exhaustive",
    samples: int = 1 << 16,
    rng_seed: int = 0,
) -> GapReport:
    """E_U[upper - h] and E_U[h - lower], exhaustively or by Monte Carlo.

    Exhaustive sums run over cube blocks in a fixed order with compensated
    (exact fsum) accumulation.  Monte Carlo uses the Philox counter-based
    generator and reports 99% normal-approximation half-widths.  Both gaps
    are non-negative whenever the pair is pointwise valid; the quantitative
    bounds are diagnostics outside theorem mode.
    """
    n = pair.h.n
    bound_u, bound_l, label = _gap_bounds(pair)
    if mode == "exhaustive":
        if n > EXHAUSTIVE_N_LIMIT:
            raise ResourceLimitError("exhaustive gaps capped at n=24; use montecarlo")
        sum_u, sum_l = [], []
        total = 0
        for X in _cube_blocks(n, 1 << 16):
            hv = evaluate_many(pair.h, X).astype(np.float64)
            sum_u.append(math.fsum(pair.upper.eval_many(X) - hv))
            sum_l.append(math.fsum(hv - pair.lower.eval_many(X)))
            total += X.shape[0]
        report = GapReport(
            branch=pair.branch,
            gap_u=math.fsum(sum_u) / total,
            gap_l=math.fsum(sum_l) / total,
            bound_u=bound_u,
            bound_l=bound_l,
            bound_label=label,
            mode="exhaustive",
            samples=total,
            ci_u=None,
            ci_l=None,
        )
    elif mode == "montecarlo":
        gen = np.random.Generator(np.random.Philox(key=rng_seed))
        X = 1.0 - 2.0 * gen.integers(0, 2, size=(samples, n)).astype(np.float64)
        hv = evaluate_many(pair.h, X).astype(np.float64)
        du = pair.upper.eval_many(X) - hv
        dl = hv - pair.lower.eval_many(X)
        z99 = 2.5758293035489004
        report = GapReport(
            branch=pair.branch,
            gap_u=float(np.mean(du)),
            gap_l=float(np.mean(dl)),
            bound_u=bound_u,
            bound_l=bound_l,
            bound_label=label,
            mode="montecarlo",
            samples=samples,
            ci_u=float(z99 * np.std(du, ddof=1) / math.sqrt(samples)),
            ci_l=float(z99 * np.std(dl, ddof=1) / math.sqrt(samples)),
        )
    else:
        raise InvalidInputError("mode must be exhaustive or montecarlo")
    # with theorem-grade constants the quoted bounds are guaranteed; a
    # violation there would falsify the construction
    if pair.mode == "theorem" and not report.within_bounds:
        raise PreconditionError(
            f"theorem-mode gaps ({report.gap_u:.3g}, {report.gap_l:.3g}) exceed "
            f"their bounds ({bound_u:.3g}, {bound_l:.3g})"
        )
    return report


def _gap_bounds(pair: SandwichPair) -> tuple[float, float, str]:
    eps = pair.eps
    if pair.branch == "small_theta":
        return (10.0 * eps, 10.0 * eps, "10*eps")
    # large theta: 12 eps on the composed side, 2 eps on the constant side
    if not pair.mirrored:
        return (12.0 * eps, 2.0 * eps, "12*eps (upper), 2*eps (lower)")
    return (2.0 * eps, 12.0 * eps, "2*eps (upper), 12*eps (lower)")
