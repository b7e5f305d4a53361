"""Halfspace representation and structural analysis.

A halfspace is sign(w . x - theta) on the cube {-1,+1}^n with sign(0) = +1.
Weights are kept normalized to unit 2-norm, which never changes the decision
function.  The structural tools here: sorting by weight magnitude, tail
norms, the critical index (first position where the remaining weight vector
turns tau-regular), and the head / tail / separated-coordinate decomposition
used to fool non-regular halfspaces.

Index conventions: critical indices, tail-norm positions and the index sets
in reports are 1-based, matching the mathematical definitions (a halfspace
is tau-regular iff its critical index is 1).  Permutations are 0-based
numpy arrays, since they are pure plumbing.

All values are immutable after construction and every operation is a pure
function, so concurrent readers need no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .approx import ParamSchedule
from .errors import InvalidInputError, ResourceLimitError

INFINITE_INDEX = math.inf


def _as_weight_array(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise InvalidInputError("weights must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("weights must be finite")
    w = w.copy()
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class Halfspace:
    """sign(w . x - theta) on {-1,+1}^n, with sign(0) = +1."""

    weights: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weight_array(self.weights))
        if not math.isfinite(self.theta):
            raise InvalidInputError("theta must be finite")
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def is_constant(self) -> bool:
        """True when all weights vanish, so the value never depends on x."""
        return bool(np.all(self.weights == 0.0))

    @property
    def constant_value(self) -> int | None:
        if not self.is_constant:
            return None
        return 1 if -self.theta >= 0 else -1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.weights))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1.0) <= 1e-12

    def to_json(self) -> dict:
        return {"weights": [float(w) for w in self.weights], "theta": self.theta}

    @staticmethod
    def from_json(obj: dict) -> "Halfspace":
        return Halfspace(np.asarray(obj["weights"], dtype=np.float64), obj["theta"])


def normalize(h: Halfspace) -> Halfspace:
    """Rescale to unit weight norm; the decision function is unchanged.

    The all-zero weight vector is returned as-is: it represents the
    constant function sign(-theta), and downstream estimators accept it.
    Inputs already at unit norm (within 1e-12) come back unchanged, which
    makes normalization exactly idempotent.
    """
    if h.is_constant or h.is_normalized:
        return h
    s = h.norm
    return Halfspace(h.weights / s, h.theta / s)


def evaluate(h: Halfspace, x) -> int:
    """sign(w . x - theta) at a single cube point, sign(0) = +1."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (h.n,):
        raise InvalidInputError(f"point has shape {x.shape}, expected ({h.n},)")
    arg = float(np.dot(h.weights, x)) - h.theta
    return 1 if arg >= 0 else -1


def evaluate_many(h: Halfspace, X: np.ndarray) -> np.ndarray:
    """Vectorized evaluate over rows of X; returns an int8 array of +-1."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != h.n:
        raise InvalidInputError("points must be an (m, n) array")
    args = X @ h.weights - h.theta
    return np.where(args >= 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class SortedHalfspace:
    """A halfspace with weights reordered by decreasing magnitude.

    ``perm`` maps sorted position -> original position (0-based), with ties
    broken by original index so the sort is stable and reproducible.
    """

    base: Halfspace
    perm: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return self.base.weights

    @property
    def theta(self) -> float:
        return self.base.theta

    @property
    def n(self) -> int:
        return self.base.n

    @cached_property
    def tail_norms(self) -> np.ndarray:
        """sigma_k = sqrt(sum_{i >= k} w_i^2) for k = 1..n (0-indexed array).

        Computed by one backward cumulative sum, so queries are O(1).
        """
        sq = self.weights.astype(np.float64) ** 2
        back = np.sqrt(np.maximum(np.cumsum(sq[::-1])[::-1], 0.0))
        back.setflags(write=False)
        return back


def sort_weights(h: Halfspace) -> SortedHalfspace:
    """Stable sort by |w_i| descending; ties keep original order."""
    order = np.argsort(-np.abs(h.weights), kind="stable")
    sorted_h = Halfspace(h.weights[order], h.theta)
    perm = order.copy()
    perm.setflags(write=False)
    return SortedHalfspace(base=sorted_h, perm=perm)


def critical_index(sh: SortedHalfspace, tau: float) -> float:
    """Smallest 1-based i with |w_i| <= tau * sigma_i, or inf if none.

    The whole halfspace is tau-regular exactly when the result is 1.
    A zero tail norm makes the condition read |w_i| <= 0, i.e. w_i = 0.
    """
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    w = np.abs(sh.weights)
    sig = sh.tail_norms
    hits = np.nonzero(w <= tau * sig)[0]
    if hits.size == 0:
        return INFINITE_INDEX
    return int(hits[0]) + 1


def tail_norm(sh: SortedHalfspace, k: int) -> float:
    """sigma_k for 1-based k."""
    if not 1 <= k <= sh.n:
        raise InvalidInputError(f"k = {k} out of range [1, {sh.n}]")
    return float(sh.tail_norms[k - 1])


def separated_indices(n: int, eps: float, t_sep: int, sep_step: int) -> tuple[int, ...]:
    """The separated head coordinates k_i = 1 + i*step, i < t_sep, clipped to n.

    The step is the integer ceiling of (4/eps^2) log(1/eps); since indices
    are integers, j >= i + step is equivalent to the real-valued spacing
    requirement, preserving the factor-3 decay between consecutive picks.
    """
    out = []
    for i in range(t_sep):
        k = 1 + i * sep_step
        if k > n:
            break
        out.append(k)
    return tuple(out)


@dataclass(frozen=True)
class DecompositionReport:
    """Head/tail split and separated coordinates of a sorted halfspace.

    All index sets are 1-based.  ``sep_reference_index`` is the first
    separated position beyond the recorded ones (clipped to n); its weight
    is the separation scale used by the large-critical-index experiment.
    """

    tau: float
    crit_index: float
    sigma: tuple
    head: tuple
    tail: tuple
    separated: tuple
    sep_step: int
    sep_reference_index: int
    t_sep: int
    L: int
    head_covers_all: bool


def decompose(sh: SortedHalfspace, eps: float, sched: ParamSchedule) -> DecompositionReport:
    """Split coordinates into a head of the L(eps) largest weights and a tail.

    When L(eps) >= n the tail is empty and the report is flagged; at desk
    scales this is the common case, since L grows like 8 log^2(10/eps)/eps^2.
    """
    if abs(sched.eps - eps) > 1e-12:
        raise InvalidInputError("schedule was derived for a different eps")
    n = sh.n
    L = sched.L
    head_size = min(L, n)
    head = tuple(range(1, head_size + 1))
    tail = tuple(range(head_size + 1, n + 1))
    sep = separated_indices(n, eps, sched.t_sep, sched.sep_step)
    ref = min(1 + len(sep) * sched.sep_step, n)
    return DecompositionReport(
        tau=eps,
        crit_index=critical_index(sh, eps),
        sigma=tuple(float(s) for s in sh.tail_norms),
        head=head,
        tail=tail,
        separated=sep,
        sep_step=sched.sep_step,
        sep_reference_index=ref,
        t_sep=sched.t_sep,
        L=L,
        head_covers_all=L >= n,
    )


def min_pairwise_gap(values: np.ndarray) -> float:
    """Smallest gap between distinct subset-sign sums of the given weights.

    Exhaustive over all 2^len assignments; the separation claim for
    geometrically decaying weights promises a gap of at least the smallest
    weight magnitude.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size > 20:
        raise ResourceLimitError("exhaustive gap enumeration capped at 20 weights")
    signs = all_sign_vectors(v.size)
    sums = np.sort(signs @ v)
    return float(np.min(np.diff(sums)))


def all_sign_vectors(n: int) -> np.ndarray:
    """All 2^n sign vectors, row i encoding the bits of i (LSB = column 0)."""
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1
    return 1.0 - 2.0 * bits.astype(np.float64)


@dataclass(frozen=True)
class DecayReport:
    """Results of geometric-decay and separation checks up to the critical index."""

    eps: float
    crit_index: float
    pairs_checked: int
    sigma_violations: tuple
    third_violations: tuple
    separated: tuple
    separation_gap: float | None
    separation_threshold: float | None
    separation_checked: bool
    separation_skipped_reason: str | None

    @property
    def passed(self) -> bool:
        ok = not self.sigma_violations and not self.third_violations
        if self.separation_checked and self.separation_gap is not None:
            ok = ok and self.separation_gap >= self.separation_threshold - 1e-12
        return ok


def check_geometric_decay(
    sh: SortedHalfspace, eps: float, sched: ParamSchedule | None = None
) -> DecayReport:
    """Verify the decay of tail norms up to the critical index.

    For pairs 1 <= i < j <= min(ell, n) the tail norms must satisfy
    sigma_j < (1-eps^2)^((j-i)/2) sigma_i, and weights separated by at
    least (4/eps^2) log(1/eps) positions must drop by a factor 3; any
    violation there indicates an implementation bug.  At j = ell + 1 the
    defining inequality reverses (|w_ell| <= eps sigma_ell), so only the
    one-factor-weaker bound sigma_{ell+1} <= decay^(j-i-1) sigma_i is
    provable and that is what gets checked.  The separated coordinates are
    additionally checked exhaustively: any two distinct sign assignments to
    them produce sums at least the reference weight apart (skipped with a
    marker beyond 20 coordinates).
    """
    n = sh.n
    ell = critical_index(sh, eps)
    strict_top = n if ell == INFINITE_INDEX else min(int(ell), n)
    top = n if ell == INFINITE_INDEX else min(int(ell) + 1, n)
    sig = sh.tail_norms
    w = np.abs(sh.weights)
    decay = math.sqrt(max(1.0 - eps * eps, 0.0))
    sigma_viol = []
    third_viol = []
    pairs = 0
    step_needed = (4.0 / (eps * eps)) * math.log(1.0 / eps)
    for i in range(1, top + 1):
        for j in range(i + 1, top + 1):
            pairs += 1
            # exponent drops by one on the pair straddling the critical index
            expo = (j - i) if j <= strict_top else (j - i - 1)
            if not sig[j - 1] < decay**expo * sig[i - 1] + 1e-12:
                sigma_viol.append((i, j, float(sig[j - 1]), float(sig[i - 1])))
            if (
                j <= strict_top
                and j - i >= step_needed
                and not w[j - 1] <= w[i - 1] / 3.0 + 1e-12
            ):
                third_viol.append((i, j, float(w[j - 1]), float(w[i - 1])))

    if sched is not None:
        t_sep, sep_step = sched.t_sep, sched.sep_step
    else:
        t_sep = math.ceil(math.log(10.0 / eps))
        sep_step = math.ceil(step_needed)
    sep = separated_indices(n, eps, t_sep, sep_step)
    gap = None
    threshold = None
    checked = False
    reason = None
    if len(sep) > 20:
        reason = "separation check skipped: more than 20 separated coordinates"
    elif len(sep) == 0:
        reason = "separation check skipped: no separated coordinates fit"
    else:
        ref = min(1 + len(sep) * sep_step, n)
        threshold = float(w[ref - 1])
        gap = min_pairwise_gap(sh.weights[[k - 1 for k in sep]])
        checked = True
    return DecayReport(
        eps=eps,
        crit_index=ell,
        pairs_checked=pairs,
        sigma_violations=tuple(sigma_viol),
        third_violations=tuple(third_viol),
        separated=sep,
        separation_gap=gap,
        separation_threshold=threshold,
        separation_checked=checked,
        separation_skipped_reason=reason,
    )
