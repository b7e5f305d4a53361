"""Pseudorandom generators for halfspaces via bounded independence.

Any k-wise independent distribution on the cube fools every halfspace once
k grows like log^2(1/eps)/eps^2; this package builds the explicit sample
spaces, the minimax sign approximations and sandwiching polynomials behind
that fact, the critical-index decomposition for non-regular halfspaces, and
exact exhaustive harnesses that measure fooling error and derandomize
bias, influence, Chow-parameter, and counting estimation.
"""

from .approx import (
    EMPIRICAL_C,
    EMPIRICAL_SMALL_C,
    THEOREM_C,
    THEOREM_SMALL_C,
    ErrorCertificate,
    ParamSchedule,
    PPropertyReport,
    SignApprox,
    UpperApprox,
    amplifier,
    amplifier_exact,
    build_P,
    certificate_at_budget,
    certify_error,
    check_P_properties,
    eval_poly,
    ramp_modulus,
    remez_best_sign_approx,
    schedule,
    weighted_remez,
)
from .chebpoly import UniPoly, decimal_str_to_mpf, mpf_to_decimal_str
from .errors import (
    CertificateFailedError,
    HsprgError,
    InvalidConfigError,
    InvalidInputError,
    NumericalFailureError,
    PreconditionError,
    ResourceLimitError,
)
from .fooling import (
    BiasReport,
    CountReport,
    FamilySpec,
    LargeCritReport,
    SweepRow,
    approx_count,
    bias_under_space,
    chow_parameters,
    exact_bias,
    family,
    fooling_error,
    influence,
    large_crit_experiment,
    sweep,
    sweep_rows_to_csv,
)
from .halfspace import (
    INFINITE_INDEX,
    DecayReport,
    DecompositionReport,
    Halfspace,
    SortedHalfspace,
    all_sign_vectors,
    check_geometric_decay,
    critical_index,
    decompose,
    evaluate,
    evaluate_many,
    min_pairwise_gap,
    normalize,
    separated_indices,
    sort_weights,
    tail_norm,
)
from .kwise import (
    KWiseReport,
    KWiseSpace,
    build_space,
    enumerate_support,
    min_irreducible_poly,
    sample,
    support_array,
    verify_kwise,
)
from .sandwich import (
    CompositionSide,
    GapReport,
    PointwiseReport,
    SandwichPair,
    build_sandwich,
    expected_gap,
    verify_pointwise,
)

__version__ = "0.1.0"
