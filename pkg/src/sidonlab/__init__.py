"""Construction and verification lab for thin additive sets.

Sample random integer sets with power-law densities, count their additive
representations exactly, measure how many of those representations can be
made pairwise disjoint, and run the finite-deletion pipeline that turns a
sampled set into one with unique low-order representations while keeping
every large target reachable.  All randomness is counter-based and keyed by
(seed, trial), so each artifact is reproducible byte for byte.
"""

from .bounds import (
    DecayEstimate,
    ExponentTable,
    GChain,
    GrowthEstimate,
    Prop2Result,
    check_prop2,
    estimate_decay,
    estimate_growth,
    exponent,
    exponent_table,
    g_chain,
    geometric_bins,
    loglog_slope,
    tail_sum,
)
from .core import (
    BudgetExceededError,
    IntegerSet,
    InternalConsistencyError,
    Params,
    RepVector,
    SidonLabError,
    ValidationError,
    make_set,
    support,
)
from .manifest import ExperimentManifest, NondeterminismError, run_manifest
from .packing import (
    BStarVerdict,
    DisjointnessInstance,
    RepCatalog,
    RStarResult,
    enumerate_reps,
    is_Bstar_l_g,
    r_star,
)
from .pipeline import (
    BasisVerdict,
    GBoundVerdict,
    RepairReport,
    ThresholdNotFoundError,
    find_threshold,
    repair,
    reverify_report,
    verify_G_bound,
    verify_basis,
)
from .repfunc import (
    MembershipVerdict,
    RepProfile,
    brute_force_profile,
    count_nondecreasing,
    count_pairs_via_fft,
    count_strict,
    is_Bh_g,
    profile,
)
from .sampler import SampleSpec, expected_count, sample_many, sample_set

__version__ = "0.1.0"

__all__ = [
    "BStarVerdict",
    "BasisVerdict",
    "BudgetExceededError",
    "DecayEstimate",
    "DisjointnessInstance",
    "ExperimentManifest",
    "ExponentTable",
    "GBoundVerdict",
    "GChain",
    "GrowthEstimate",
    "IntegerSet",
    "InternalConsistencyError",
    "MembershipVerdict",
    "NondeterminismError",
    "Params",
    "Prop2Result",
    "RStarResult",
    "RepCatalog",
    "RepProfile",
    "RepVector",
    "RepairReport",
    "SampleSpec",
    "SidonLabError",
    "ThresholdNotFoundError",
    "ValidationError",
    "brute_force_profile",
    "check_prop2",
    "count_nondecreasing",
    "count_pairs_via_fft",
    "count_strict",
    "enumerate_reps",
    "estimate_decay",
    "estimate_growth",
    "expected_count",
    "exponent",
    "exponent_table",
    "find_threshold",
    "g_chain",
    "geometric_bins",
    "is_Bh_g",
    "is_Bstar_l_g",
    "loglog_slope",
    "make_set",
    "profile",
    "r_star",
    "repair",
    "reverify_report",
    "run_manifest",
    "sample_many",
    "sample_set",
    "support",
    "tail_sum",
    "verify_G_bound",
    "verify_basis",
]
