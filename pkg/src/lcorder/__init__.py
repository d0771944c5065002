"""Relative log-concavity of pmfs and the divergence inequalities it implies.

The package builds (possibly truncated) pmfs on the non-negative integers,
decides the relative log-concavity pre-order ``f <=_lc g`` and checks the
relative-entropy inequalities that follow from it, returning three-state
verdicts with explicit error bounds. A small continuous module covers
weighted sums of gamma variables on a quadrature grid.
"""

from .pmf import (
    DEFAULT_EPS_TRUNC,
    DomainError,
    FamilySpec,
    Pmf,
    bernoulli,
    bernoulli_sum,
    binomial,
    convolve,
    explicit,
    from_json,
    geometric,
    geometric_sum,
    mean,
    negbinomial,
    poisson,
    random_lc_majorant,
    random_lc_minorant,
    realize,
    tilt_to_mean,
    variance,
)
from .lc_order import LcReport, is_log_concave, is_ulc, is_ulc_order_k, lc_le, sign_profile
from .divergence import DivergenceValue, ehm_bound, entropy, kl, total_variation
from .inequalities import (
    HOLDS,
    INCONCLUSIVE,
    VIOLATED,
    Verdict,
    best_binomial,
    best_negbinomial,
    check_choi_xia,
    check_concave_dominance,
    check_convolution_closure,
    check_iprojection,
    check_maxent,
    check_monotone_limit,
    check_quadrangle,
    check_triangle,
    fuzz_open_problem,
    karlin_partial_sums,
)
from .continuous import (
    GridPdf,
    check_gamma_minentropy,
    check_gamma_triangle,
    differential_entropy,
    kl_continuous,
    lc_le_continuous,
    pdf_gamma,
    weighted_gamma_sum,
)

__version__ = "0.1.0"
