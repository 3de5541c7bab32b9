"""Simultaneous Diophantine approximations of pairs in a cubic field with
one real embedding: power sequences of a unit, constructed constants, and
certified Littlewood-product bounds along a convergent subsequence."""

from .contfrac import ContinuedFraction, expand, expand_past_denominator
from .engine import (
    ConstantsBundle,
    EllipsePoint,
    LittlewoodRow,
    PeckCertificate,
    PeckRun,
    PowerRecord,
    PsiRow,
    SequenceSpec,
    TargetPair,
    constants,
    digit_count,
    ellipse_points,
    generate,
    littlewood_row,
    phi,
    phi_over_pi_source,
    power_record,
    psi_table,
    rational_case,
    rational_case_for_pair,
)
from .field import (
    AffineMap,
    CubicParams,
    EmbeddingTriple,
    FieldElement,
    depress,
    embeddings,
    identity_check,
)
from .realctx import (
    CertifiedReal,
    RealCtx,
    certify,
    mod1,
    mod1_exact,
    real_root,
)
from .stats import (
    NAMED_PAIRS,
    HeuristicConfig,
    count_U,
    count_V,
    estimate_F,
    estimate_G,
    m_C,
    quadrature_F,
)
from .units import UnitCandidate, log_ratio, normalize, search

__all__ = [
    "AffineMap",
    "CertifiedReal",
    "ConstantsBundle",
    "ContinuedFraction",
    "CubicParams",
    "EllipsePoint",
    "EmbeddingTriple",
    "FieldElement",
    "HeuristicConfig",
    "LittlewoodRow",
    "NAMED_PAIRS",
    "PeckCertificate",
    "PeckRun",
    "PowerRecord",
    "PsiRow",
    "RealCtx",
    "SequenceSpec",
    "TargetPair",
    "UnitCandidate",
    "certify",
    "constants",
    "count_U",
    "count_V",
    "depress",
    "digit_count",
    "ellipse_points",
    "embeddings",
    "estimate_F",
    "estimate_G",
    "expand",
    "expand_past_denominator",
    "generate",
    "identity_check",
    "littlewood_row",
    "log_ratio",
    "m_C",
    "mod1",
    "mod1_exact",
    "normalize",
    "phi",
    "phi_over_pi_source",
    "power_record",
    "psi_table",
    "quadrature_F",
    "rational_case",
    "rational_case_for_pair",
    "real_root",
    "search",
    "__version__",
]

__version__ = "0.1.0"
