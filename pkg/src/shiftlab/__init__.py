"""shiftlab: exact-arithmetic laboratory for stability and quasistability
of shift-type operator dynamics on sequence spaces."""

from .core import (
    DoublingPropertyError,
    FinVec,
    PairVec,
    Rational,
    SparseIndexSet,
    basis,
    inner,
    inner_pair,
    j_interval,
    make_geometric_set,
    norm_sq,
    pairing,
)
from .operators import (
    COSHIFT,
    IDENTITY,
    SHIFT,
    ZERO_OP,
    Block2x2,
    Compose,
    DomainKindError,
    FiniteMatrix,
    Foguel,
    MatrixOp,
    NormConvergenceError,
    Power,
    Scale,
    SparseProjection,
    Sum,
    adjoint,
    apply,
    apply_adjoint,
    apply_power,
    gelfand_estimate,
    iterate_orbit,
    matrix_power_norm,
    pn_closed_form,
    pn_recursive,
    spectral_norm,
)
from .stability import (
    PairingSeries,
    StabilityVerdict,
    classify_weak,
    pairing_series,
    power_bounded_probe,
    series_family,
    strong_equivalence_check,
    tail_extrema,
    uniform_equivalence_check,
)
from .gaps import (
    CoverageError,
    IndexSubsequence,
    SubseqCertificate,
    find_bounded_gap_zero_subseq,
    gap_stats,
    translate_identity_check,
    strictly_increasing_gap_subsequence,
    transfer_convergence,
    translate_cover_check,
)
from .supercyclicity import (
    ProbeReport,
    alpha_boundedness_report,
    dichotomy_report,
    orbit_membership,
    projective_fit,
    quasistability_scan,
)
from .corpus import (
    seeded_contraction_corpus,
    seeded_random_corpus,
    seeded_stability_corpus,
)

__version__ = "0.1.0"
