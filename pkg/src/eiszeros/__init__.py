"""Evaluation and rigorous zero localization for newform Eisenstein series
on Gamma0(q1*q2), with the supporting modular geometry and bound checks."""

__version__ = "0.1.0"

from .characters import (
    DirichletCharacter,
    ResidueGroupStructure,
    build_group,
    character,
    character_by_index,
    conductor,
    conjugate,
    crt_compose,
    crt_factor,
    enumerate_characters,
    evaluate,
    is_primitive,
    multiply,
    parity,
    principal_character,
)
from .errors import (
    BoundaryZeroError,
    CertificationError,
    EiszerosError,
    NewtonError,
    ParameterError,
    ScanError,
    ToleranceError,
    WindingError,
)
from .evaluation import (
    EisensteinParams,
    EvalOptions,
    HalfPlanePoint,
    LogComplex,
    delta_bound,
    eval_czd,
    eval_derivative,
    eval_fourier_normalized,
    fourier_coefficient,
    main_term_g,
    main_term_h,
    params_from_indices,
)
from .geometry import (
    CuspRegion,
    IntegerMatrix2x2,
    atkin_lehner_character_swap,
    atkin_lehner_matrix,
    cusp_region_disjoint,
    gamma0_equivalent,
    hecke_points,
    mobius_apply,
    reduce_to_fundamental_domain,
)
from .zerofinder import (
    PredictedZero,
    RectRegion,
    WindowConfig,
    ZeroRecord,
    build_windows,
    certify_line_zeros,
    certify_strip_zero,
    gap_line_zeros,
    predicted_line_zeros,
    refine_newton,
    rouche_margin,
    scan_zeros,
    strip_zero,
    winding_number,
)
from .diagnostics import (
    BoundReport,
    FittedConstants,
    check_bounds_section3,
    check_bounds_section4,
    check_lemma_functions,
    equidistribution_stats,
    incomplete_gamma_P,
    incomplete_gamma_Q,
    lemma_M,
    lemma_R,
    ratio_constancy,
    star_discrepancy,
)
