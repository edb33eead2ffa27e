"""Numerics for Epstein zeta functions of positive definite binary quadratic forms.

The package evaluates E(s, Q) and its decomposition into Hecke L-functions over
the ideal class group of an imaginary quadratic field, counts zeros in vertical
strips by the argument principle, estimates Jensen functions and mean motions,
and cross-validates strip counts against the zero density predicted by a random
Euler-product model on the torus.
"""

from .quadforms import (
    QuadForm,
    ClassGroup,
    ClassCharacter,
    PrimeLocalData,
    EpsteinCoefficients,
    SplitType,
    reduce_form,
    build_class_group,
    characters,
    classify_prime,
    epstein_coefficients,
)
from .epstein import (
    EpsteinEvaluator,
    eval_fast,
    eval_lattice_oracle,
    eval_theta_oracle,
    check_functional_equation,
)
from .lfunc import (
    HeckeFamily,
    LSeries,
    TruncatedEuler,
    decomposition_residual,
    rep_count_oracle,
)
from .zeros import (
    Rectangle,
    ZeroRecord,
    StripCount,
    BoundaryZero,
    count_strip,
    domination_abscissa,
    find_near_period,
    find_zeros,
    max_real_part,
    refine_zero,
    scan_line,
    winding_count,
)
from .jensen import (
    JensenProfile,
    LinearityReport,
    TruncatedEpstein,
    detect_linearity,
    derivative_profile,
    jensen_profile,
    jensen_time_average,
    jensen_torus,
    zero_frequency,
)
from .randmodel import (
    DensityMethod,
    DensityTarget,
    TorusModel,
    estimate_density,
    estimate_nu_hat,
    fit_nu_hat_decay,
    nu_hat_conditional,
    predicted_constant,
)

__all__ = [
    "QuadForm",
    "ClassGroup",
    "ClassCharacter",
    "PrimeLocalData",
    "EpsteinCoefficients",
    "SplitType",
    "reduce_form",
    "build_class_group",
    "characters",
    "classify_prime",
    "epstein_coefficients",
    "EpsteinEvaluator",
    "eval_fast",
    "eval_lattice_oracle",
    "eval_theta_oracle",
    "check_functional_equation",
    "HeckeFamily",
    "LSeries",
    "TruncatedEuler",
    "decomposition_residual",
    "rep_count_oracle",
    "Rectangle",
    "ZeroRecord",
    "StripCount",
    "BoundaryZero",
    "count_strip",
    "domination_abscissa",
    "find_near_period",
    "find_zeros",
    "max_real_part",
    "refine_zero",
    "scan_line",
    "winding_count",
    "JensenProfile",
    "LinearityReport",
    "TruncatedEpstein",
    "detect_linearity",
    "derivative_profile",
    "jensen_profile",
    "jensen_time_average",
    "jensen_torus",
    "zero_frequency",
    "DensityMethod",
    "DensityTarget",
    "TorusModel",
    "estimate_density",
    "estimate_nu_hat",
    "fit_nu_hat_decay",
    "nu_hat_conditional",
    "predicted_constant",
]
