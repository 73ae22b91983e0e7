"""LASSO with an empirical output expansion and its SURE-based tuning.

The internal penalty convention is ``(1/2)||y - X b||^2 + lam ||b||_1``;
:func:`from_full_quadratic` converts a penalty written for
``||y - X b||^2 + lam ||b||_1``.
"""

import sys

from .cd import coordinate_descent, soft_threshold
from .design import DesignMatrix, standardize_design
from .exceptions import (
    AtTransitionPoint,
    ConfigError,
    ConstantColumn,
    DegenerateDenominator,
    EmptyActiveSet,
    EmptyCandidateSet,
    IndivisibleGrid,
    InputError,
    LassoError,
    LengthMismatch,
    MaxIterationsExceeded,
    MaxStepsExceeded,
    NumericalError,
    ParseError,
    RankDeficient,
    TrialFailureBudgetExceeded,
)
from .path import (
    HatQuantities,
    KKTReport,
    LassoFit,
    LassoPath,
    Segment,
    fit_from_coefficients,
    from_full_quadratic,
    hat_quantities,
    kkt_check,
    lars_lasso_path,
    solve_at,
    solve_at_knot,
    to_full_quadratic,
)
from .risk import (
    NoiseEstimate,
    SureReport,
    candidate_lambdas,
    evaluate_candidates,
    log_grid,
    noise_variance_ce,
    select_lambda,
    sure_lasso,
    sure_lasso_scaled,
    sure_report,
)
from .scaling import (
    ScaledFit,
    ScalingConfig,
    df_terms,
    eigen_bounds,
    empirical_alpha,
    empirical_alpha_l1,
    expansion_bound,
    residual_gap,
    scale_fit,
    scaled_output,
    unstabilized_gap,
)
from .simulation import (
    RiskGap,
    SimConfig,
    TrialReport,
    build_problem,
    estimate_alpha_opt,
    expansion_study,
    gaussian_design,
    generate_data,
    risk_gap_oracle,
    run_trial,
    run_trials,
)

__version__ = "0.1.0"

__all__ = sorted(
    name for name, obj in globals().items() if not name.startswith("_") and not isinstance(obj, type(sys))
)
