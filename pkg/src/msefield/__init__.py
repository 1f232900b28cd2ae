"""Rates of iterative multi-user receivers as line integrals in the MSE vector field."""
from ._quadrature import QuadratureSpec, QuadratureWarning
from .channel import MacChannel, MimoMacChannel, concatenate_channels, effective_gains
from .mimo import (
    SingularSnrError,
    covariance,
    jacobi_gradient_check,
    lmmse_snr,
    log_det_covariance,
    log_det_gradient,
    mimo_rates_along_path,
    mimo_sum_rate,
)
from .mmse import GAUSSIAN, QPSK, Alphabet, MmseFunction, mmse, mmse_inverse
from .path import (
    DecodingPath,
    InvalidPathError,
    PathKind,
    PathReport,
    make_sic_path,
    make_straight_line,
    make_waypoint_path,
    random_monotone_path,
    sample_path,
    validate_path,
)
from .rates import (
    PathIndependenceReport,
    RateTuple,
    per_user_bounds,
    potential,
    potential_gradient,
    rate_general_alphabet,
    rates_gaussian,
    straight_line_rates_closed_form,
    sum_rate_closed_form,
    to_units,
    verify_path_independence,
)
from .region import (
    FeasibilityReport,
    InfeasibleTargetError,
    OffFaceError,
    RegionConstraint,
    enumerate_constraints,
    is_feasible,
    region_report,
    synthesize_path_for_tuple,
)
from .simulate import McReport, Trajectory, evolve, monte_carlo_ese
from .transfer import (
    DecCharacteristic,
    NonMonotoneSnrError,
    SicStepDec,
    StraightLineDec,
    TabulatedDec,
    dec_apply,
    ese_snr,
    ese_snr_bounds,
    matched_decs,
    synthesize_matching_dec,
)

__version__ = "0.1.0"
