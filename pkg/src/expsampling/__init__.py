"""Exponential sampling series with Mellin kernels: kernels, jump analysis and error bounds."""

from .analysis import (
    KernelReport,
    absolute_moment,
    algebraic_moment,
    check_kernel_conditions,
    mellin_transform,
    partition_residual,
    psi_minus,
    psi_plus,
    sup_absolute_moment,
    verify_half_line_conditions,
)
from .bounds import (
    ErrorReport,
    empirical_sup_error,
    jitter_experiment,
    rate_bound,
    rate_experiment,
    roundoff_experiment,
)
from .exceptions import (
    ConfigError,
    DomainError,
    JitterRejected,
    KernelConstructionError,
    NoLimitError,
    NumericalError,
)
from .kernels import (
    BSpline,
    Combined,
    Jackson,
    bspline_eval,
    build_combined,
    combined_reference_kernel,
    eval_kernel,
    jackson_eval,
    jackson_normalization,
)
from .sampling import (
    NON_ALIGNED,
    Aligned,
    analyze_jump,
    classify_alignment,
    divergence_witness,
    evaluate_series,
    node_window,
    predict_jump_limit,
    representation_decomposition,
)
from .signals import (
    PiecewiseSignal,
    build_h,
    log_modulus,
    one_sided_limits,
    three_jump_signal,
)

__version__ = "0.1.0"

__all__ = [
    "absolute_moment",
    "algebraic_moment",
    "Aligned",
    "analyze_jump",
    "BSpline",
    "bspline_eval",
    "build_combined",
    "build_h",
    "check_kernel_conditions",
    "classify_alignment",
    "Combined",
    "combined_reference_kernel",
    "ConfigError",
    "divergence_witness",
    "DomainError",
    "empirical_sup_error",
    "ErrorReport",
    "eval_kernel",
    "evaluate_series",
    "Jackson",
    "jackson_eval",
    "jackson_normalization",
    "jitter_experiment",
    "JitterRejected",
    "KernelConstructionError",
    "KernelReport",
    "log_modulus",
    "mellin_transform",
    "node_window",
    "NoLimitError",
    "NON_ALIGNED",
    "NumericalError",
    "one_sided_limits",
    "partition_residual",
    "PiecewiseSignal",
    "predict_jump_limit",
    "psi_minus",
    "psi_plus",
    "rate_bound",
    "rate_experiment",
    "representation_decomposition",
    "roundoff_experiment",
    "sup_absolute_moment",
    "three_jump_signal",
    "verify_half_line_conditions",
]
