"""Exact spectral sum rules for string densities with a zero mode.

The package evaluates Z_p = sum_n 1/E_n^p (p = 1, 2) for the weighted
eigenproblem -psi'' = E sigma(x) psi in closed form, handling the zero mode
that Neumann and periodic ends introduce, and independently cross-checks the
results against spectra computed by shooting, Rayleigh-Ritz, or Bessel root
finding.
"""

from .density import (
    BUILTIN_NAMES,
    Density,
    IntervalDomain,
    RectangleDomain,
    density_integral,
    from_expression,
    make_builtin,
    validate_positivity,
)
from .errors import (
    AccuracyError,
    BracketError,
    DomainError,
    ExpressionError,
    ExpressionSyntaxError,
    NonFiniteResultError,
    ParameterError,
    SumRuleError,
    UnboundParameterError,
    UnknownIdentifierError,
    UnsupportedKernelError,
)
from .expr import eval_ast, parse, pretty
from .greens import (
    BoundaryCondition,
    GreensKernel,
    convolve_gq,
    eval_g0,
    eval_g1,
    make_kernel,
    spectral_series_oracle,
)
from .quadrature import QuadratureResult, integrate_1d, integrate_2d
from .spectra import (
    Spectrum,
    bessel_deriv_roots,
    disk_annulus_spectrum,
    generalized_sym_eig,
    rayleigh_ritz,
    sl_spectrum,
)
from .sumrule import (
    SumRuleResult,
    annulus_z2,
    bilinear_b,
    reference_value,
    trace_t1,
    trace_t2,
    z1,
    z2,
)
from .tails import NumericSumRule, TailFit, fit_tail_1d, numeric_sum_rule, tail_sum, weyl_tail_2d
from .zeromode import (
    MatrixElementTable,
    ZeroModeExpansion,
    e0_coefficients,
    e0_series_eval,
    matrix_elements,
    shifted_eigen_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BUILTIN_NAMES",
    "BoundaryCondition",
    "BracketError",
    "Density",
    "DomainError",
    "ExpressionError",
    "ExpressionSyntaxError",
    "IntervalDomain",
    "MatrixElementTable",
    "NonFiniteResultError",
    "NumericSumRule",
    "ParameterError",
    "QuadratureResult",
    "RectangleDomain",
    "Spectrum",
    "SumRuleError",
    "SumRuleResult",
    "TailFit",
    "UnboundParameterError",
    "UnknownIdentifierError",
    "UnsupportedKernelError",
    "ZeroModeExpansion",
    "annulus_z2",
    "bessel_deriv_roots",
    "bilinear_b",
    "density_integral",
    "disk_annulus_spectrum",
    "e0_coefficients",
    "e0_series_eval",
    "GreensKernel",
    "convolve_gq",
    "eval_ast",
    "eval_g0",
    "eval_g1",
    "fit_tail_1d",
    "from_expression",
    "generalized_sym_eig",
    "integrate_1d",
    "integrate_2d",
    "make_builtin",
    "make_kernel",
    "matrix_elements",
    "numeric_sum_rule",
    "parse",
    "pretty",
    "rayleigh_ritz",
    "reference_value",
    "shifted_eigen_oracle",
    "sl_spectrum",
    "spectral_series_oracle",
    "tail_sum",
    "trace_t1",
    "trace_t2",
    "validate_positivity",
    "weyl_tail_2d",
    "z1",
    "z2",
]
