"""Double Dirichlet L-functions: evaluation, explicit main terms and bound checks."""

from .characters import (
    DirichletCharacter,
    character,
    enumerate_characters,
    gauss_sum,
    hyperbola_sum,
    primitive_characters,
)
from .dirichlet_l import l_function, truncated_product
from .double_l import (
    EvalRequest,
    EvalResult,
    MainTermResult,
    direct_sum,
    evaluate,
    integral_repr,
    psi_series,
    theorem1_bound_check,
    theorem2_main_term,
)
from .harness import SweepSpec, fit_exponent, run_sweep, verify_bounds
from .errors import ConvergenceError, DomainError, PoleError, RegimeError
from .special_fn import oscillatory_integral, tricomi_psi, upper_incomplete_gamma

__all__ = [
    "ConvergenceError",
    "DirichletCharacter",
    "DomainError",
    "EvalRequest",
    "EvalResult",
    "MainTermResult",
    "PoleError",
    "RegimeError",
    "SweepSpec",
    "character",
    "direct_sum",
    "enumerate_characters",
    "evaluate",
    "fit_exponent",
    "gauss_sum",
    "hyperbola_sum",
    "integral_repr",
    "l_function",
    "oscillatory_integral",
    "primitive_characters",
    "psi_series",
    "run_sweep",
    "theorem1_bound_check",
    "theorem2_main_term",
    "truncated_product",
    "tricomi_psi",
    "upper_incomplete_gamma",
    "verify_bounds",
]
