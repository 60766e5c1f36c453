"""Stolarsky means, mean-value abscissas, and numerical checks of the
functions whose mean-value abscissa is a Stolarsky mean of the endpoints."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .abscissa import AbscissaReport, abscissa_report, mean_value_abscissas
from .errors import (
    BranchError,
    DegenerateDenominator,
    DegenerateFunction,
    DomainError,
    EvaluationOverflow,
    ExprSyntaxError,
    NoRootFound,
    NotBracketed,
    OutOfRange,
    PrecisionFloor,
    StolarskyError,
)
from .expr import DifferentiableFn, differentiate, evaluate, parse, to_string
from .means import (
    Alpha,
    Branch,
    Interval,
    identric_mean,
    invert_alpha,
    invert_alpha_array,
    logarithmic_mean,
    stolarsky_mean,
    stolarsky_mean_array,
)
from .proofcheck import (
    LemmaSetup,
    RstPoint,
    asymptotic_convergence,
    g_derivative,
    lemma_seed,
    phi_derivative,
    rst_leading,
    rst_terms,
    solve_g,
    solve_phi,
)
from .solutions import (
    SolutionFamily,
    family_eval,
    fde_residual,
    membership,
    ode_residual,
    sweep_families,
)

__all__ = [
    "BACKEND",
    "AbscissaReport", "abscissa_report", "mean_value_abscissas",
    "BranchError", "DegenerateDenominator", "DegenerateFunction", "DomainError",
    "EvaluationOverflow", "ExprSyntaxError", "NoRootFound", "NotBracketed",
    "OutOfRange", "PrecisionFloor", "StolarskyError",
    "DifferentiableFn", "differentiate", "evaluate", "parse", "to_string",
    "Alpha", "Branch", "Interval", "identric_mean", "invert_alpha", "invert_alpha_array",
    "logarithmic_mean", "stolarsky_mean", "stolarsky_mean_array",
    "LemmaSetup", "RstPoint", "asymptotic_convergence", "g_derivative", "lemma_seed",
    "phi_derivative", "rst_leading", "rst_terms", "solve_g", "solve_phi",
    "SolutionFamily", "family_eval", "fde_residual", "membership", "ode_residual",
    "sweep_families",
]
