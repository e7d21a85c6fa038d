"""Fractional integrals and derivatives with Lebesgue, Besov and Grand Lebesgue norms.

Modules: ``special`` (gamma family), ``quadrature`` (singular-endpoint
integration), ``funcspace`` (functions and the test catalog),
``operators``, ``norms``, ``constants`` (exponent maps and envelopes),
``lab`` (empirical checks) and ``cli``.
"""

from . import constants, funcspace, lab, norms, operators, quadrature, special
from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    EmptyResultError,
    FracNormError,
    InsufficientDataError,
    SingularPointError,
)
from .funcspace import (
    CatalogEntry,
    ScalarFunction,
    TensorFunction,
    VerySimpleFunction,
    parse_function_spec,
)
from .norms import PsiFunction
from .quadrature import DEFAULT_SPEC, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "constants",
    "funcspace",
    "lab",
    "norms",
    "operators",
    "quadrature",
    "special",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "EmptyResultError",
    "FracNormError",
    "InsufficientDataError",
    "SingularPointError",
    "CatalogEntry",
    "ScalarFunction",
    "TensorFunction",
    "VerySimpleFunction",
    "parse_function_spec",
    "PsiFunction",
    "DEFAULT_SPEC",
    "QuadratureSpec",
]
