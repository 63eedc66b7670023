"""Numerical laboratory for critical points of complex polynomials.

Polynomials are given by their zeros and multiplicities. The package
classifies critical points, assembles and certifies the Jacobian of the
critical-point system on a stratum, tracks critical points as zeros move,
and evaluates Sendov-type objectives with their Kuhn–Tucker conditions.
"""

from .cpoly import (
    DEFAULT_TOL,
    CriticalSet,
    PolyCoeffs,
    Tolerances,
    ZeroConfig,
    critical_points,
    eval_derivatives,
    expand,
    roots,
    roots_of_unity,
    transform,
)
from .errors import (
    BoundaryError,
    ContractError,
    DegeneracyError,
    NumericError,
    ParseError,
    SendovLabError,
)
from .strata import Structure, classify_stratum, parse_stratum

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "BoundaryError",
    "ContractError",
    "CriticalSet",
    "DegeneracyError",
    "NumericError",
    "ParseError",
    "PolyCoeffs",
    "SendovLabError",
    "Structure",
    "Tolerances",
    "ZeroConfig",
    "classify_stratum",
    "critical_points",
    "eval_derivatives",
    "expand",
    "parse_stratum",
    "roots",
    "roots_of_unity",
    "transform",
    "__version__",
]
