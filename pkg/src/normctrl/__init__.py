"""Norms, differential inequalities and certified norm-controlled inversion
for finite matrices with off-diagonal decay.

The package has a functional core (matrices, norms, differential checks,
inversion certificates, Wiener-algebra helpers, deterministic generators),
a FastAPI service exposing the same operations, and a thin CLI client.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    GenerationError,
    NotInvertibleError,
    ParameterError,
    StructuralError,
)
from .matrices import FiniteMatrix, FourierSymbol, IndexWindow

__all__ = [
    "__version__",
    "IndexWindow",
    "FiniteMatrix",
    "FourierSymbol",
    "ParameterError",
    "StructuralError",
    "ConvergenceError",
    "NotInvertibleError",
    "GenerationError",
]
