"""Commutative companion on the Fourier side: Wiener norms, inversion of
nonvanishing symbols by discrete transform, and grid-sampled C^1 checks.

Continuous functions are represented by samples on a uniform closed grid
plus exact derivative samples supplied by the generators.  Grid sup-norms
are lower bounds on the true sups; the test functions are band-limited so a
256-point grid suffices at the tolerances used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInvertibleError, ParameterError
from .matrices import FourierSymbol, convolve

_MIN_GRID = 16


@dataclass(frozen=True)
class GridFunction:
    """Samples on the uniform grid of size G over [lo, hi] (both endpoints
    included, spacing (hi-lo)/(G-1)), with optional exact derivative and
    second-derivative samples."""

    lo: float
    hi: float
    values: np.ndarray
    deriv: np.ndarray | None = None
    deriv2: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < _MIN_GRID:
            raise ParameterError(f"grid must be 1-D with at least {_MIN_GRID} samples")
        if not self.lo < self.hi:
            raise ParameterError(f"empty interval [{self.lo}, {self.hi}]")
        object.__setattr__(self, "values", v)
        for name in ("deriv", "deriv2"):
            d = getattr(self, name)
            if d is not None:
                d = np.asarray(d, dtype=np.float64)
                if d.shape != v.shape:
                    raise ParameterError(f"{name} samples must match the grid")
                object.__setattr__(self, name, d)

    @property
    def grid_size(self) -> int:
        return int(self.values.size)

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.grid_size)


def grid_product(f: GridFunction, g: GridFunction) -> GridFunction:
    """Pointwise product with the exact product-rule derivative."""
    if (f.lo, f.hi, f.grid_size) != (g.lo, g.hi, g.grid_size):
        raise ParameterError("grid mismatch in product")
    deriv = None
    if f.deriv is not None and g.deriv is not None:
        deriv = f.deriv * g.values + f.values * g.deriv
    return GridFunction(f.lo, f.hi, f.values * g.values, deriv=deriv)


def wiener_norm(f: FourierSymbol) -> float:
    """sum |f_hat(n)|."""
    return float(sum(abs(c) for c in f.coefficients.values()))


def wiener1_norm(f: FourierSymbol) -> float:
    """sum (|n| + 1) |f_hat(n)|; equals the Wiener norm of f plus that of
    its derivative."""
    return float(sum((abs(n) + 1.0) * abs(c) for n, c in f.coefficients.items()))


def wiener_inverse(
    f: FourierSymbol, grid_size: int = 256, tol: float = 1e-10
) -> tuple[FourierSymbol, float]:
    """Fourier coefficients of 1/f from the discrete transform of reciprocal
    samples, truncated where |coefficient| < tol.

    Returns (symbol, residual) with residual = ||f * (1/f) - 1||_W computed
    by exact coefficient convolution on the truncation.  grid_size must be a
    power of two (>= 16) so the transform length is exact.
    """
    if grid_size < _MIN_GRID or grid_size & (grid_size - 1):
        raise ParameterError(f"grid_size must be a power of two >= {_MIN_GRID}")
    if tol <= 0:
        raise ParameterError("tol must be positive")
    x = 2.0 * np.pi * np.arange(grid_size) / grid_size
    samples = f.sample(x)
    magnitude = np.abs(samples)
    if float(magnitude.min()) <= 0.0:
        raise NotInvertibleError("symbol vanishes on the sampling grid")
    coeffs_arr = np.fft.fft(1.0 / samples) / grid_size
    half = grid_size // 2
    coeffs: dict[int, complex] = {}
    for idx in range(grid_size):
        n = idx if idx < half else idx - grid_size
        c = complex(coeffs_arr[idx])
        if abs(c) >= tol:
            coeffs[n] = c
    inv = FourierSymbol(coeffs)
    prod = convolve(f, inv)
    residual = sum(
        abs(c - 1.0) if n == 0 else abs(c) for n, c in prod.coefficients.items()
    )
    if 0 not in prod.coefficients:
        residual += 1.0
    return inv, float(residual)


def c1_norms(f: GridFunction) -> tuple[float, float]:
    """(sup |f|, sup |f| + sup |f'|) on the grid."""
    if f.deriv is None:
        raise ParameterError("derivative samples are required for the C1 norm")
    sup = float(np.abs(f.values).max())
    return sup, sup + float(np.abs(f.deriv).max())


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    passed: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "passed": self.passed}


def c1_inversion_check(f: GridFunction, rel_tol: float = 1e-9) -> InequalityReport:
    """Check ||1/f||_C1 <= ||1/f||_C^2 ||f||_C1 on the grid, with the
    derivative of 1/f evaluated exactly as -f'/f^2 from the samples."""
    if f.deriv is None:
        raise ParameterError("derivative samples are required")
    if float(np.abs(f.values).min()) <= 0.0:
        raise NotInvertibleError("function vanishes on the grid")
    inv = 1.0 / f.values
    inv_deriv = -f.deriv / (f.values**2)
    sup_inv = float(np.abs(inv).max())
    lhs = sup_inv + float(np.abs(inv_deriv).max())
    sup_f, c1_f = c1_norms(f)
    rhs = sup_inv**2 * c1_f
    return InequalityReport(lhs=lhs, rhs=rhs, passed=lhs <= rhs * (1.0 + rel_tol))


def c2_interpolation_check(f: GridFunction, rel_tol: float = 1e-9) -> InequalityReport:
    """Check the explicit interpolation bound on the first derivative:

        ||f'||_C <= max(4 ||f||_C^(1/2) ||f''||_C^(1/2), 8 (hi-lo)^-1 ||f||_C)
    """
    if f.deriv is None or f.deriv2 is None:
        raise ParameterError("derivative and second-derivative samples are required")
    sup_f = float(np.abs(f.values).max())
    sup_d1 = float(np.abs(f.deriv).max())
    sup_d2 = float(np.abs(f.deriv2).max())
    rhs = max(4.0 * sup_f**0.5 * sup_d2**0.5, 8.0 / (f.hi - f.lo) * sup_f)
    return InequalityReport(lhs=sup_d1, rhs=rhs, passed=sup_d1 <= rhs * (1.0 + rel_tol))
