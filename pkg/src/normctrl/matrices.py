"""Finite truncations of bi-infinite matrices and finitely supported Fourier
symbols.

Matrices live on a square integer index window {lo, ..., hi} and store dense
complex128 entries.  All values are immutable after construction and every
operation is a pure function, so they are safe to share across threads.

Determinism contract: products are computed with ``numpy.einsum``, which
accumulates over the inner index k in fixed ascending order in a single
thread.  The same inputs therefore produce bit-identical outputs regardless
of thread counts or BLAS configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MalformedInputError, StructuralError

FORMAT_VERSION = 1


@dataclass(frozen=True)
class IndexWindow:
    """Inclusive integer index range {lo, ..., hi}."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise StructuralError(f"empty index window [{self.lo}, {self.hi}]")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __contains__(self, i: int) -> bool:
        return self.lo <= i <= self.hi


@dataclass(frozen=True)
class FiniteMatrix:
    """Square complex matrix indexed by a window; entry (i, j) sits at
    array position (i - lo, j - lo)."""

    window: IndexWindow
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.complex128)
        n = self.window.size
        if a.shape != (n, n):
            raise StructuralError(
                f"entries shape {a.shape} does not match window size {n}"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.window.size

    def entry(self, i: int, j: int) -> complex:
        if i not in self.window or j not in self.window:
            return 0j
        return complex(self.entries[i - self.window.lo, j - self.window.lo])

    def offsets(self) -> np.ndarray:
        """Matrix of index offsets i - j, aligned with ``entries``."""
        idx = self.window.indices()
        return idx[:, None] - idx[None, :]


def identity(window: IndexWindow) -> FiniteMatrix:
    return FiniteMatrix(window, np.eye(window.size, dtype=np.complex128))


def zero(window: IndexWindow) -> FiniteMatrix:
    return FiniteMatrix(window, np.zeros((window.size, window.size), np.complex128))


def multiply(a: FiniteMatrix, b: FiniteMatrix) -> FiniteMatrix:
    """Matrix product over the common window.

    The inner sum runs over ascending k (einsum contraction), single
    threaded, so results are bit-reproducible.
    """
    if a.window != b.window:
        raise StructuralError(
            f"window mismatch: [{a.window.lo},{a.window.hi}] vs "
            f"[{b.window.lo},{b.window.hi}]"
        )
    c = np.einsum("ik,kj->ij", a.entries, b.entries)
    return FiniteMatrix(a.window, c)


def adjoint(a: FiniteMatrix) -> FiniteMatrix:
    """Conjugate transpose; exact (conjugation and transpose are exact)."""
    return FiniteMatrix(a.window, a.entries.conj().T)


def matvec(a: FiniteMatrix, v: np.ndarray) -> np.ndarray:
    return np.einsum("ij,j->i", a.entries, v)


def scale(a: FiniteMatrix, c: complex) -> FiniteMatrix:
    return FiniteMatrix(a.window, c * a.entries)


def add(a: FiniteMatrix, b: FiniteMatrix) -> FiniteMatrix:
    if a.window != b.window:
        raise StructuralError("window mismatch in add")
    return FiniteMatrix(a.window, a.entries + b.entries)


def subtract(a: FiniteMatrix, b: FiniteMatrix) -> FiniteMatrix:
    if a.window != b.window:
        raise StructuralError("window mismatch in subtract")
    return FiniteMatrix(a.window, a.entries - b.entries)


@dataclass(frozen=True)
class FourierSymbol:
    """Finitely supported sequence of Fourier coefficients n -> f_hat(n).

    Absent indices are zero.  Zero values passed in are dropped so that two
    symbols with equal support compare equal.
    """

    coefficients: dict[int, complex]

    def __post_init__(self):
        clean = {
            int(n): complex(c) for n, c in self.coefficients.items() if c != 0
        }
        object.__setattr__(self, "coefficients", clean)

    def __getitem__(self, n: int) -> complex:
        return self.coefficients.get(n, 0j)

    @property
    def support(self) -> list[int]:
        return sorted(self.coefficients)

    @property
    def degree(self) -> int:
        return max((abs(n) for n in self.coefficients), default=0)

    def sample(self, x: np.ndarray) -> np.ndarray:
        """Evaluate f(x) = sum f_hat(n) exp(inx) at the given points."""
        out = np.zeros_like(x, dtype=np.complex128)
        for n in self.support:
            out += self.coefficients[n] * np.exp(1j * n * x)
        return out


def convolve(f: FourierSymbol, g: FourierSymbol) -> FourierSymbol:
    """Coefficient convolution, i.e. the symbol of the product f*g."""
    out: dict[int, complex] = {}
    for n, cf in f.coefficients.items():
        for m, cg in g.coefficients.items():
            out[n + m] = out.get(n + m, 0j) + cf * cg
    return FourierSymbol(out)


def laurent_from_symbol(f: FourierSymbol, window: IndexWindow) -> FiniteMatrix:
    """Toeplitz truncation A(i, j) = f_hat(i - j) on the window."""
    n = window.size
    a = np.zeros((n, n), dtype=np.complex128)
    for d, c in f.coefficients.items():
        if -(n - 1) <= d <= n - 1:
            idx = np.arange(max(0, d), min(n, n + d))
            a[idx, idx - d] = c
    return FiniteMatrix(window, a)


# ---------------------------------------------------------------------------
# Wire formats.
#
# Matrix:  {"format_version": 1, "window": [lo, hi],
#           "entries": [[i, j, re, im], ...]}   (absent entries are zero)
# Symbol:  {"format_version": 1, "coeffs": [[n, re, im], ...]}
# ---------------------------------------------------------------------------


def matrix_to_payload(a: FiniteMatrix, drop_zeros: bool = True) -> dict:
    lo = a.window.lo
    rows, cols = np.nonzero(a.entries) if drop_zeros else np.where(
        np.ones_like(a.entries, dtype=bool)
    )
    entries = [
        [int(i + lo), int(j + lo), float(a.entries[i, j].real), float(a.entries[i, j].imag)]
        for i, j in zip(rows.tolist(), cols.tolist())
    ]
    return {
        "format_version": FORMAT_VERSION,
        "window": [a.window.lo, a.window.hi],
        "entries": entries,
    }


def matrix_from_payload(payload: dict) -> FiniteMatrix:
    try:
        if payload.get("format_version") != FORMAT_VERSION:
            raise MalformedInputError(
                f"unsupported matrix format_version {payload.get('format_version')!r}"
            )
        lo, hi = (int(v) for v in payload["window"])
        entries = payload["entries"]
    except MalformedInputError:
        raise
    except Exception as exc:
        raise MalformedInputError(f"malformed matrix payload: {exc}") from exc
    if lo > hi:
        raise MalformedInputError(f"empty window [{lo}, {hi}]")
    window = IndexWindow(lo, hi)
    n = window.size
    a = np.zeros((n, n), dtype=np.complex128)
    seen: set[tuple[int, int]] = set()
    for item in entries:
        try:
            i, j, re, im = int(item[0]), int(item[1]), float(item[2]), float(item[3])
        except Exception as exc:
            raise MalformedInputError(f"malformed matrix entry {item!r}") from exc
        if not (lo <= i <= hi and lo <= j <= hi):
            raise MalformedInputError(f"entry index ({i}, {j}) outside window")
        if (i, j) in seen:
            raise MalformedInputError(f"duplicate entry for index ({i}, {j})")
        seen.add((i, j))
        a[i - lo, j - lo] = complex(re, im)
    return FiniteMatrix(window, a)


def symbol_to_payload(f: FourierSymbol) -> dict:
    coeffs = [
        [n, float(f.coefficients[n].real), float(f.coefficients[n].imag)]
        for n in f.support
    ]
    return {"format_version": FORMAT_VERSION, "coeffs": coeffs}


def symbol_from_payload(payload: dict) -> FourierSymbol:
    try:
        if payload.get("format_version") != FORMAT_VERSION:
            raise MalformedInputError(
                f"unsupported symbol format_version {payload.get('format_version')!r}"
            )
        coeffs = payload["coeffs"]
        out: dict[int, complex] = {}
        for item in coeffs:
            n, re, im = int(item[0]), float(item[1]), float(item[2])
            if n in out:
                raise MalformedInputError(f"duplicate coefficient for n={n}")
            out[n] = complex(re, im)
    except MalformedInputError:
        raise
    except Exception as exc:
        raise MalformedInputError(f"malformed symbol payload: {exc}") from exc
    return FourierSymbol(out)


def load_matrix(path: str | Path) -> FiniteMatrix:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_payload(payload)


def load_symbol(path: str | Path) -> FourierSymbol:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"cannot read symbol file {path}: {exc}") from exc
    return symbol_from_payload(payload)
