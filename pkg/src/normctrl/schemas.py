"""Pydantic request/response models shared by the FastAPI service and the
CLI client.

The extended-real parameter p is accepted as a number or the string "inf";
response payloads render non-finite values as strings (see manifest module),
so every response is strict JSON.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, Field

from .matrices import (
    FiniteMatrix,
    FourierSymbol,
    matrix_from_payload,
    matrix_to_payload,
    symbol_from_payload,
    symbol_to_payload,
)
from .norms import AlgebraSpec

Family = Literal["schur", "bgs", "beurling", "jaffard", "op"]


def _parse_p(v):
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return float(v)
    return float(v)


PValue = Annotated[float, BeforeValidator(_parse_p)]


class MatrixPayload(BaseModel):
    format_version: Literal[1] = 1
    window: tuple[int, int]
    entries: list[tuple[int, int, float, float]]

    def to_matrix(self) -> FiniteMatrix:
        return matrix_from_payload(self.model_dump())

    @classmethod
    def from_matrix(cls, m: FiniteMatrix) -> "MatrixPayload":
        return cls(**matrix_to_payload(m))


class SymbolPayload(BaseModel):
    format_version: Literal[1] = 1
    coeffs: list[tuple[int, float, float]]

    def to_symbol(self) -> FourierSymbol:
        return symbol_from_payload(self.model_dump())

    @classmethod
    def from_symbol(cls, s: FourierSymbol) -> "SymbolPayload":
        return cls(**symbol_to_payload(s))


class GridFunctionPayload(BaseModel):
    format_version: Literal[1] = 1
    interval: tuple[float, float]
    values: list[float]
    deriv: list[float] | None = None
    deriv2: list[float] | None = None


class SpecParams(BaseModel):
    family: Family = "schur"
    p: PValue = Field(default=math.inf)
    alpha: float = 0.0

    def to_spec(self) -> AlgebraSpec:
        return AlgebraSpec(family=self.family, p=self.p, alpha=self.alpha)


class NormRequest(SpecParams):
    matrix: MatrixPayload
    tol: float = 1e-12


class NormResponse(BaseModel):
    norm: float
    family: Family
    p: float | str
    alpha: float


class DiffCheckRequest(SpecParams):
    theta: float
    samples: int = 100
    seed: int = 0
    n: int = 64
    certified_d0: float | None = None
    threads: int = 1


class DiffCheckResponse(BaseModel):
    spec: dict
    theta: float
    sample_count: int
    skipped: int
    max_ratio: float
    argmax_sample: int
    certified_d0: float | None
    violations: int


class PowersRequest(SpecParams):
    matrix: MatrixPayload
    m: int = 2
    theta: float
    nmax: int = 64
    ladder: Literal["cofactor", "geometric"] = "cofactor"


class PowersRow(BaseModel):
    n: int
    norm_family: float | str
    digit_bound: float | str
    operator_bound: float | str
    log_norm_family: float
    log_digit_bound: float


class PowersResponse(BaseModel):
    m: int
    theta: float
    d_empirical: float
    ladder: Literal["cofactor", "geometric"]
    ladder_powers: list[int]
    a: float | str
    b: float | str
    normalization: float
    underflow_at: int | None
    rows: list[PowersRow]


class InvertRequest(SpecParams):
    matrix: MatrixPayload
    m: int = 2
    theta: float
    d: float | None = None  # None -> empirical over the cofactor ladder
    tol: float = 1e-10
    max_terms: int = 10_000


class CertificateResponse(BaseModel):
    spec: dict
    size: int
    m: int
    theta: float
    kappa: float
    a: float | str
    b: float | str
    D: float
    D_source: str
    D_ladder: list[int]
    t0: float | None
    bound_log: float
    bound: float | str
    measured_inverse_norm: float
    measured_inverse_norm_raw: float
    neumann_terms: int
    residual: float
    normalization: float
    degenerate: bool
    verified: bool | None
    scope: str


class WienerRequest(BaseModel):
    op: Literal["norm", "norm1", "invert"]
    symbol: SymbolPayload
    grid: int = 256
    tol: float = 1e-10


class WienerResponse(BaseModel):
    op: str
    value: float | None = None
    symbol: SymbolPayload | None = None
    residual: float | None = None
    grid: int | None = None
    tol: float | None = None


class GenRequest(BaseModel):
    kind: Literal["decay", "invertible", "laurent", "trig"]
    seed: int = 0
    n: int = 64
    alpha: float = 1.0
    kappa: float | None = None
    degree: int | None = None
    window: tuple[int, int] | None = None
    grid: int = 256
    interval: tuple[float, float] | None = None


class GenResponse(BaseModel):
    kind: str
    matrix: MatrixPayload | None = None
    symbol: SymbolPayload | None = None
    grid_function: GridFunctionPayload | None = None
    achieved_kappa: float | None = None


class ReportRequest(BaseModel):
    certificates: list[dict]


class ReportResponse(BaseModel):
    columns: list[str]
    rows: list[list[float | str | int]]
    csv: str
