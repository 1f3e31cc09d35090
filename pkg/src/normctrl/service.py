"""FastAPI service wrapping the core package, plus the shared handler layer.

Each handler takes a pydantic request model and returns a response model;
the HTTP endpoints and the CLI client both call these handlers, so wire
behaviour is identical.  Error mapping: malformed payloads -> 400,
mathematical precondition failures (parameters, structure, singularity) ->
422, non-convergence and generation failures -> 422 with a distinguishing
code.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .differential import brandenburg_estimate, diff_inequality_sample
from .errors import (
    ConvergenceError,
    GenerationError,
    MalformedInputError,
    NormctrlError,
    ParameterError,
)
from .funcalg import wiener1_norm, wiener_inverse, wiener_norm
from .generators import gen_decay, gen_invertible, gen_laurent_symbol, gen_trig_poly
from .inversion import certify, inverse_norm_bound, power_norm_bound
from .manifest import json_float
from .matrices import IndexWindow, laurent_from_symbol
from .norms import family_norm, normalization_constant, operator_norm_l2
from .schemas import (
    CertificateResponse,
    DiffCheckRequest,
    DiffCheckResponse,
    GenRequest,
    GenResponse,
    GridFunctionPayload,
    InvertRequest,
    MatrixPayload,
    NormRequest,
    NormResponse,
    PowersRequest,
    PowersResponse,
    PowersRow,
    ReportRequest,
    ReportResponse,
    SymbolPayload,
    WienerRequest,
    WienerResponse,
)

_LINEAR_OVERFLOW_LOG = 709.0


# ---------------------------------------------------------------------------
# Handlers (shared by HTTP endpoints and the CLI).
# ---------------------------------------------------------------------------


def handle_norm(req: NormRequest) -> NormResponse:
    spec = req.to_spec()
    value = family_norm(req.matrix.to_matrix(), spec, req.tol)
    desc = spec.describe()
    return NormResponse(norm=value, family=desc["family"], p=desc["p"], alpha=desc["alpha"])


def handle_diffcheck(req: DiffCheckRequest) -> DiffCheckResponse:
    report = diff_inequality_sample(
        req.to_spec(),
        req.theta,
        req.samples,
        req.seed,
        n=req.n,
        certified_d0=req.certified_d0,
        threads=req.threads,
    )
    return DiffCheckResponse(**report.to_dict())


def handle_powers(req: PowersRequest) -> PowersResponse:
    spec = req.to_spec()
    x = req.matrix.to_matrix()
    nop = operator_norm_l2(x)
    if nop >= 1.0 or nop == 0.0:
        raise ParameterError(
            f"digit bounds require a contraction: ||X||_op = {nop:.6g} is not in (0, 1)"
        )
    k_norm = normalization_constant(spec)
    a_const = 1.0 / nop
    b_const = a_const * k_norm * family_norm(x, spec)
    report = brandenburg_estimate(
        x, spec, req.m, req.theta, req.nmax, ladder=req.ladder, renormalize=True
    )
    rows = []
    for r in report.rows:
        log_db, db_lin = power_norm_bound(
            r.n, req.m, req.theta, report.d_empirical, a_const, b_const
        )
        log_ob = -r.n * math.log(a_const)
        rows.append(
            PowersRow(
                n=r.n,
                norm_family=json_float(
                    math.exp(r.log_norm_family)
                    if r.log_norm_family < _LINEAR_OVERFLOW_LOG
                    else math.inf
                ),
                digit_bound=json_float(db_lin),
                operator_bound=json_float(math.exp(log_ob)),
                log_norm_family=r.log_norm_family,
                log_digit_bound=log_db,
            )
        )
    return PowersResponse(
        m=req.m,
        theta=req.theta,
        d_empirical=report.d_empirical,
        ladder=req.ladder,
        ladder_powers=report.ladder_powers,
        a=json_float(a_const),
        b=json_float(b_const),
        normalization=k_norm,
        underflow_at=report.underflow_at,
        rows=rows,
    )


def handle_invert(req: InvertRequest) -> CertificateResponse:
    cert = certify(
        req.matrix.to_matrix(),
        req.to_spec(),
        req.m,
        req.theta,
        d_mode="auto" if req.d is None else req.d,
        tol=req.tol,
        max_terms=req.max_terms,
    )
    payload = cert.to_dict()
    for key in ("a", "b", "bound"):
        payload[key] = json_float(payload[key])
    return CertificateResponse(**payload)


def handle_wiener(req: WienerRequest) -> WienerResponse:
    symbol = req.symbol.to_symbol()
    if req.op == "norm":
        return WienerResponse(op="norm", value=wiener_norm(symbol))
    if req.op == "norm1":
        return WienerResponse(op="norm1", value=wiener1_norm(symbol))
    inv, residual = wiener_inverse(symbol, grid_size=req.grid, tol=req.tol)
    return WienerResponse(
        op="invert",
        value=wiener_norm(inv),
        symbol=SymbolPayload.from_symbol(inv),
        residual=residual,
        grid=req.grid,
        tol=req.tol,
    )


def handle_gen(req: GenRequest) -> GenResponse:
    if req.kind == "decay":
        m = gen_decay(req.n, req.alpha, req.seed)
        return GenResponse(kind="decay", matrix=MatrixPayload.from_matrix(m))
    if req.kind == "invertible":
        if req.kappa is None:
            raise ParameterError("kind=invertible requires a kappa target")
        m, achieved = gen_invertible(req.n, req.alpha, req.kappa, req.seed)
        return GenResponse(
            kind="invertible",
            matrix=MatrixPayload.from_matrix(m),
            achieved_kappa=achieved,
        )
    if req.kind == "laurent":
        degree = 4 if req.degree is None else req.degree
        window = req.window if req.window is not None else (-16, 16)
        symbol = gen_laurent_symbol(degree, req.alpha, req.seed)
        matrix = laurent_from_symbol(symbol, IndexWindow(*window))
        return GenResponse(
            kind="laurent",
            matrix=MatrixPayload.from_matrix(matrix),
            symbol=SymbolPayload.from_symbol(symbol),
        )
    # trig
    degree = 5 if req.degree is None else req.degree
    interval = req.interval if req.interval is not None else (0.0, 2.0 * math.pi)
    f = gen_trig_poly(degree, req.seed, interval=interval, grid=req.grid)
    return GenResponse(
        kind="trig",
        grid_function=GridFunctionPayload(
            interval=(f.lo, f.hi),
            values=f.values.tolist(),
            deriv=f.deriv.tolist(),
            deriv2=f.deriv2.tolist(),
        ),
    )


_REPORT_COLUMNS = ["n", "kappa", "a", "b", "t0", "D", "bound", "measured", "ratio"]


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def handle_report(req: ReportRequest) -> ReportResponse:
    rows: list[list] = []
    for cert in req.certificates:
        payload = cert.get("result", cert)
        try:
            bound = payload["bound"]
            measured = payload["measured_inverse_norm"]
            if isinstance(bound, str) or bound is None:
                ratio = "inf"
            elif measured == 0:
                ratio = "inf"
            else:
                ratio = json_float(bound / measured)
            rows.append(
                [
                    payload["size"],
                    json_float(payload["kappa"]),
                    payload["a"] if isinstance(payload["a"], str) else json_float(payload["a"]),
                    payload["b"] if isinstance(payload["b"], str) else json_float(payload["b"]),
                    "" if payload.get("t0") is None else json_float(payload["t0"]),
                    json_float(payload["D"]),
                    bound if isinstance(bound, str) else json_float(bound),
                    json_float(measured),
                    ratio,
                ]
            )
        except KeyError as exc:
            raise MalformedInputError(f"certificate missing field {exc}") from exc
    lines = [",".join(_REPORT_COLUMNS)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return ReportResponse(columns=_REPORT_COLUMNS, rows=rows, csv="\n".join(lines) + "\n")


def powers_csv(resp: PowersResponse) -> str:
    lines = ["n,norm_A_Bn,digit_bound,operator_bound"]
    for row in resp.rows:
        lines.append(
            ",".join(
                _csv_cell(v)
                for v in (row.n, row.norm_family, row.digit_bound, row.operator_bound)
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# FastAPI application.
# ---------------------------------------------------------------------------

app = FastAPI(
    title="normctrl",
    version=__version__,
    description=(
        "Off-diagonal-decay matrix norms, differential-inequality checks and "
        "certified norm-controlled inversion."
    ),
)

_HTTP_STATUS: dict[type, int] = {
    MalformedInputError: 400,
    ConvergenceError: 422,
    GenerationError: 422,
}


@app.exception_handler(NormctrlError)
async def _normctrl_error_handler(_request: Request, exc: NormctrlError):
    status = _HTTP_STATUS.get(type(exc), 422)
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/norm", response_model=NormResponse)
def norm_endpoint(req: NormRequest) -> NormResponse:
    return handle_norm(req)


@app.post("/diffcheck", response_model=DiffCheckResponse)
def diffcheck_endpoint(req: DiffCheckRequest) -> DiffCheckResponse:
    return handle_diffcheck(req)


@app.post("/powers", response_model=PowersResponse)
def powers_endpoint(req: PowersRequest) -> PowersResponse:
    return handle_powers(req)


@app.post("/invert", response_model=CertificateResponse)
def invert_endpoint(req: InvertRequest) -> CertificateResponse:
    return handle_invert(req)


@app.post("/wiener", response_model=WienerResponse)
def wiener_endpoint(req: WienerRequest) -> WienerResponse:
    return handle_wiener(req)


@app.post("/gen", response_model=GenResponse)
def gen_endpoint(req: GenRequest) -> GenResponse:
    return handle_gen(req)


@app.post("/report", response_model=ReportResponse)
def report_endpoint(req: ReportRequest) -> ReportResponse:
    return handle_report(req)
