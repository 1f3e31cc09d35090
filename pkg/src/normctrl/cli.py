"""Command-line client.

Thin wrapper over the service handlers: each subcommand parses flags into
the corresponding request model, invokes the handler in-process and writes a
report ``{"manifest": ..., "result": ...}``.  Reports reproduce
byte-identically across runs and thread counts, except for the manifest's
``generated_at`` field.

Exit codes: 0 success, 2 malformed input or usage error, 3 mathematical
precondition failure (singular/degenerate/invalid parameters), 4
non-convergence or generation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from . import service
from .errors import (
    ConvergenceError,
    GenerationError,
    MalformedInputError,
    NormctrlError,
)
from .manifest import build_manifest, canonical_json, wrap_report
from .schemas import (
    DiffCheckRequest,
    GenRequest,
    InvertRequest,
    NormRequest,
    PowersRequest,
    ReportRequest,
    WienerRequest,
)

_EXIT_MALFORMED = 2
_EXIT_PRECONDITION = 3
_EXIT_NONCONVERGENCE = 4


def _exit_code(exc: NormctrlError) -> int:
    if isinstance(exc, MalformedInputError):
        return _EXIT_MALFORMED
    if isinstance(exc, (ConvergenceError, GenerationError)):
        return _EXIT_NONCONVERGENCE
    return _EXIT_PRECONDITION


def _fail(exc: Exception, code: int):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _run(build_request, handler, command: str, config: dict, *, seed=None,
         inputs=None, output=None, csv_path=None, csv_text_fn=None,
         post_exit=None):
    """Shared execution path: build request, run handler, emit report."""
    try:
        req = build_request()
    except ValidationError as exc:
        _fail(exc, _EXIT_MALFORMED)
    except NormctrlError as exc:
        _fail(exc, _exit_code(exc))
    try:
        result = handler(req)
    except NormctrlError as exc:
        _fail(exc, _exit_code(exc))
    outputs = {}
    if csv_path is not None and csv_text_fn is not None:
        Path(csv_path).write_text(csv_text_fn(result))
        outputs["csv"] = csv_path
    manifest = build_manifest(command, config, seed=seed, inputs=inputs or {},
                              outputs=outputs)
    text = canonical_json(wrap_report(manifest, result.model_dump()))
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)
    if post_exit is not None:
        code = post_exit(result)
        if code:
            sys.exit(code)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _fail(MalformedInputError(f"cannot read {path}: {exc}"), _EXIT_MALFORMED)


def _parse_p_flag(value: str) -> float | str:
    if value.lower() in ("inf", "infinity"):
        return value
    try:
        return float(value)
    except ValueError:
        raise MalformedInputError(f"--p must be a number or 'inf', got {value!r}")


@click.group()
def main():
    """Matrix-algebra norms, differential inequalities and certified
    norm-controlled inversion."""


@main.command()
@click.argument("kind", type=click.Choice(["decay", "invertible", "laurent", "trig"]))
@click.option("--n", default=64, show_default=True, help="Matrix size.")
@click.option("--alpha", default=1.0, show_default=True, help="Decay exponent.")
@click.option("--kappa", type=float, default=None, help="Condition target (invertible).")
@click.option("--degree", type=int, default=None, help="Degree (laurent/trig).")
@click.option("--window", nargs=2, type=int, default=None, help="Window lo hi (laurent).")
@click.option("--grid", default=256, show_default=True, help="Grid size (trig).")
@click.option("--interval", nargs=2, type=float, default=None, help="Interval (trig).")
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Write the generated object here (payload JSON).")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the run report here (default: stdout when -o given).")
def gen(kind, n, alpha, kappa, degree, window, grid, interval, seed, output, report_path):
    """Generate a test matrix, symbol or trig polynomial."""
    config = {
        "kind": kind, "n": n, "alpha": alpha, "kappa": kappa, "degree": degree,
        "window": list(window) if window else None, "grid": grid,
        "interval": list(interval) if interval else None, "seed": seed,
    }
    try:
        req = GenRequest(kind=kind, n=n, alpha=alpha, kappa=kappa, degree=degree,
                         window=window, grid=grid, interval=interval, seed=seed)
        result = service.handle_gen(req)
    except ValidationError as exc:
        _fail(exc, _EXIT_MALFORMED)
    except NormctrlError as exc:
        _fail(exc, _exit_code(exc))
    if result.matrix is not None:
        payload = result.matrix.model_dump()
    elif result.grid_function is not None:
        payload = result.grid_function.model_dump()
    else:
        payload = result.symbol.model_dump()
    text = canonical_json(payload)
    outputs = {}
    if output:
        Path(output).write_text(text)
        outputs["generated"] = output
    else:
        click.echo(text, nl=False)
        return
    manifest = build_manifest("gen", config, seed=seed, outputs=outputs)
    summary = {"kind": kind, "achieved_kappa": result.achieved_kappa}
    if result.kind == "laurent" and result.symbol is not None:
        summary["symbol"] = result.symbol.model_dump()
    report_text = canonical_json(wrap_report(manifest, summary))
    if report_path:
        Path(report_path).write_text(report_text)
    else:
        click.echo(report_text, nl=False)


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--family", type=click.Choice(["schur", "bgs", "beurling", "jaffard", "op"]),
              required=True)
@click.option("--p", default="inf", show_default=True, help="Exponent in [1, inf].")
@click.option("--alpha", default=0.0, show_default=True)
@click.option("--tol", default=1e-12, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def norm(matrix_file, family, p, alpha, tol, output):
    """Compute one algebra norm of a matrix file."""
    config = {"family": family, "p": p, "alpha": alpha, "tol": tol,
              "matrix_file": matrix_file}
    _run(
        lambda: NormRequest(matrix=_load_json(matrix_file), family=family,
                            p=_parse_p_flag(p), alpha=alpha, tol=tol),
        service.handle_norm,
        "norm", config, inputs={"matrix": matrix_file}, output=output,
    )


@main.command()
@click.option("--family", type=click.Choice(["schur", "bgs", "beurling", "jaffard"]),
              default="schur", show_default=True)
@click.option("--p", default="1", show_default=True)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--theta", type=float, required=True)
@click.option("--samples", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--n", default=64, show_default=True)
@click.option("--certified-d0", type=float, default=None)
@click.option("--threads", default=1, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def diffcheck(family, p, alpha, theta, samples, seed, n, certified_d0, threads, output):
    """Sample differential-inequality ratios for a norm family."""
    config = {"family": family, "p": p, "alpha": alpha, "theta": theta,
              "samples": samples, "seed": seed, "n": n,
              "certified_d0": certified_d0, "threads": threads}
    _run(
        lambda: DiffCheckRequest(family=family, p=_parse_p_flag(p), alpha=alpha,
                                 theta=theta, samples=samples, seed=seed, n=n,
                                 certified_d0=certified_d0, threads=threads),
        service.handle_diffcheck,
        "diffcheck", config, seed=seed, output=output,
    )


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--family", type=click.Choice(["schur", "bgs", "beurling", "jaffard"]),
              default="schur", show_default=True)
@click.option("--p", default="1", show_default=True)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--m", default=2, show_default=True)
@click.option("--theta", type=float, required=True)
@click.option("--nmax", default=64, show_default=True)
@click.option("--ladder", type=click.Choice(["cofactor", "geometric"]),
              default="cofactor", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also write the per-power table as CSV.")
@click.option("-o", "--output", type=click.Path(), default=None)
def powers(matrix_file, family, p, alpha, m, theta, nmax, ladder, csv_path, output):
    """Power-condition constant and digit bounds for a contraction."""
    config = {"family": family, "p": p, "alpha": alpha, "m": m, "theta": theta,
              "nmax": nmax, "ladder": ladder, "matrix_file": matrix_file}
    _run(
        lambda: PowersRequest(matrix=_load_json(matrix_file), family=family,
                              p=_parse_p_flag(p), alpha=alpha, m=m, theta=theta,
                              nmax=nmax, ladder=ladder),
        service.handle_powers,
        "powers", config, inputs={"matrix": matrix_file}, output=output,
        csv_path=csv_path, csv_text_fn=service.powers_csv,
    )


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--family", type=click.Choice(["schur", "bgs", "beurling", "jaffard"]),
              default="schur", show_default=True)
@click.option("--p", default="1", show_default=True)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--m", default=2, show_default=True)
@click.option("--theta", type=float, required=True)
@click.option("--D", "d_value", default="auto", show_default=True,
              help='Power-condition constant: "auto" (empirical) or a number.')
@click.option("--tol", default=1e-10, show_default=True)
@click.option("--max-terms", default=10_000, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def invert(matrix_file, family, p, alpha, m, theta, d_value, tol, max_terms, output):
    """Certified norm-controlled inversion; exits 3 when the degenerate
    (kappa = 1) path is flagged."""
    config = {"family": family, "p": p, "alpha": alpha, "m": m, "theta": theta,
              "D": d_value, "tol": tol, "max_terms": max_terms,
              "matrix_file": matrix_file}
    if d_value != "auto":
        try:
            d_parsed = float(d_value)
        except ValueError:
            _fail(MalformedInputError(f"--D must be 'auto' or a number, got {d_value!r}"),
                  _EXIT_MALFORMED)
    else:
        d_parsed = None
    _run(
        lambda: InvertRequest(matrix=_load_json(matrix_file), family=family,
                              p=_parse_p_flag(p), alpha=alpha, m=m, theta=theta,
                              d=d_parsed, tol=tol, max_terms=max_terms),
        service.handle_invert,
        "invert", config, inputs={"matrix": matrix_file}, output=output,
        post_exit=lambda cert: _EXIT_PRECONDITION if cert.degenerate else 0,
    )


@main.command()
@click.argument("op", type=click.Choice(["norm", "norm1", "invert"]))
@click.argument("symbol_file", type=click.Path(exists=True))
@click.option("--grid", default=256, show_default=True)
@click.option("--tol", default=1e-10, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def wiener(op, symbol_file, grid, tol, output):
    """Wiener-algebra norms and inversion of a symbol file."""
    config = {"op": op, "grid": grid, "tol": tol, "symbol_file": symbol_file}
    _run(
        lambda: WienerRequest(op=op, symbol=_load_json(symbol_file), grid=grid, tol=tol),
        service.handle_wiener,
        "wiener", config, inputs={"symbol": symbol_file}, output=output,
    )


@main.command()
@click.argument("certificate_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Write the aggregate table as CSV.")
@click.option("-o", "--output", type=click.Path(), default=None)
def report(certificate_files, csv_path, output):
    """Aggregate inversion certificates into one table
    (n, kappa, a, b, t0, D, bound, measured, ratio)."""
    config = {"certificate_files": list(certificate_files)}
    _run(
        lambda: ReportRequest(certificates=[_load_json(f) for f in certificate_files]),
        service.handle_report,
        "report", config,
        inputs={f"certificate_{i}": f for i, f in enumerate(certificate_files)},
        output=output, csv_path=csv_path, csv_text_fn=lambda r: r.csv,
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("normctrl.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
