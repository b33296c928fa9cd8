# mlf/cli.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Command-line front end.

Exit codes: 0 on success, 1 on usage or computation errors, 2 when a result was
computed but its accuracy is degraded.
"""

from __future__ import annotations

import enum
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import click
import typer
from rich.console import Console
from rich.logging import RichHandler

try:  # newer typer releases vendor click as typer._click
    from typer._click import exceptions as _typer_click_exc

    _CLICK_EXCEPTIONS = (click.ClickException, _typer_click_exc.ClickException)
    _CLICK_ABORTS = (click.Abort, _typer_click_exc.Abort)
except ImportError:
    _CLICK_EXCEPTIONS = (click.ClickException,)
    _CLICK_ABORTS = (click.Abort,)

from mlf.config import MLSettings
from mlf.core.errors import MLError
from mlf.io import dumps_csv, dumps_json, parse_complex, parse_time_grid, read_matrix, read_problem, write_matrix
from mlf.runtime.executor import EXIT_ERROR, EXIT_OK, Executor, JobIO, JobResult, JobSpec, OutputFormat, Subcommand

app = typer.Typer(
    name="mlf",
    help="Mittag-Leffler functions of scalar and matrix arguments, and linear fractional equations.",
    no_args_is_help=True,
    add_completion=False,
)

_stderr = Console(stderr=True)


class Norm(str, enum.Enum):
    FRO = "fro"
    ONE = "one"


class FdeMethod(str, enum.Enum):
    CLOSED = "closed"
    PI = "pi"


class Kind(str, enum.Enum):
    CONTROLLABILITY = "controllability"
    OBSERVABILITY = "observability"


def _configure_logging(verbose: bool) -> None:
    logger = logging.getLogger("mlf")
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=_stderr, show_path=verbose, rich_tracebacks=False))


@app.callback()
def _main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Log method choices at DEBUG level.")) -> None:
    _configure_logging(verbose)


@contextmanager
def _guard() -> Iterator[None]:
    try:
        yield
    except MLError as exc:
        _stderr.print(f"[bold red]error:[/] {type(exc).__name__}: {exc}", highlight=False)
        raise typer.Exit(EXIT_ERROR) from exc


def _run(subcommand: Subcommand, params: Dict[str, Any], settings: MLSettings, io: JobIO) -> JobResult:
    return Executor(settings).run(JobSpec(subcommand, params, io))


def _write_text(text: str, output: Optional[Path]) -> None:
    if output is None:
        typer.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")


def _emit(result: JobResult, io: JobIO, single: bool = True) -> None:
    output = Path(io.output) if io.output else None
    if io.format is OutputFormat.CSV:
        _write_text(dumps_csv(result.header, result.table), output)
        return
    if single and len(result.records) == 1:
        body = dict(result.records[0])
        body.update(result.diagnostics)
    elif result.records:
        body = {"records": result.records, **result.diagnostics}
    else:
        body = {"columns": result.header, "rows": result.table, **result.diagnostics}
    _write_text(dumps_json(body), output)


def _finish(result: JobResult) -> None:
    if result.exit_code != EXIT_OK:
        raise typer.Exit(result.exit_code)


def _settings(tau: Optional[float], workers: Optional[int] = None) -> MLSettings:
    return MLSettings.from_env(tau=tau, workers=workers)


_TAU = typer.Option(None, "--tau", help="Target accuracy; overrides ML_TAU.")
_FORMAT = typer.Option(OutputFormat.JSON, "--format", "-f", case_sensitive=False)
_OUTPUT = typer.Option(None, "--output", "-o", help="Write to this file instead of standard output.")


@app.command("eval")
def cmd_eval(
    alpha: float = typer.Option(..., "--alpha"),
    beta: float = typer.Option(1.0, "--beta"),
    z: str = typer.Option(..., "--z", help='Complex argument as "a+bi".'),
    k: int = typer.Option(0, "--k", min=0, help="Derivative order."),
    tau: Optional[float] = _TAU,
    reference: Optional[str] = typer.Option(None, "--reference", help="Reference value a+bi."),
    fmt: OutputFormat = _FORMAT,
    output: Optional[Path] = _OUTPUT,
) -> None:
    """Evaluate the k-th derivative of E_{alpha,beta} at z."""
    with _guard():
        params = {"alpha": alpha, "beta": beta, "z": parse_complex(z), "k": k}
        if reference is not None:
            params["reference"] = parse_complex(reference)
        io = JobIO((), str(output) if output else None, fmt)
        result = _run(Subcommand.EVAL, params, _settings(tau), io)
        _emit(result, io)
    _finish(result)


@app.command("deriv")
def cmd_deriv(
    alpha: float = typer.Option(..., "--alpha"),
    beta: float = typer.Option(1.0, "--beta"),
    z: str = typer.Option(..., "--z"),
    k: int = typer.Option(..., "--k", min=0, help="Highest derivative order."),
    tau: Optional[float] = _TAU,
    fmt: OutputFormat = _FORMAT,
    output: Optional[Path] = _OUTPUT,
) -> None:
    """Tabulate the derivatives of orders 0..k of E_{alpha,beta} at z."""
    with _guard():
        params = {"alpha": alpha, "beta": beta, "z": parse_complex(z), "k": k}
        io = JobIO((), str(output) if output else None, fmt)
        result = _run(Subcommand.DERIV, params, _settings(tau), io)
        _emit(result, io, single=False)
    _finish(result)


@app.command("matfun")
def cmd_matfun(
    matrix: Path = typer.Argument(..., help="Matrix file (CSV with a+bi tokens, or Matrix Market)."),
    alpha: float = typer.Option(..., "--alpha"),
    beta: float = typer.Option(1.0, "--beta"),
    tau: Optional[float] = _TAU,
    delta: Optional[float] = typer.Option(None, "--delta", help="Eigenvalue clustering tolerance."),
    output: Path = typer.Option(..., "--output", "-o", help="File receiving E_{alpha,beta}(A)."),
    reference: Optional[Path] = typer.Option(None, "--reference", help="Reference matrix file."),
    workers: Optional[int] = typer.Option(None, "--workers", min=1),
) -> None:
    """Compute E_{alpha,beta}(A); diagnostics go to standard output as JSON."""
    with _guard():
        params: Dict[str, Any] = {"alpha": alpha, "beta": beta, "matrix": read_matrix(matrix), "delta": delta}
        if reference is not None:
            params["reference"] = read_matrix(reference)
        io = JobIO((str(matrix),), str(output), OutputFormat.JSON)
        result = _run(Subcommand.MATFUN, params, _settings(tau, workers), io)
        write_matrix(output, result.matrix)
        _emit(result, JobIO(io.inputs, None, OutputFormat.JSON))
    _finish(result)


@app.command("cond")
def cmd_cond(
    matrix: Path = typer.Argument(...),
    alpha: float = typer.Option(..., "--alpha"),
    beta: float = typer.Option(1.0, "--beta"),
    tau: Optional[float] = _TAU,
    probes: Optional[int] = typer.Option(None, "--probes", min=1),
    norm: Norm = typer.Option(Norm.FRO, "--norm", case_sensitive=False),
    seed: int = typer.Option(0, "--seed"),
    fmt: OutputFormat = _FORMAT,
    output: Optional[Path] = _OUTPUT,
) -> None:
    """Estimate the absolute and relative condition numbers of E_{alpha,beta} at A."""
    with _guard():
        params = {
            "alpha": alpha,
            "beta": beta,
            "matrix": read_matrix(matrix),
            "probes": probes,
            "norm": norm.value,
            "seed": seed,
        }
        io = JobIO((str(matrix),), str(output) if output else None, fmt)
        result = _run(Subcommand.COND, params, _settings(tau), io)
        _emit(result, io)
    _finish(result)


@app.command("fde")
def cmd_fde(
    problem: Path = typer.Argument(..., help="JSON problem description."),
    t: str = typer.Option("1", "--t", help='Times as "start:step:stop" or a comma list.'),
    method: FdeMethod = typer.Option(FdeMethod.CLOSED, "--method", case_sensitive=False),
    h: Optional[float] = typer.Option(None, "--h", help="Step size of the product-integration rule."),
    tau: Optional[float] = _TAU,
    fmt: OutputFormat = typer.Option(OutputFormat.CSV, "--format", "-f", case_sensitive=False),
    output: Optional[Path] = _OUTPUT,
    workers: Optional[int] = typer.Option(None, "--workers", min=1),
) -> None:
    """Solve a linear fractional system or multiterm equation on a time grid."""
    with _guard():
        params = {"problem": read_problem(problem), "times": parse_time_grid(t), "method": method.value, "h": h}
        io = JobIO((str(problem),), str(output) if output else None, fmt)
        result = _run(Subcommand.FDE, params, _settings(tau, workers), io)
        _emit(result, io, single=False)
    _finish(result)


@app.command("gramian")
def cmd_gramian(
    matrix: Path = typer.Argument(..., help="State matrix A."),
    input_matrix: Path = typer.Argument(..., help="B (controllability) or C (observability)."),
    alpha: float = typer.Option(..., "--alpha"),
    t: float = typer.Option(..., "--t"),
    kind: Kind = typer.Option(Kind.CONTROLLABILITY, "--kind", case_sensitive=False),
    nodes: Optional[int] = typer.Option(None, "--nodes"),
    tau: Optional[float] = _TAU,
    output: Path = typer.Option(..., "--output", "-o", help="File receiving the Gramian."),
    reference: Optional[Path] = typer.Option(None, "--reference"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1),
) -> None:
    """Controllability or observability Gramian at time t; diagnostics as JSON."""
    with _guard():
        params: Dict[str, Any] = {
            "alpha": alpha,
            "t": t,
            "kind": kind.value,
            "nodes": nodes,
            "matrix": read_matrix(matrix),
            "input_matrix": read_matrix(input_matrix),
        }
        if reference is not None:
            params["reference"] = read_matrix(reference)
        io = JobIO((str(matrix), str(input_matrix)), str(output), OutputFormat.JSON)
        result = _run(Subcommand.GRAMIAN, params, _settings(tau, workers), io)
        write_matrix(output, result.matrix)
        _emit(result, JobIO(io.inputs, None, OutputFormat.JSON))
    _finish(result)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code; usage errors map to 1."""
    command = typer.main.get_command(app)
    try:
        code = command.main(args=argv, prog_name="mlf", standalone_mode=False)
    except _CLICK_EXCEPTIONS as exc:
        exc.show()
        return EXIT_ERROR
    except _CLICK_ABORTS:
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
