# mlf/io.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
File formats: dense matrix CSV with "a+bi" tokens, Matrix Market input, JSON and CSV
output with fixed 17-significant-digit formatting, and the FDE problem schema.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, TextIO, Union

import numpy as np
import scipy.io
from pydantic import BaseModel, ConfigDict, Field, ValidationError as SchemaError, field_validator

from mlf.core.errors import IrrationalOrder, ParseError, ValidationError
from mlf.fde.systems import LinearFdeSystem, MultitermFde, PolynomialForcing

_COMPLEX_TOKEN = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


def format_real(x: float) -> str:
    """17 significant digits, lowercase scientific notation."""
    return f"{float(x):.16e}"


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.16e}{z.imag:+.16e}i"


def format_value(x: Any) -> str:
    if isinstance(x, (complex, np.complexfloating)):
        return format_complex(x)
    if isinstance(x, (float, np.floating)):
        return format_real(x)
    return str(x)


def parse_complex(token: str) -> complex:
    """
    Parse "a+bi", "a", "bi" (``j`` accepted for ``i``).

    :raises ParseError: If the token is not a finite complex number.
    """
    text = str(token).strip().replace(" ", "")
    if not text or not _COMPLEX_TOKEN.match(text):
        raise ParseError(f"not a complex number: {token!r}")
    if text[-1] in "ij":
        # a bare unit as in "i", "-i" or "2+i"
        text = re.sub(r"(^|[+-])j$", r"\g<1>1j", text[:-1] + "j")
    try:
        value = complex(text)
    except ValueError as exc:
        raise ParseError(f"not a complex number: {token!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ParseError(f"complex number must be finite: {token!r}")
    return value


def _is_matrix_market(path: Path) -> bool:
    if path.suffix.lower() == ".mtx":
        return True
    with path.open("r", encoding="utf-8") as handle:
        return handle.readline().startswith("%%MatrixMarket")


def read_matrix(path: Union[str, Path]) -> np.ndarray:
    """
    Read a dense matrix from CSV ("a+bi" tokens, comma separated, one row per line,
    ``#`` comments) or from a Matrix Market file. Real when every entry is real.

    :raises ParseError: On unreadable files, bad tokens or ragged rows.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"{path}: no such file")
    if _is_matrix_market(path):
        try:
            data = scipy.io.mmread(str(path))
        except (ValueError, OSError) as exc:
            raise ParseError(f"{path}: not a readable Matrix Market file: {exc}") from exc
        return np.asarray(data.toarray() if hasattr(data, "toarray") else data)

    rows: List[List[complex]] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([parse_complex(token) for token in row])
            except ParseError as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(f"{path}:{line_no}: expected {len(rows[0])} entries, got {len(rows[-1])}")
    if not rows:
        raise ParseError(f"{path}: empty matrix file")
    M = np.array(rows, dtype=complex)
    return M.real.copy() if not np.any(M.imag) else M


def write_matrix(path: Union[str, Path, TextIO], M: np.ndarray) -> None:
    """Write ``M`` as CSV; real matrices as plain numbers, complex ones as "a+bi"."""
    M = np.atleast_2d(np.asarray(M))
    fmt = format_complex if np.iscomplexobj(M) else format_real
    lines = [",".join(fmt(x) for x in row) for row in M]
    text = "\n".join(lines) + "\n"
    if isinstance(path, (str, Path)):
        Path(path).write_text(text, encoding="utf-8")
    else:
        path.write(text)


def _json_text(obj: Any, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_text(v, indent + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_json_text(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format_real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return json.dumps(format_complex(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dumps_json(obj: Dict[str, Any]) -> str:
    """One JSON object with sorted keys and fixed float formatting."""
    return _json_text(obj) + "\n"


def dumps_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(x) for x in row])
    return buffer.getvalue()


def parse_time_grid(spec: str) -> List[float]:
    """
    "start:step:stop" (inclusive) or a comma-separated list of times.

    :raises ParseError: On malformed grids.
    """
    text = str(spec).strip()
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if not step > 0 or stop < start:
                raise ParseError(f"time grid {spec!r} needs a positive step and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(count)]
        times = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"malformed time grid {spec!r}") from exc
    if not times:
        raise ParseError(f"empty time grid {spec!r}")
    return times


class _RationalOrder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: int = Field(gt=0)
    q: int = Field(gt=0)


class _Forcing(BaseModel):
    model_config = ConfigDict(extra="forbid")

    poly: Optional[List[float]] = None
    direction: Optional[List[float]] = None
    none: Optional[Any] = None


class _MultitermProblem(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["multiterm"]
    a: List[float] = Field(min_length=2)
    alpha: Union[_RationalOrder, float, str]
    b: List[float] = Field(default_factory=list)
    forcing: Optional[_Forcing] = None


class _SystemProblem(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["system"]
    A: List[List[float]]
    alpha: Union[_RationalOrder, float]
    Y0: List[List[float]]
    forcing: Optional[_Forcing] = None

    @field_validator("A")
    @classmethod
    def _square(cls, value: List[List[float]]) -> List[List[float]]:
        if not value or any(len(row) != len(value) for row in value):
            raise ValueError("A must be a non-empty square matrix")
        return value


class _Problem(BaseModel):
    problem: Union[_MultitermProblem, _SystemProblem] = Field(discriminator="type")


def _schema_message(exc: SchemaError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(x) for x in error["loc"][1:]) or "<root>"
        parts.append(f"field {where}: {error['msg']}")
    return "; ".join(parts)


def _alpha_value(alpha):
    if isinstance(alpha, _RationalOrder):
        return (alpha.p, alpha.q)
    return alpha


def parse_problem(text: str, source: str = "<problem>") -> Union[MultitermFde, LinearFdeSystem]:
    """
    Build a :class:`MultitermFde` or :class:`LinearFdeSystem` from the JSON schema
    ``{type: "multiterm"|"system", a | A, alpha: {p, q} | real, b | Y0, forcing}``.

    :raises ParseError: With line/column context for JSON syntax errors and field
        context for schema violations.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        problem = _Problem(problem=raw).problem
    except SchemaError as exc:
        raise ParseError(f"{source}: {_schema_message(exc)}") from exc

    forcing = None
    if problem.forcing is not None and problem.forcing.poly is not None:
        forcing = PolynomialForcing(tuple(problem.forcing.poly), problem.forcing.direction)
    try:
        if isinstance(problem, _MultitermProblem):
            return MultitermFde(problem.a, _alpha_value(problem.alpha), problem.b, forcing)
        alpha = problem.alpha
        if isinstance(alpha, _RationalOrder):
            alpha = alpha.p / alpha.q
        return LinearFdeSystem(np.array(problem.A, dtype=float), alpha, [np.array(y) for y in problem.Y0], forcing)
    except IrrationalOrder:
        raise
    except ValidationError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def read_problem(path: Union[str, Path]) -> Union[MultitermFde, LinearFdeSystem]:
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"{path}: no such file")
    return parse_problem(path.read_text(encoding="utf-8"), str(path))
