# mlf/runtime/executor.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import enum
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from mlf.config import MLSettings, get_settings
from mlf.core.base import MLParams
from mlf.core.dispatch import ml_derivative, relative_error_metric
from mlf.core.errors import MLError, ValidationError
from mlf.core.validations import get_validator
from mlf.fde.gramians import gramian
from mlf.fde.product_integration import trapezoidal_pi
from mlf.fde.solvers import solve_multiterm, trajectory
from mlf.fde.systems import MultitermFde
from mlf.matrix.conditioning import cond_estimate
from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGRADED = 2

# tolerance for matching a requested time to the product-integration grid
_GRID_MATCH = 1.0e-9


class Subcommand(str, enum.Enum):
    EVAL = "eval"
    DERIV = "deriv"
    MATFUN = "matfun"
    COND = "cond"
    FDE = "fde"
    GRAMIAN = "gramian"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class JobIO:
    inputs: Sequence[str] = ()
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON


@dataclass(frozen=True)
class JobSpec:
    """One CLI invocation: what to compute, with which parameters, and where to write it."""

    subcommand: Subcommand
    params: Dict[str, Any]
    io: JobIO = field(default_factory=JobIO)


@dataclass
class JobResult:
    """
    Outcome of a job. ``records`` become the JSON body, ``table`` the CSV body, and
    ``matrix`` is written to the output file of matrix-valued jobs.
    """

    records: List[Dict[str, Any]] = field(default_factory=list)
    header: List[str] = field(default_factory=list)
    table: List[List[Any]] = field(default_factory=list)
    matrix: Optional[np.ndarray] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    degraded: bool = False

    @property
    def exit_code(self) -> int:
        return EXIT_DEGRADED if self.degraded else EXIT_OK


class Executor:
    """
    Runs jobs one at a time: validates the required parameters of the subcommand,
    then hands the job to its handler.
    """

    def __init__(self, settings: Optional[MLSettings] = None) -> None:
        """
        :param settings: Tunables for every computation this executor runs.
        """
        self.settings = settings or get_settings()
        self._running = False
        self._lock = threading.Lock()
        self._handlers: Dict[Subcommand, Callable[[Dict[str, Any]], JobResult]] = {
            Subcommand.EVAL: self._eval,
            Subcommand.DERIV: self._deriv,
            Subcommand.MATFUN: self._matfun,
            Subcommand.COND: self._cond,
            Subcommand.FDE: self._fde,
            Subcommand.GRAMIAN: self._gramian,
        }

    @property
    def running(self) -> bool:
        with self._lock:
            return self._running

    def run(self, job: JobSpec) -> JobResult:
        """
        Execute ``job``.

        :raises ValidationError: If a required parameter is missing or another job is
            running on this executor.
        :raises MLError: Propagated from the computation.
        """
        try:
            subcommand = Subcommand(job.subcommand)
        except ValueError as exc:
            raise ValidationError(f"unknown subcommand {job.subcommand!r}") from exc
        get_validator().validate_job(subcommand.value, job.params)
        with self._lock:
            if self._running:
                raise ValidationError("executor is already running a job")
            self._running = True
        try:
            logger.debug("running %s with %s", subcommand.value, sorted(job.params))
            result = self._handlers[subcommand](job.params)
        except MLError as exc:
            logger.debug("%s failed: %s", subcommand.value, exc)
            raise
        finally:
            with self._lock:
                self._running = False
        if result.degraded:
            logger.warning("%s: accuracy degraded", subcommand.value)
        return result

    def _params(self, params: Dict[str, Any]) -> MLParams:
        return MLParams(float(params["alpha"]), float(params.get("beta", 1.0)))

    def _reference(self, params: Dict[str, Any], computed, result: JobResult) -> None:
        reference = params.get("reference")
        if reference is not None:
            result.diagnostics["relative_error"] = relative_error_metric(reference, computed)

    def _deriv_record(self, z: complex, k: int, p: MLParams, tau: Optional[float]) -> Dict[str, Any]:
        ev = ml_derivative(z, k, p, tau, settings=self.settings)
        return {
            "k": ev.k,
            "value_re": float(ev.value.real),
            "value_im": float(ev.value.imag),
            "method": ev.method.value,
            "err_estimate": float(ev.err_estimate),
            "degraded": ev.degraded,
        }

    def _eval(self, params: Dict[str, Any]) -> JobResult:
        z = complex(params["z"])
        record = self._deriv_record(z, int(params.get("k", 0)), self._params(params), params.get("tau"))
        result = JobResult(
            records=[record],
            header=list(record),
            table=[list(record.values())],
            degraded=record["degraded"],
        )
        self._reference(params, complex(record["value_re"], record["value_im"]), result)
        return result

    def _deriv(self, params: Dict[str, Any]) -> JobResult:
        z = complex(params["z"])
        p = self._params(params)
        records = [self._deriv_record(z, k, p, params.get("tau")) for k in range(int(params["k"]) + 1)]
        return JobResult(
            records=records,
            header=list(records[0]),
            table=[list(r.values()) for r in records],
            degraded=any(r["degraded"] for r in records),
        )

    def _matfun(self, params: Dict[str, Any]) -> JobResult:
        req = MatrixMLRequest(params["matrix"], self._params(params), params.get("tau"), params.get("delta"))
        out = ml_matrix(req, self.settings)
        result = JobResult(matrix=out.value, diagnostics=out.as_dict(), degraded=out.degraded > 0)
        self._reference(params, out.value, result)
        return result

    def _cond(self, params: Dict[str, Any]) -> JobResult:
        report = cond_estimate(
            params["matrix"],
            self._params(params),
            probes=params.get("probes"),
            norm=params.get("norm", "fro"),
            settings=self.settings,
            seed=int(params.get("seed", 0)),
        )
        record = report.as_dict()
        return JobResult(records=[record], header=list(record), table=[list(record.values())])

    def _fde(self, params: Dict[str, Any]) -> JobResult:
        problem = params["problem"]
        times = [float(t) for t in params.get("times", [1.0])]
        method = params.get("method", "closed")
        if method == "pi":
            if not isinstance(problem, MultitermFde):
                raise ValidationError("product integration applies to multiterm problems only")
            h = params.get("h")
            if h is None:
                raise ValidationError("fde: method pi needs a step size h")
            h = float(h)
            if min(times) < 0:
                raise ValidationError("fde: product integration needs nonnegative times")
            horizon = max(times)
            if horizon > 0:
                grid_t, y = trapezoidal_pi(problem, h, horizon)
            else:
                # only the initial state is asked for
                grid_t, y = np.zeros(1), np.array([problem.b[0]])
            rows = []
            for t in times:
                j = int(round(t / h))
                if abs(j * h - t) > _GRID_MATCH * max(1.0, t):
                    raise ValidationError(f"time {t} is not on the grid of step {h}")
                rows.append([grid_t[j], y[j], h])
            return JobResult(header=["t", "y", "h"], table=rows, diagnostics={"steps": len(grid_t) - 1, "h": h})
        if method != "closed":
            raise ValidationError(f"unknown fde method {method!r}; expected 'closed' or 'pi'")
        if isinstance(problem, MultitermFde):
            y = solve_multiterm(problem, times, self.settings)
            return JobResult(header=["t", "y"], table=[[t, v] for t, v in zip(times, y)])
        states = trajectory(problem, times, settings=self.settings)
        header = ["t"] + [f"y{i + 1}" for i in range(problem.n)]
        return JobResult(header=header, table=[[t, *row] for t, row in zip(times, states)])

    def _gramian(self, params: Dict[str, Any]) -> JobResult:
        out = gramian(
            params.get("kind", "controllability"),
            params["matrix"],
            params["input_matrix"],
            float(params["alpha"]),
            params["t"],
            nodes=params.get("nodes"),
            settings=self.settings,
        )
        result = JobResult(matrix=out.G, diagnostics=out.as_dict())
        self._reference(params, out.G, result)
        return result
