# mlf/matrix/matrix_ml.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""Matrix Mittag-Leffler function E_{alpha,beta}(A) by the Schur-Parlett engine."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from mlf.config import EPS, MLSettings, get_settings
from mlf.core.base import MLParams
from mlf.core.dispatch import ml_derivative
from mlf.core.errors import DerivativeBudgetExceeded, SlowTaylorDecay, ValidationError
from mlf.core.hooks import DiagnosticsHook, HookManager
from mlf.core.validations import get_validator
from mlf.matrix.parlett import FunmResult, funm_eval, funm_from_schur
from mlf.matrix.schur import SchurForm, schur_decompose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixMLRequest:
    """E_{alpha,beta}(A) request; ``tau`` and ``delta`` default to the settings."""

    A: np.ndarray
    params: MLParams
    tau: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self) -> None:
        validator = get_validator()
        object.__setattr__(self, "A", validator.validate_square(self.A))
        if self.tau is not None:
            validator.validate_tolerance(self.tau)
        if self.delta is not None and not self.delta > 0:
            raise ValidationError(f"delta must be positive, got {self.delta!r}")


@dataclass(frozen=True)
class BlockDiagnostics:
    start: int
    size: int
    sigma: complex
    terms: int
    err_estimate: float


@dataclass
class MatrixMLResult:
    """
    E_{alpha,beta}(A) and how it was obtained: the highest derivative order requested
    from the scalar evaluator, the diagonal blocks with the worst scalar error estimate
    at each block center, and the imaginary part discarded for real input.
    """

    value: np.ndarray
    max_order: int
    blocks: List[BlockDiagnostics] = field(default_factory=list)
    imag_discarded: float = 0.0
    degraded: int = 0
    path: str = "schur-parlett"

    def as_dict(self) -> dict:
        return {
            "max_derivative_order": self.max_order,
            "path": self.path,
            "block_sizes": [b.size for b in self.blocks],
            "block_errors": [b.err_estimate for b in self.blocks],
            "imag_discarded": self.imag_discarded,
            "degraded_evaluations": self.degraded,
        }


class MLDerivativeOracle:
    """
    Derivatives of E_{alpha,beta} at block centers, computed on demand and cached per
    center so a block asking for more orders does not recompute the lower ones.
    """

    def __init__(self, params: MLParams, tau: float, settings: MLSettings) -> None:
        self.params = params
        self.tau = tau
        self.settings = settings
        self.diagnostics = DiagnosticsHook()
        self._hooks = HookManager([self.diagnostics])
        self._values: Dict[complex, List[complex]] = {}
        self._errors: Dict[complex, float] = {}
        self._lock = threading.Lock()

    def __call__(self, sigma: complex, max_order: int) -> List[complex]:
        sigma = complex(sigma)
        values = self._values.get(sigma, [])
        worst = self._errors.get(sigma, 0.0)
        new = list(values)
        for k in range(len(values), max_order + 1):
            result = ml_derivative(sigma, k, self.params, self.tau, settings=self.settings, hooks=self._hooks)
            new.append(result.value)
            worst = max(worst, result.err_estimate)
        if len(new) > len(values):
            with self._lock:
                self._values[sigma] = new
                self._errors[sigma] = worst
        return new[: max_order + 1]

    def error_at(self, sigma: complex) -> float:
        return self._errors.get(complex(sigma), 0.0)

    @property
    def max_order(self) -> int:
        return max(self.diagnostics.max_order, 0)


def _finish(fr: FunmResult, oracle: MLDerivativeOracle, real_input: bool) -> MatrixMLResult:
    F = fr.F
    imag = 0.0
    if real_input:
        imag = float(np.max(np.abs(F.imag))) if F.size else 0.0
        F = F.real.copy()
    blocks = [BlockDiagnostics(b.start, b.size, b.sigma, b.terms, oracle.error_at(b.sigma)) for b in fr.blocks]
    return MatrixMLResult(F, oracle.max_order, blocks, imag, oracle.diagnostics.degraded, fr.path)


def _run(evaluate, oracle: MLDerivativeOracle, max_order: int):
    try:
        return evaluate()
    except SlowTaylorDecay as exc:
        raise DerivativeBudgetExceeded(
            f"derivative order budget {max_order} exhausted (highest order requested {oracle.max_order}): {exc}"
        ) from exc


def ml_matrix(req: MatrixMLRequest, settings: Optional[MLSettings] = None) -> MatrixMLResult:
    """
    E_{alpha,beta}(A) for a dense square matrix.

    Real input gives a real result; the imaginary part left by the complex Schur
    round trip is reported in ``imag_discarded``.

    :param req: Matrix, parameters and tolerances.
    :param settings: Tunables; defaults to :func:`mlf.config.get_settings`.
    :raises DerivativeBudgetExceeded: If a diagonal block needs more derivatives than
        ``settings.taylor_max_order``.
    """
    settings = settings or get_settings()
    tau = settings.tau if req.tau is None else req.tau
    delta = settings.delta if req.delta is None else req.delta
    oracle = MLDerivativeOracle(req.params, tau, settings)
    fr = _run(
        lambda: funm_eval(req.A, oracle, delta, settings.taylor_max_order, settings.workers),
        oracle,
        settings.taylor_max_order,
    )
    result = _finish(fr, oracle, np.isrealobj(req.A))
    logger.debug(
        "E_{%g,%g}(A): n=%d, path %s, max order %d",
        req.params.alpha,
        req.params.beta,
        req.A.shape[0],
        fr.path,
        result.max_order,
    )
    return result


class MatrixMLEvaluator:
    """
    Evaluates E_{alpha,b}(c A) for many scalars c (and optionally several b) from a
    single factorization of A: a Schur form in general, a spectral decomposition for
    Hermitian or diagonal A.
    """

    def __init__(
        self, A, alpha: float, tau: Optional[float] = None, delta: Optional[float] = None, settings=None
    ) -> None:
        self.settings = settings or get_settings()
        self.A = get_validator().validate_square(A)
        self.alpha = float(alpha)
        MLParams(self.alpha)
        self.tau = self.settings.tau if tau is None else get_validator().validate_tolerance(tau)
        self.delta = self.settings.delta if delta is None else delta
        self.real_input = np.isrealobj(self.A)
        self.max_order = 0
        n = self.A.shape[0]
        norm_a = np.linalg.norm(self.A)
        self._spectral = None
        self._schur: Optional[SchurForm] = None
        if np.linalg.norm(self.A - self.A.conj().T) <= n * EPS * norm_a:
            lam, V = np.linalg.eigh((self.A + self.A.conj().T) / 2.0)
            self._spectral = (lam.astype(complex), V)
        else:
            self._schur = schur_decompose(self.A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def __call__(self, c: float, beta: float = 1.0) -> np.ndarray:
        """E_{alpha,beta}(c A)."""
        params = MLParams(self.alpha, beta)
        oracle = MLDerivativeOracle(params, self.tau, self.settings)
        if self._spectral is not None:
            lam, V = self._spectral
            values = np.array([oracle(c * x, 0)[0] for x in lam], dtype=complex)
            F = (V * values) @ V.conj().T
        else:
            S = SchurForm(self._schur.Q, c * self._schur.T)
            fr = _run(
                lambda: funm_from_schur(S, oracle, self.delta, self.settings.taylor_max_order, 1),
                oracle,
                self.settings.taylor_max_order,
            )
            F = fr.F
        self.max_order = max(self.max_order, oracle.max_order)
        return F.real.copy() if self.real_input else F
