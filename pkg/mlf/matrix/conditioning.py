# mlf/matrix/conditioning.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Frechet derivative L(A, E) of a matrix function through the block embedding
f([[A, E], [0, A]]) = [[f(A), L(A, E)], [0, f(A)]], and estimates of the absolute
and relative condition numbers of E_{alpha,beta} at A.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse.linalg
from scipy.sparse.linalg import LinearOperator

from mlf.config import MLSettings, get_settings
from mlf.core.base import MLParams
from mlf.core.errors import ValidationError, ZeroFunctionNorm
from mlf.core.validations import get_validator
from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

logger = logging.getLogger(__name__)

MatrixFunction = Callable[[np.ndarray], np.ndarray]

# relative change of the power-iteration estimate treated as converged
_POWER_RTOL = 1.0e-3


class NormKind(str, enum.Enum):
    ONE = "One"
    FROBENIUS = "Frobenius"


@dataclass(frozen=True)
class CondReport:
    """
    Condition numbers of f at A. ``kappa_abs`` is a lower-bound estimate of ||L(A)||.
    """

    kappa_abs: float
    kappa_rel: float
    norm_used: NormKind
    probes: int
    norm_a: float
    norm_fa: float

    def as_dict(self) -> dict:
        return {
            "kappa_abs": self.kappa_abs,
            "kappa_rel": self.kappa_rel,
            "norm": self.norm_used.value,
            "probes": self.probes,
        }


def ml_matrix_function(
    p: MLParams, tau: Optional[float] = None, delta: Optional[float] = None, settings: Optional[MLSettings] = None
) -> MatrixFunction:
    """A ↦ E_{alpha,beta}(A) as a plain matrix function."""

    def f(A: np.ndarray) -> np.ndarray:
        return ml_matrix(MatrixMLRequest(A, p, tau, delta), settings).value

    return f


def frechet_apply(A, E, f: MatrixFunction) -> np.ndarray:
    """
    L(A, E) from the upper right block of f([[A, sE], [0, A]]) / s, with s scaling E
    to the norm of A.

    :raises DimensionError: If A and E differ in shape.
    """
    validator = get_validator()
    A = validator.validate_square(A)
    E = validator.validate_square(E, "E")
    validator.validate_conformal(A, E, 0, "E")
    n = A.shape[0]
    norm_e = np.linalg.norm(E)
    if norm_e == 0.0:
        return np.zeros_like(E, dtype=np.result_type(A, E, float))
    s = max(np.linalg.norm(A), 1.0) / norm_e
    X = np.zeros((2 * n, 2 * n), dtype=np.result_type(A, E))
    X[:n, :n] = A
    X[n:, n:] = A
    X[:n, n:] = s * E
    return f(X)[:n, n:] / s


class _FrechetOperator(LinearOperator):
    """vec(E) ↦ vec(L(A, E)) for real A, with transpose vec(W) ↦ vec(L(A^T, W))."""

    def __init__(self, A: np.ndarray, f: MatrixFunction) -> None:
        self._A = A
        self._f = f
        self._n = A.shape[0]
        super().__init__(dtype=np.dtype(float), shape=(self._n**2, self._n**2))

    def _apply(self, M: np.ndarray, x: np.ndarray) -> np.ndarray:
        E = np.asarray(x, dtype=float).reshape(self._n, self._n)
        return np.real(frechet_apply(M, E, self._f)).ravel()

    def _matvec(self, x):
        return self._apply(self._A, x)

    def _rmatvec(self, x):
        return self._apply(self._A.T, x)

    def _matmat(self, X):
        return np.column_stack([self._matvec(X[:, j]) for j in range(X.shape[1])])

    @property
    def T(self):
        return _FrechetOperator(self._A.T, self._f)


def _power_estimate(A: np.ndarray, f: MatrixFunction, probes: int, max_iterations: int, seed: int) -> float:
    n = A.shape[0]
    real = np.isrealobj(A)
    A_adj = A.conj().T
    best = 0.0
    for probe in range(probes):
        rng = np.random.default_rng(seed + probe)
        E = rng.standard_normal((n, n))
        if not real:
            E = E + 1j * rng.standard_normal((n, n))
        E /= np.linalg.norm(E)
        estimate = 0.0
        for iteration in range(max_iterations):
            W = frechet_apply(A, E, f)
            new = float(np.linalg.norm(W))
            if new == 0.0:
                break
            Z = frechet_apply(A_adj, W, f)
            norm_z = np.linalg.norm(Z)
            converged = abs(new - estimate) <= _POWER_RTOL * new
            estimate = new
            if norm_z == 0.0 or converged:
                break
            E = Z / norm_z
        logger.debug("probe %d: ||L|| >= %.6e after %d iterations", probe, estimate, iteration + 1)
        best = max(best, estimate)
    return best


def cond_estimate(
    A,
    p: MLParams,
    probes: Optional[int] = None,
    norm: str = "fro",
    f: Optional[MatrixFunction] = None,
    settings: Optional[MLSettings] = None,
    seed: int = 0,
) -> CondReport:
    """
    Estimate the absolute and relative condition numbers of E_{alpha,beta} at A.

    With ``norm="fro"`` ||L(A)|| is estimated by power iteration on E ↦ L(A, E) using
    L(A*, .) as adjoint, restarted from ``probes`` seeded directions; the result is a
    lower bound. ``norm="one"`` (real A only) applies the block 1-norm estimator to the
    vectorized Frechet map.

    :param A: Square matrix.
    :param p: Parameters (alpha, beta).
    :param probes: Number of starting directions; defaults to ``settings.cond_probes``.
    :param norm: "fro" or "one".
    :param f: Matrix function to use instead of E_{alpha,beta}.
    :raises ZeroFunctionNorm: If f(A) = 0.
    """
    settings = settings or get_settings()
    A = get_validator().validate_square(A)
    probes = settings.cond_probes if probes is None else int(probes)
    if probes < 1:
        raise ValidationError(f"probes must be at least 1, got {probes}")
    f = f or ml_matrix_function(p, settings=settings)
    fA = f(A)

    if norm == "fro":
        kind = NormKind.FROBENIUS
        norm_a = float(np.linalg.norm(A))
        norm_fa = float(np.linalg.norm(fA))
        kappa_abs = _power_estimate(A, f, probes, settings.cond_max_iterations, seed)
    elif norm == "one":
        if not np.isrealobj(A):
            raise ValidationError("the 1-norm estimator needs a real matrix")
        kind = NormKind.ONE
        norm_a = float(np.linalg.norm(A, 1))
        norm_fa = float(np.linalg.norm(fA, 1))
        kappa_abs = float(scipy.sparse.linalg.onenormest(_FrechetOperator(A, f)))
    else:
        raise ValidationError(f"norm must be 'fro' or 'one', got {norm!r}")

    if norm_fa == 0.0:
        raise ZeroFunctionNorm("relative condition number is undefined when f(A) = 0")
    kappa_rel = kappa_abs * norm_a / norm_fa
    logger.debug("condition: kappa_abs=%.6e kappa_rel=%.6e (%s)", kappa_abs, kappa_rel, kind.value)
    return CondReport(kappa_abs, kappa_rel, kind, probes, norm_a, norm_fa)
