# mlf/core/dispatch.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Method selection for d^k/dz^k E_{alpha,beta}(z).

The series is used for small arguments when its round-off bound meets the target.
Otherwise the function itself comes from Laplace transform inversion and higher
derivatives from the Prabhakar summation formula, rewritten through first
derivatives once k reaches the balancing threshold. Among the candidates computed
for a point the one with the smallest error estimate is returned.
"""

from __future__ import annotations

import cmath
import dataclasses
import logging
import math
from typing import Iterable, List, Optional

import numpy as np

from mlf.config import MLSettings, get_settings
from mlf.core.base import DerivEval, MLParams
from mlf.core.errors import AccuracyDegraded, AccuracyLost, ArgumentOutOfRange, TargetUnreachable, ValidationError
from mlf.core.hooks import HookManager
from mlf.core.laplace import lt_derivative
from mlf.core.series import admissible_radius, ml_series
from mlf.core.summation import balanced_derivative, exact_at_zero, sf_prabhakar
from mlf.core.validations import get_validator

logger = logging.getLogger(__name__)


def _series_prefilter(z: complex, k: int, p: MLParams, tau: float, settings: MLSettings) -> bool:
    r = abs(z)
    if r > max(admissible_radius(k, p, tau), 1.0):
        return False
    return r <= 1.0 or abs(cmath.phase(z)) <= p.alpha * math.pi / 2.0 or r <= settings.cancellation_radius


def _best(candidates: Iterable[DerivEval]) -> DerivEval:
    return min(candidates, key=lambda e: e.err_estimate)


class _Dispatcher:
    """Evaluation of one request; holds the tolerance, settings and hooks shared by every sub-evaluation."""

    def __init__(self, tau: float, settings: MLSettings, hooks: Optional[HookManager]) -> None:
        self.tau = tau
        self.settings = settings
        self.hooks = hooks

    def _fallback(self, z: complex, k: int, method: str, reason: str) -> None:
        logger.debug("%s rejected at z=%s k=%d: %s", method, z, k, reason)
        if self.hooks:
            self.hooks.execute_on_fallback(z, k, method, reason)

    def series_candidate(self, z: complex, k: int, p: MLParams) -> tuple:
        """(accepted, candidate); candidate is None when the series was not attempted or failed."""
        if not _series_prefilter(z, k, p, self.tau, self.settings):
            return False, None
        try:
            return True, ml_series(z, k, p, self.tau)
        except AccuracyLost as exc:
            self._fallback(z, k, "Series", str(exc))
            return False, exc.result
        except ArgumentOutOfRange as exc:
            self._fallback(z, k, "Series", str(exc))
            return False, None

    def direct(self, z: complex, k: int, p: MLParams) -> DerivEval:
        """Series when accepted, otherwise the better of the rejected series and Laplace inversion."""
        if z == 0:
            return exact_at_zero(k, p)
        accepted, series = self.series_candidate(z, k, p)
        if accepted:
            return series
        candidates: List[DerivEval] = [] if series is None else [series]
        try:
            candidates.append(lt_derivative(z, k, p, self.tau, self.settings.contour_max_nodes))
        except (AccuracyLost, TargetUnreachable) as exc:
            self._fallback(z, k, "LaplaceInversion", str(exc))
            if isinstance(exc, AccuracyLost) and exc.result is not None:
                candidates.append(exc.result)
            if not candidates:
                raise
        return _best(candidates)

    def base(self, z: complex, p: MLParams) -> DerivEval:
        return self.direct(z, 0, p)

    def evaluate(self, z: complex, k: int, p: MLParams) -> DerivEval:
        if z == 0:
            return exact_at_zero(k, p)
        if k == 0:
            return self.direct(z, 0, p)
        accepted, series = self.series_candidate(z, k, p)
        if accepted:
            return series
        if k >= self.settings.balancing_threshold:
            combined = balanced_derivative(z, k, 1, p, self.direct)
        else:
            combined = sf_prabhakar(z, k, p, self.base)
        candidates = [combined] if series is None else [combined, series]
        return _best(candidates)


def ml_derivative(
    z: complex,
    k: int,
    p: MLParams,
    tau: Optional[float] = None,
    *,
    settings: Optional[MLSettings] = None,
    hooks: Optional[HookManager] = None,
    strict: bool = False,
) -> DerivEval:
    """
    k-th derivative of the Mittag-Leffler function E_{alpha,beta} at ``z``.

    At z = 0 the exact value k!/Gamma(alpha k + beta) is returned. A result whose error
    estimate exceeds ``settings.degraded_factor * tau * (1 + |value|)`` is returned with
    ``degraded=True`` and logged at WARNING.

    :param z: Complex argument.
    :param k: Derivative order, k >= 0.
    :param p: Parameters (alpha, beta).
    :param tau: Target accuracy; defaults to ``settings.tau``.
    :param settings: Tunables; defaults to :func:`mlf.config.get_settings`.
    :param hooks: Optional hooks notified of the evaluation and of method fallbacks.
    :param strict: Raise :class:`AccuracyDegraded` instead of flagging.
    :raises ValidationError: If ``k`` or ``tau`` is invalid.
    :raises AccuracyDegraded: In strict mode, when the result is degraded.
    """
    settings = settings or get_settings()
    validator = get_validator()
    k = validator.validate_order(k)
    tau = validator.validate_tolerance(settings.tau if tau is None else tau)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"z must be finite, got {z!r}")

    try:
        result = _Dispatcher(tau, settings, hooks).evaluate(z, k, p)
    except Exception as exc:
        if hooks:
            hooks.execute_on_error(exc)
        raise

    # a constituent that relaxed its own target is already reflected in the estimate
    degraded = result.err_estimate > settings.degraded_factor * tau * (1.0 + abs(result.value))
    if degraded != result.degraded:
        result = dataclasses.replace(result, degraded=degraded)
    if degraded:
        logger.warning(
            "degraded accuracy for E^(%d)_{%g,%g}(%s): estimate %.3e by %s",
            k,
            p.alpha,
            p.beta,
            z,
            result.err_estimate,
            result.method.value,
        )
    if hooks:
        hooks.execute_on_evaluate(z, k, result)
    if strict and result.degraded:
        raise AccuracyDegraded(f"error estimate {result.err_estimate:.3e} exceeds the target", result=result)
    return result


def mittag_leffler(z, alpha: float, beta: float = 1.0, k: int = 0, tau: Optional[float] = None, settings=None):
    """
    Elementwise E_{alpha,beta}(z) (or its k-th derivative) for scalars or arrays.

    Real input gives real output; complex input gives complex output.
    """
    p = MLParams(alpha, beta)
    arr = np.asarray(z)
    real_input = not np.iscomplexobj(arr)
    flat = arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, value in enumerate(flat):
        out[i] = ml_derivative(complex(value), k, p, tau, settings=settings).value
    out = out.reshape(arr.shape)
    if real_input:
        out = out.real
    return out if out.ndim else out[()]


def prabhakar(z: complex, alpha: float, beta: float, gamma: int, tau: Optional[float] = None, settings=None) -> complex:
    """
    Three-parameter function E^gamma_{alpha,beta}(z) for a positive integer ``gamma``,
    through E^(k+1)_{alpha,beta} = (1/k!) d^k/dz^k E_{alpha,beta-alpha k}.
    """
    if isinstance(gamma, bool) or int(gamma) != gamma or gamma < 1:
        raise ValidationError(f"gamma must be a positive integer, got {gamma!r}")
    k = int(gamma) - 1
    result = ml_derivative(z, k, MLParams(alpha, beta - alpha * k), tau, settings=settings)
    return result.value / math.factorial(k)


def relative_error_metric(exact, approx) -> float:
    """
    ||E - E~|| / (1 + ||E||): modulus for scalars, Frobenius norm for matrices.
    """
    exact = np.asarray(exact, dtype=complex)
    approx = np.asarray(approx, dtype=complex)
    if exact.shape != approx.shape:
        raise ValidationError(f"shapes differ: {exact.shape} vs {approx.shape}")
    return float(np.linalg.norm(exact - approx) / (1.0 + np.linalg.norm(exact)))
