# mlf/core/base.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from mlf.core.errors import ValidationError


@dataclass(frozen=True)
class MLParams:
    """Parameter pair (alpha, beta) of E_{alpha,beta}."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValidationError(f"alpha must be a positive real number, got {self.alpha!r}")
        if not math.isfinite(self.beta):
            raise ValidationError(f"beta must be a finite real number, got {self.beta!r}")

    def shifted(self, beta: float) -> "MLParams":
        """Same alpha, different beta."""
        return MLParams(self.alpha, beta)


class Method(str, enum.Enum):
    SERIES = "Series"
    LAPLACE_INVERSION = "LaplaceInversion"
    PRABHAKAR_SF = "PrabhakarSF"
    DJRBASHIAN_SF = "DjrbashianSF"
    BALANCED = "Balanced"
    EXACT0 = "Exact0"


@dataclass(frozen=True)
class SeriesBounds:
    """
    A-posteriori round-off bounds of a truncated series. ``bound_used`` is the
    arithmetic mean of the term-weighted bound and the partial-sum bound.
    """

    bound_coarse: float
    bound_sharp: float

    @property
    def bound_used(self) -> float:
        return 0.5 * (self.bound_coarse + self.bound_sharp)


@dataclass(frozen=True)
class DerivEval:
    """
    A computed value of the k-th derivative of E_{alpha,beta} together with how it
    was obtained and an absolute a-posteriori error estimate.
    """

    value: complex
    k: int
    method: Method
    err_estimate: float
    terms_or_nodes: int = 0
    bounds: Optional[SeriesBounds] = None
    degraded: bool = False

    def with_value(self, value: complex) -> "DerivEval":
        return replace(self, value=value)


@dataclass(frozen=True)
class ContourSpec:
    """
    Parabolic contour sigma(u) = mu (iu + 1)^2 sampled at u_j = j h, |j| <= N, and the
    poles lying to its right whose residues are added explicitly.
    """

    mu: float
    h: float
    N: int
    subtracted_poles: Tuple[complex, ...] = field(default_factory=tuple)
    log_tolerance: float = 0.0

    def sigma(self, u):
        return self.mu * (1j * u + 1.0) ** 2

    def sigma_prime(self, u):
        return 2j * self.mu * (1j * u + 1.0)


@dataclass(frozen=True)
class ResiduePoly:
    """Coefficients of P_k and of the reciprocal-power expansion H^(k), lowest order first."""

    k: int
    p_coeffs: Tuple[float, ...]
    h_coeffs: Tuple[float, ...]

    def __call__(self, x):
        total = 0.0
        for coeff in reversed(self.p_coeffs):
            total = total * x + coeff
        return total


@dataclass(frozen=True)
class SFCoeffs:
    """Coefficients c_0^(k)..c_k^(k) shared by both summation formulas."""

    k: int
    c: Tuple[float, ...]
