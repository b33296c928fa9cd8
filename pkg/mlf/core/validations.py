# mlf/core/validations.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import math
from typing import Any, Mapping, Optional

import numpy as np

from mlf.config import EPS
from mlf.core.errors import DimensionError, ValidationError

REQUIRED_KEYS = {
    "eval": ("alpha", "z"),
    "deriv": ("alpha", "z", "k"),
    "matfun": ("alpha", "matrix"),
    "cond": ("alpha", "matrix"),
    "fde": ("problem",),
    "gramian": ("alpha", "matrix", "input_matrix", "t"),
}


class Validator:
    """
    Validates inputs at the public entry points before any computation starts.
    """

    def __init__(self) -> None:
        self._rules_engine = _ValidationRulesEngine()

    def validate_tolerance(self, tau: float) -> float:
        """
        :raises ValidationError: Unless eps < tau < 1.
        """
        return self._rules_engine.validate_tolerance(tau)

    def validate_order(self, k: int) -> int:
        """
        :raises ValidationError: If ``k`` is not a nonnegative integer.
        """
        return self._rules_engine.validate_order(k)

    def validate_square(self, A: Any, name: str = "A") -> np.ndarray:
        """
        Return ``A`` as a 2-D numpy array.

        :raises DimensionError: If ``A`` is not a square matrix.
        :raises ValidationError: If ``A`` has non-finite entries.
        """
        return self._rules_engine.validate_square(A, name)

    def validate_conformal(self, A: np.ndarray, B: np.ndarray, axis: int, name: str) -> None:
        """
        :raises DimensionError: If ``B.shape[axis]`` differs from the order of ``A``.
        """
        self._rules_engine.validate_conformal(A, B, axis, name)

    def validate_job(self, subcommand: str, params: Mapping[str, Any]) -> None:
        """
        :raises ValidationError: If ``subcommand`` is unknown or a required key is missing.
        """
        self._rules_engine.validate_job(subcommand, params)


class _ValidationRulesEngine:
    """
    Internal engine applying the rule set. Centralizes validation logic for easier
    maintenance.
    """

    def __init__(self) -> None:
        self._default_rules = _DefaultValidationRules

    def validate_tolerance(self, tau: float) -> float:
        return self._default_rules.validate_tolerance(tau)

    def validate_order(self, k: int) -> int:
        return self._default_rules.validate_order(k)

    def validate_square(self, A: Any, name: str) -> np.ndarray:
        return self._default_rules.validate_square(A, name)

    def validate_conformal(self, A: np.ndarray, B: np.ndarray, axis: int, name: str) -> None:
        self._default_rules.validate_conformal(A, B, axis, name)

    def validate_job(self, subcommand: str, params: Mapping[str, Any]) -> None:
        self._default_rules.validate_job(subcommand, params)


class _DefaultValidationRules:
    """
    Built-in rules for tolerances, derivative orders, matrices and CLI jobs.
    """

    @staticmethod
    def validate_tolerance(tau: float) -> float:
        try:
            tau = float(tau)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"tau must be a real number, got {tau!r}") from exc
        if not (EPS < tau < 1.0):
            raise ValidationError(f"tau must satisfy eps < tau < 1, got {tau!r}")
        return tau

    @staticmethod
    def validate_order(k: int) -> int:
        if isinstance(k, bool) or int(k) != k or k < 0:
            raise ValidationError(f"derivative order must be a nonnegative integer, got {k!r}")
        return int(k)

    @staticmethod
    def validate_square(A: Any, name: str) -> np.ndarray:
        A = np.asarray(A)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"{name} must be a square matrix, got shape {A.shape}")
        if A.shape[0] == 0:
            raise DimensionError(f"{name} must have at least one row")
        if not np.all(np.isfinite(A)):
            raise ValidationError(f"{name} has non-finite entries")
        return A

    @staticmethod
    def validate_conformal(A: np.ndarray, B: np.ndarray, axis: int, name: str) -> None:
        if B.ndim < axis + 1 or B.shape[axis] != A.shape[0]:
            raise DimensionError(f"{name} with shape {B.shape} is not conformal with a {A.shape[0]}x{A.shape[0]} matrix")

    @staticmethod
    def validate_job(subcommand: str, params: Mapping[str, Any]) -> None:
        required = REQUIRED_KEYS.get(subcommand)
        if required is None:
            raise ValidationError(f"unknown subcommand {subcommand!r}")
        missing = [key for key in required if params.get(key) is None]
        if missing:
            raise ValidationError(f"{subcommand}: missing required parameter(s) {', '.join(missing)}")


_VALIDATOR: Optional[Validator] = None


def get_validator() -> Validator:
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = Validator()
    return _VALIDATOR


def finite_real(value: float, name: str) -> float:
    """Return ``value`` as float, rejecting NaN and infinities."""
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value
