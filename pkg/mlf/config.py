# mlf/config.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import os
from typing import Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from mlf.core.errors import ValidationError

EPS = float(np.finfo(float).eps)
# bound on the relative error of one rounded binary64 operation
UNIT_ROUNDOFF = EPS / 2.0

ENV_TAU = "ML_TAU"


class MLSettings(BaseModel):
    """
    Tunable constants of the library. Every public entry point accepts an optional
    instance; when omitted, ``get_settings()`` is used.
    """

    model_config = ConfigDict(frozen=True)

    tau: float = Field(default=1.0e-15, description="Target accuracy of scalar evaluations.")
    cancellation_radius: float = Field(default=5.0, gt=0.0)
    balancing_threshold: int = Field(default=3, ge=1)
    degraded_factor: float = Field(
        default=100.0, ge=1.0, description="Results are flagged degraded when the estimate exceeds factor * tau."
    )
    delta: float = Field(default=0.1, gt=0.0, description="Eigenvalue clustering tolerance.")
    taylor_max_order: int = Field(default=250, ge=1)
    contour_max_nodes: int = Field(default=200, ge=8)
    cond_probes: int = Field(default=5, ge=1)
    cond_max_iterations: int = Field(default=20, ge=1)
    gramian_nodes: int = Field(default=64, ge=2)
    workers: int = Field(default=1, ge=1)

    @field_validator("tau")
    @classmethod
    def _tau_above_roundoff(cls, value: float) -> float:
        if not (EPS < value < 1.0):
            raise ValueError(f"tau must satisfy eps < tau < 1, got {value!r}")
        return value

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "MLSettings":
        """
        Build settings from the environment, then apply explicit overrides.

        :param environ: Mapping to read from (defaults to ``os.environ``).
        :param overrides: Field values taking precedence over the environment.
        :raises ValidationError: If ``ML_TAU`` is not a valid float.
        """
        environ = os.environ if environ is None else environ
        values = {}
        raw = environ.get(ENV_TAU)
        if raw:
            try:
                values["tau"] = float(raw)
            except ValueError as exc:
                raise ValidationError(f"{ENV_TAU}={raw!r} is not a number") from exc
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc


_DEFAULT_SETTINGS: Optional[MLSettings] = None


def get_settings() -> MLSettings:
    """Return the process-wide default settings, reading the environment once."""
    global _DEFAULT_SETTINGS
    if _DEFAULT_SETTINGS is None:
        _DEFAULT_SETTINGS = MLSettings.from_env()
    return _DEFAULT_SETTINGS


def reset_settings() -> None:
    """Forget the cached default settings so the environment is read again."""
    global _DEFAULT_SETTINGS
    _DEFAULT_SETTINGS = None
