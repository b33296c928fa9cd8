# tests/conftest.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "mlf",
    derandomize=True,
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("mlf")


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Every test starts from default settings, unaffected by ML_TAU in the environment."""
    from mlf.config import ENV_TAU, reset_settings

    monkeypatch.delenv(ENV_TAU, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def ml_settings():
    from mlf.config import MLSettings

    return MLSettings()


@pytest.fixture
def rng():
    """Seeded generator for random matrices and points."""
    return np.random.default_rng(20240601)


@pytest.fixture
def params():
    from mlf.core.base import MLParams

    return MLParams(0.8, 1.2)


@pytest.fixture
def error_classes():
    from mlf.core.errors import AccuracyError, MatrixFunctionError, MLError, ValidationError

    return MLError, ValidationError, AccuracyError, MatrixFunctionError


@pytest.fixture
def redheffer_8():
    from mlf.matrix.gallery import redheffer

    return -redheffer(8)


@pytest.fixture
def example3_problem():
    """D^{3.2} y + 4 D^{2.4} y + 7 D^{1.6} y + 6 D^{0.8} y + 2 y = -t^2/2 + 2t, zero initial values."""
    from fractions import Fraction

    from mlf.fde.systems import MultitermFde, PolynomialForcing

    return MultitermFde([2, 6, 7, 4, 1], Fraction(4, 5), forcing=PolynomialForcing((0.0, 2.0, -0.5)))


@pytest.fixture
def hook_recorder():
    """A hook that records every callback it receives."""

    class Recorder:
        def __init__(self):
            self.evaluated = []
            self.fallbacks = []
            self.errors = []

        def on_evaluate(self, z, k, result):
            self.evaluated.append((z, k, result))

        def on_fallback(self, z, k, from_method, reason):
            self.fallbacks.append((z, k, from_method, reason))

        def on_error(self, error):
            self.errors.append(error)

    return Recorder()
