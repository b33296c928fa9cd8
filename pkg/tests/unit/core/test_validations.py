# tests/unit/core/test_validations.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

import math

import numpy as np
import pytest


def test_validate_tolerance():
    from mlf.core.errors import ValidationError
    from mlf.core.validations import Validator

    v = Validator()
    assert v.validate_tolerance("1e-10") == 1e-10
    for bad in (1e-17, 0.0, 1.0, "tight", None):
        with pytest.raises(ValidationError):
            v.validate_tolerance(bad)


def test_validate_order():
    from mlf.core.errors import ValidationError
    from mlf.core.validations import Validator

    v = Validator()
    assert v.validate_order(3) == 3
    assert v.validate_order(2.0) == 2
    for bad in (-1, 0.5, True):
        with pytest.raises(ValidationError):
            v.validate_order(bad)


def test_validate_square():
    from mlf.core.errors import DimensionError, ValidationError
    from mlf.core.validations import Validator

    v = Validator()
    assert v.validate_square(2.0).shape == (1, 1)
    assert v.validate_square([[1, 2], [3, 4]]).shape == (2, 2)
    with pytest.raises(DimensionError):
        v.validate_square(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        v.validate_square(np.ones((0, 0)))
    with pytest.raises(ValidationError):
        v.validate_square(np.array([[1.0, math.nan], [0.0, 1.0]]))


def test_validate_conformal():
    from mlf.core.errors import DimensionError
    from mlf.core.validations import Validator

    v = Validator()
    A = np.eye(3)
    v.validate_conformal(A, np.ones((3, 2)), 0, "B")
    v.validate_conformal(A, np.ones((1, 3)), 1, "C")
    with pytest.raises(DimensionError):
        v.validate_conformal(A, np.ones((2, 2)), 0, "B")
    with pytest.raises(DimensionError):
        v.validate_conformal(A, np.ones(3), 1, "C")


def test_validate_job():
    from mlf.core.errors import ValidationError
    from mlf.core.validations import REQUIRED_KEYS, Validator

    v = Validator()
    v.validate_job("eval", {"alpha": 0.5, "z": 1.0})
    with pytest.raises(ValidationError, match="missing"):
        v.validate_job("deriv", {"alpha": 0.5, "z": 1.0})
    with pytest.raises(ValidationError, match="unknown"):
        v.validate_job("plot", {})
    assert set(REQUIRED_KEYS) == {"eval", "deriv", "matfun", "cond", "fde", "gramian"}


def test_get_validator_is_shared():
    from mlf.core.validations import get_validator

    assert get_validator() is get_validator()


def test_finite_real():
    from mlf.core.errors import ValidationError
    from mlf.core.validations import finite_real

    assert finite_real("2.5", "t") == 2.5
    with pytest.raises(ValidationError, match="t must be finite"):
        finite_real(math.inf, "t")
