# mlf/core/gamma.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""Gamma function helpers with the overflow threshold of binary64."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from mlf.core.errors import GammaOverflow, PoleOfGamma

GAMMA_MAX_ARG = 171.624


def gamma_fn(x: float) -> float:
    """
    Gamma function of a real argument.

    Negative non-integer arguments are handled through the reflection formula built
    into :func:`scipy.special.gamma`.

    :param x: Real argument, not a nonpositive integer.
    :raises PoleOfGamma: If ``x`` is 0, -1, -2, ...
    :raises GammaOverflow: If ``x`` exceeds 171.624.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleOfGamma(f"Gamma has a pole at {x!r}")
    if x > GAMMA_MAX_ARG:
        raise GammaOverflow(f"Gamma({x!r}) overflows double precision")
    return float(special.gamma(x))


def rgamma(x):
    """
    Reciprocal Gamma function, entire: 1/Gamma(x) is 0 at the poles of Gamma.
    Accepts scalars or arrays.
    """
    return special.rgamma(x)


def log_abs_gamma(x):
    """log|Gamma(x)|, safe beyond the overflow threshold."""
    return special.gammaln(x)


def falling_factorial(x, k: int):
    """
    Falling factorial (x)_k = x (x-1) ... (x-k+1); (x)_0 = 1. Vectorized over ``x``.
    """
    x = np.asarray(x, dtype=float)
    result = np.ones_like(x)
    for i in range(k):
        result = result * (x - i)
    return result if result.ndim else float(result)


def generalized_binomial(a: float, j: int) -> float:
    """Binomial coefficient binom(a, j) for real ``a`` and nonnegative integer ``j``."""
    result = 1.0
    for i in range(j):
        result *= (a - i) / (i + 1)
    return result
