# mlf/core/series.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Truncated power series of the derivatives of the Mittag-Leffler function,

    d^k/dz^k E_{a,b}(z) ~ sum_{j=k}^{J} (j)_k z^(j-k) / Gamma(a j + b),

summed in ascending order of modulus, with a-posteriori round-off bounds.
"""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
from scipy import special

from mlf.config import EPS, UNIT_ROUNDOFF
from mlf.core.base import DerivEval, Method, MLParams, SeriesBounds
from mlf.core.errors import AccuracyLost, ArgumentOutOfRange, ValidationError
from mlf.core.gamma import GAMMA_MAX_ARG

logger = logging.getLogger(__name__)

# log of the largest finite double; beyond it z^j is formed in log space
_LOG_DOUBLE_MAX = 700.0


def max_terms(p: MLParams) -> int:
    """Largest index J with Gamma(alpha J + beta) representable in double precision."""
    return int(math.floor((GAMMA_MAX_ARG - p.beta) / p.alpha))


def _log_falling_factorial(j: np.ndarray, k: int) -> np.ndarray:
    # (j)_k = j! / (j-k)! for integer j >= k
    return special.gammaln(j + 1.0) - special.gammaln(j - k + 1.0)


def admissible_radius(k: int, p: MLParams, tau: float) -> float:
    """
    Largest |z| for which the J_max-th term of the derivative series drops below tau:
    (tau Gamma(alpha J_max + beta) / (J_max)_k)^(1 / (J_max - k)).
    """
    j_max = max_terms(p)
    if j_max <= k:
        return 0.0
    log_r = (
        math.log(tau)
        + float(special.gammaln(p.alpha * j_max + p.beta))
        - float(_log_falling_factorial(np.array(float(j_max)), k))
    ) / (j_max - k)
    return math.exp(log_r)


def _series_terms(z: complex, k: int, p: MLParams, tau: float) -> Tuple[np.ndarray, int, float]:
    """
    Terms c_j, j = k..J, of the truncated series, the truncation index J and the
    modulus of the first omitted term.
    """
    j_max = max_terms(p)
    j = np.arange(k, j_max + 1, dtype=float)
    arg = p.alpha * j + p.beta
    rg = special.rgamma(arg)
    log_ff = _log_falling_factorial(j, k)
    abs_z = abs(z)

    with np.errstate(divide="ignore"):
        log_mod = log_ff + (j - k) * math.log(abs_z) - special.gammaln(arg)
    log_mod = np.where(rg == 0.0, -np.inf, log_mod)

    above = np.nonzero(log_mod >= math.log(tau))[0]
    last = int(above[-1]) if above.size else 0
    if last >= j.size - 1:
        raise ArgumentOutOfRange(f"series for |z|={abs_z:.6g}, k={k} does not reach tau within J_max={j_max}")
    J = int(j[last])
    omitted = float(np.exp(log_mod[last + 1]))

    jj = j[: last + 1]
    n = jj - k
    if z.imag == 0.0:
        base = np.sign(rg[: last + 1]) * np.exp(log_mod[: last + 1])
        if z.real < 0:
            base = base * np.where(n.astype(int) % 2 == 0, 1.0, -1.0)
        return base.astype(complex), J, omitted

    if n[-1] * math.log(abs_z) < _LOG_DOUBLE_MAX:
        powers = np.ones(n.size, dtype=complex)
        if n.size > 1:
            powers[1:] = np.cumprod(np.full(n.size - 1, z, dtype=complex))
        ff = np.exp(log_ff[: last + 1])
        terms = ff * powers * rg[: last + 1]
    else:
        phase = np.exp(1j * n * np.angle(z))
        terms = np.sign(rg[: last + 1]) * np.exp(log_mod[: last + 1]) * phase
    return terms, J, omitted


def sorted_sum_with_bounds(terms: np.ndarray) -> Tuple[complex, SeriesBounds]:
    """
    Sum ``terms`` in ascending order of modulus (ties by index) and return the sum
    with the term-weighted and the partial-sum round-off bounds.
    """
    order = np.argsort(np.abs(terms), kind="stable")
    c = terms[order]
    partial = np.cumsum(c)
    J = c.size - 1
    abs_c = np.abs(c)
    if J == 0:
        return complex(partial[-1]), SeriesBounds(0.0, 0.0)
    weights = np.arange(J, 0, -1, dtype=float)  # J - j + 1 for j = 1..J
    coarse = UNIT_ROUNDOFF * (J * abs_c[0] + float(np.dot(weights, abs_c[1:])))
    sharp = UNIT_ROUNDOFF * float(np.sum(np.abs(partial[1:])))
    return complex(partial[-1]), SeriesBounds(coarse, sharp)


def ml_series(z: complex, k: int, p: MLParams, tau: float = 1.0e-15) -> DerivEval:
    """
    k-th derivative of E_{alpha,beta} at ``z`` by the truncated series.

    The result is accepted when the mean of the two round-off bounds does not exceed
    ``tau * (1 + |value|)``.

    :param z: Complex argument.
    :param k: Derivative order, k >= 0.
    :param p: Parameters (alpha, beta).
    :param tau: Target accuracy, tau > eps.
    :raises ArgumentOutOfRange: If |z| exceeds the admissibility radius.
    :raises AccuracyLost: If the round-off estimate exceeds the target; the
        rejected evaluation is attached as ``result``.
    """
    if k < 0:
        raise ValidationError(f"derivative order must be nonnegative, got {k}")
    if not tau > EPS:
        raise ValidationError(f"tau must exceed machine precision, got {tau!r}")
    z = complex(z)
    if z == 0:
        value = math.factorial(k) * float(special.rgamma(p.alpha * k + p.beta))
        return DerivEval(complex(value), k, Method.SERIES, 0.0, 1, SeriesBounds(0.0, 0.0))

    radius = admissible_radius(k, p, tau)
    if abs(z) > radius:
        raise ArgumentOutOfRange(f"|z|={abs(z):.6g} exceeds the series admissibility radius {radius:.6g}")

    terms, J, omitted = _series_terms(z, k, p, tau)
    value, bounds = sorted_sum_with_bounds(terms)
    if z.imag == 0.0:
        value = complex(value.real, 0.0)
    err = bounds.bound_used
    result = DerivEval(value, k, Method.SERIES, err, J - k + 1, bounds)
    if not math.isfinite(abs(value)):
        raise AccuracyLost("series overflowed", result=result)
    if err > tau * (1.0 + abs(value)):
        logger.debug("series rejected at z=%s k=%d: bound %.3e (first omitted term %.3e)", z, k, err, omitted)
        raise AccuracyLost(f"series round-off bound {err:.3e} exceeds target", result=result)
    return result
