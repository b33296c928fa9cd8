# mlf/core/summation.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Summation formulas expressing derivatives of E_{alpha,beta} as linear combinations
of Mittag-Leffler functions (or of lower-order derivatives) with shifted beta.
"""

from __future__ import annotations

import math
from typing import Callable, List

from mlf.config import EPS, UNIT_ROUNDOFF
from mlf.core.base import DerivEval, Method, MLParams, SFCoeffs
from mlf.core.data_management import CoefficientCache
from mlf.core.errors import InvalidArgument, ValidationError
from mlf.core.gamma import rgamma

# (z, params) -> E_{params}(z)
MLEvaluator = Callable[[complex, MLParams], DerivEval]
# (z, order, params) -> d^order/dz^order E_{params}(z)
DerivEvaluator = Callable[[complex, int, MLParams], DerivEval]

_coeff_cache = CoefficientCache()


def _build_coeffs(k: int, alpha: float, beta: float) -> SFCoeffs:
    c: List[float] = [1.0]
    for m in range(1, k + 1):
        shift = 1.0 - beta - alpha * (m - 1)
        nxt = [shift * c[0]]
        for j in range(1, m):
            nxt.append(c[j - 1] + (shift + j) * c[j])
        nxt.append(1.0)
        c = nxt
    return SFCoeffs(k, tuple(c))


def djrbashian_coeffs(k: int, p: MLParams) -> SFCoeffs:
    """
    Coefficients c_0^(k)..c_k^(k) shared by both summation formulas, by the recursion
    c_0^(k) = (1-beta-alpha(k-1)) c_0^(k-1), c_j^(k) = c_{j-1}^(k-1) + (1-beta-alpha(k-1)+j) c_j^(k-1),
    c_k^(k) = 1. Memoized per (k, alpha, beta).
    """
    if k < 0:
        raise ValidationError(f"derivative order must be nonnegative, got {k}")
    return _coeff_cache.get_or_compute(("sf", k, p.alpha, p.beta), lambda: _build_coeffs(k, p.alpha, p.beta))


def _combine(coeffs: SFCoeffs, evals: List[DerivEval], scale: complex) -> tuple:
    """
    Value, error estimate and inherited degraded flag of ``scale * sum_j c_j evals[j]``.

    The estimate is the worst constituent estimate, measured against 1 + |value|,
    plus the rounding of the constituents amplified by cancellation in the sum.
    """
    values = [c * e.value for c, e in zip(coeffs.c, evals)]
    total = complex(sum(values, 0.0 + 0.0j) * scale)
    worst = max(e.err_estimate / (1.0 + abs(e.value)) for e in evals)
    roundoff = UNIT_ROUNDOFF * (coeffs.k + 1) * abs(scale) * sum(abs(v) for v in values)
    degraded = any(e.degraded for e in evals)
    return total, worst * (1.0 + abs(total)) + roundoff, degraded


def sf_djrbashian(z: complex, k: int, p: MLParams, ml_eval: MLEvaluator) -> DerivEval:
    """
    d^k/dz^k E_{alpha,beta}(z) = (alpha z)^-k sum_j c_j^(k) E_{alpha,beta-j}(z).

    Suffers cancellation for small |z|; kept as a cross-check of the Prabhakar form.

    :raises InvalidArgument: If ``z`` is 0.
    """
    z = complex(z)
    if z == 0:
        raise InvalidArgument("the Djrbashian summation formula divides by z^k")
    if k < 1:
        raise ValidationError(f"Djrbashian summation formula needs k >= 1, got {k}")
    coeffs = djrbashian_coeffs(k, p)
    evals = [ml_eval(z, p.shifted(p.beta - j)) for j in range(k + 1)]
    value, err, degraded = _combine(coeffs, evals, (p.alpha * z) ** (-k))
    if z.imag == 0.0:
        value = complex(value.real, 0.0)
    nodes = sum(e.terms_or_nodes for e in evals)
    return DerivEval(value, k, Method.DJRBASHIAN_SF, err, nodes, None, degraded)


def sf_prabhakar(z: complex, k: int, p: MLParams, ml_eval: MLEvaluator) -> DerivEval:
    """
    d^k/dz^k E_{alpha,beta}(z) = alpha^-k sum_j c_j^(k) E_{alpha,alpha k+beta-j}(z).

    :param z: Complex argument; z = 0 is allowed.
    :param k: Derivative order.
    :param p: Parameters (alpha, beta).
    :param ml_eval: Evaluator of E_{alpha,b}(z) for the shifted parameters.
    """
    z = complex(z)
    if k < 0:
        raise ValidationError(f"derivative order must be nonnegative, got {k}")
    coeffs = djrbashian_coeffs(k, p)
    evals = [ml_eval(z, p.shifted(p.alpha * k + p.beta - j)) for j in range(k + 1)]
    value, err, degraded = _combine(coeffs, evals, p.alpha ** (-k))
    if z.imag == 0.0:
        value = complex(value.real, 0.0)
    nodes = sum(e.terms_or_nodes for e in evals)
    return DerivEval(value, k, Method.PRABHAKAR_SF, err, nodes, None, degraded)


def balanced_derivative(z: complex, k: int, q: int, p: MLParams, deriv_eval: DerivEvaluator) -> DerivEval:
    """
    Derivative of order k rewritten through derivatives of order q <= k:

        d^k E_{alpha,beta} = alpha^-(k-q) sum_{j=0}^{k-q} c_j^(k-q) d^q E_{alpha,(k-q)alpha+beta-j}.

    q = k returns ``deriv_eval(z, k, p)`` unchanged; q = 0 is the Prabhakar formula.
    """
    if not 0 <= q <= k:
        raise ValidationError(f"balancing order must satisfy 0 <= q <= k, got q={q}, k={k}")
    z = complex(z)
    if q == k:
        return deriv_eval(z, k, p)
    m = k - q
    coeffs = djrbashian_coeffs(m, p)
    evals = [deriv_eval(z, q, p.shifted(m * p.alpha + p.beta - j)) for j in range(m + 1)]
    value, err, degraded = _combine(coeffs, evals, p.alpha ** (-m))
    if z.imag == 0.0:
        value = complex(value.real, 0.0)
    nodes = sum(e.terms_or_nodes for e in evals)
    return DerivEval(value, k, Method.BALANCED, err, nodes, None, degraded)


def exact_at_zero(k: int, p: MLParams) -> DerivEval:
    """d^k/dz^k E_{alpha,beta}(0) = k! / Gamma(alpha k + beta)."""
    value = math.factorial(k) * float(rgamma(p.alpha * k + p.beta))
    return DerivEval(complex(value, 0.0), k, Method.EXACT0, EPS * abs(value), 0)
