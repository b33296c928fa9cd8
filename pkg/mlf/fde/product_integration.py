# mlf/fde/product_integration.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Step-by-step trapezoidal product integration for scalar multiterm equations, used as
an independent comparator for the closed-form solutions.

The equation is integrated in its Volterra form

    y = T_{ceil(n alpha)} + I^{n alpha} f / a_n - sum_{k<n} (a_k / a_n) I^{(n-k) alpha} (y - T_{ceil(k alpha)})

where T_m is the Taylor polynomial of degree m - 1 built from the initial values.
Each fractional integral interpolates its integrand piecewise linearly and
integrates the kernel exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from mlf.core.errors import ValidationError
from mlf.core.gamma import gamma_fn
from mlf.fde.systems import MultitermFde

logger = logging.getLogger(__name__)

# relative mismatch tolerated between T and a whole number of steps
_GRID_RTOL = 1.0e-9


@dataclass(frozen=True)
class PIWeights:
    """
    Weights of I^gamma g(t_n) ~ h^gamma (start[n] g_0 + sum_{i=1}^{n} body[n - i] g_i).
    """

    gamma: float
    body: np.ndarray
    start: np.ndarray


def pi_weights(gamma: float, steps: int) -> PIWeights:
    """Trapezoidal product-integration weights of order ``gamma`` for ``steps`` steps."""
    if not gamma > 0:
        raise ValidationError(f"integration order must be positive, got {gamma}")
    g1 = gamma + 1.0
    scale = 1.0 / gamma_fn(gamma + 2.0)
    j = np.arange(steps + 1, dtype=float)
    body = np.empty(steps + 1)
    body[0] = 1.0
    body[1:] = (j[1:] + 1) ** g1 - 2 * j[1:] ** g1 + (j[1:] - 1) ** g1
    start = np.zeros(steps + 1)
    start[1:] = (j[1:] - 1) ** g1 - j[1:] ** gamma * (j[1:] - gamma - 1)
    return PIWeights(gamma, body * scale, start * scale)


def _taylor(b, count: int, t: np.ndarray) -> np.ndarray:
    values = np.zeros_like(t)
    for i in range(count):
        values = values + b[i] * t**i / math.factorial(i)
    return values


def _history(w: PIWeights, g: np.ndarray, n: int) -> float:
    # every term of the rule except the one at the current step
    total = w.start[n] * g[0]
    if n > 1:
        total += float(np.dot(w.body[n - 1 : 0 : -1], g[1:n]))
    return total


def trapezoidal_pi(mt: MultitermFde, h: float, T: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Trajectory of a multiterm equation on t_j = j h, 0 <= t_j <= T.

    The scheme is implicit but linear in the new value, so each step is a scalar
    division. Second order for smooth solutions.

    :param mt: The equation.
    :param h: Step size; must divide ``T``.
    :param T: Final time.
    :returns: ``(t, y)`` arrays of equal length.
    :raises ValidationError: If ``h`` does not divide ``T``.
    """
    h, T = float(h), float(T)
    if not (h > 0 and T > 0 and math.isfinite(h) and math.isfinite(T)):
        raise ValidationError(f"step and final time must be positive, got h={h}, T={T}")
    steps = int(round(T / h))
    if steps < 1 or abs(steps * h - T) > _GRID_RTOL * T:
        raise ValidationError(f"step {h} does not divide the interval [0, {T}]")
    t = np.arange(steps + 1) * h
    n = mt.n
    alpha = float(mt.alpha)
    an = mt.a[-1]

    lead = _taylor(mt.b, mt.n_initial, t)
    gammas = [(n - k) * alpha for k in range(n)]
    weights = [pi_weights(g, steps) for g in gammas]
    factors = [h**g for g in gammas]
    active = [k for k in range(n) if mt.a[k] != 0.0]
    # y - T_{ceil(k alpha)} on the grid, filled as the steps advance
    shifts: List[np.ndarray] = [_taylor(mt.b, math.ceil(k * alpha), t) for k in range(n)]
    g = [np.zeros(steps + 1) for _ in range(n)]

    f = mt.forcing_at(t)
    wf = weights[0]
    forced = np.zeros(steps + 1)
    if np.any(f):
        for j in range(1, steps + 1):
            forced[j] = factors[0] * (_history(wf, f, j) + wf.body[0] * f[j]) / an

    y = np.empty(steps + 1)
    y[0] = mt.b[0]
    for k in active:
        g[k][0] = y[0] - shifts[k][0]
    diag = 1.0 + sum(mt.a[k] / an * factors[k] * weights[k].body[0] for k in active)
    for j in range(1, steps + 1):
        rhs = lead[j] + forced[j]
        for k in active:
            c = mt.a[k] / an * factors[k]
            rhs -= c * (_history(weights[k], g[k], j) - weights[k].body[0] * shifts[k][j])
        y[j] = rhs / diag
        for k in active:
            g[k][j] = y[j] - shifts[k][j]
    logger.debug("trapezoidal PI: %d steps of %.3e, %d active terms", steps, h, len(active))
    return t, y
