# mlf/fde/solvers.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Closed-form solutions of linear fractional systems through matrix Mittag-Leffler
functions.

Homogeneous part: Y(t) = sum_{l<m} t^l E_{alpha,l+1}(t^alpha A) Y0[l].
Forcing: the convolution of F with the kernel K(u) = u^{alpha-1} E_{alpha,alpha}(u^alpha A),
in closed form for polynomial F and by product integration for sampled F.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import special

from mlf.config import MLSettings, get_settings
from mlf.core.errors import NodeBudget, ValidationError
from mlf.fde.systems import (
    CompanionSystem,
    LinearFdeSystem,
    MultitermFde,
    PolynomialForcing,
    SampledForcing,
    companion_from_multiterm,
)
from mlf.matrix.matrix_ml import MatrixMLEvaluator
from mlf.runtime.concurrency import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_PANELS = 64

Solver = Callable[..., np.ndarray]


def _time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValidationError(f"time must be finite and nonnegative, got {t!r}")
    return t


def _evaluator(
    sys: LinearFdeSystem, evaluator: Optional[MatrixMLEvaluator], settings: Optional[MLSettings]
) -> MatrixMLEvaluator:
    if evaluator is not None:
        if evaluator.alpha != sys.alpha or evaluator.A.shape != sys.A.shape:
            raise ValidationError("evaluator was built for a different system")
        return evaluator
    return MatrixMLEvaluator(sys.A, sys.alpha, settings=settings)


def _homogeneous(sys: LinearFdeSystem, t: float, ev: MatrixMLEvaluator) -> np.ndarray:
    if t == 0.0:
        return sys.Y0[0].copy()
    c = t**sys.alpha
    Y = np.zeros(sys.n)
    for ell, y0 in enumerate(sys.Y0):
        if np.any(y0):
            Y = Y + t**ell * (ev(c, ell + 1) @ y0)
    return Y


def solve_linear_fde(
    sys: LinearFdeSystem,
    t: float,
    evaluator: Optional[MatrixMLEvaluator] = None,
    settings: Optional[MLSettings] = None,
) -> np.ndarray:
    """
    Y(t) for the unforced system D^alpha Y = A Y.

    :param sys: System without forcing.
    :param t: Time, t >= 0; t = 0 returns Y0[0].
    :param evaluator: Factorization of A to reuse across calls.
    :raises ValidationError: If the system carries a forcing term.
    """
    if sys.forcing is not None:
        raise ValidationError("solve_linear_fde takes an unforced system; use solve() for forced ones")
    t = _time(t)
    return _homogeneous(sys, t, _evaluator(sys, evaluator, settings))


def solve_poly_source(
    sys: LinearFdeSystem,
    t: float,
    evaluator: Optional[MatrixMLEvaluator] = None,
    settings: Optional[MLSettings] = None,
) -> np.ndarray:
    """
    Y(t) with polynomial forcing f(t) = sum_l c_l t^l along the direction b:
    homogeneous part + sum_l l! c_l t^{alpha+l} E_{alpha,alpha+l+1}(t^alpha A) b.
    """
    forcing = sys.forcing
    if not isinstance(forcing, PolynomialForcing):
        raise ValidationError("solve_poly_source needs a polynomial forcing")
    t = _time(t)
    ev = _evaluator(sys, evaluator, settings)
    Y = _homogeneous(sys, t, ev)
    if t == 0.0 or forcing.is_zero:
        return Y
    c = t**sys.alpha
    for ell, coeff in enumerate(forcing.coeffs):
        if coeff == 0.0:
            continue
        weight = math.factorial(ell) * coeff * t ** (sys.alpha + ell)
        Y = Y + weight * (ev(c, sys.alpha + ell + 1) @ forcing.direction)
    return Y


def kernel_moments(ev: MatrixMLEvaluator, x: float, count: int = 3) -> List[np.ndarray]:
    """
    M_l(x) = int_0^x (x - u)^l K(u) du = l! x^{alpha+l} E_{alpha,alpha+l+1}(x^alpha A)
    for l < count.
    """
    n = ev.n
    if x == 0.0:
        return [np.zeros((n, n)) for _ in range(count)]
    alpha = ev.alpha
    c = x**alpha
    return [math.factorial(ell) * x ** (alpha + ell) * ev(c, alpha + ell + 1) for ell in range(count)]


def _panel_weights(MT: Sequence[np.ndarray], MTp: Sequence[np.ndarray], h: float) -> List[np.ndarray]:
    # W_r = int over the panel of K(u) (T - u)^r du, with T' = T - h
    weights = []
    for r in range(3):
        W = MT[r].copy()
        for ell in range(r + 1):
            W = W - special.comb(r, ell, exact=True) * h ** (r - ell) * MTp[ell]
        weights.append(W)
    return weights


def solve_sampled_source(
    sys: LinearFdeSystem,
    t: float,
    nodes: int = DEFAULT_PANELS,
    evaluator: Optional[MatrixMLEvaluator] = None,
    settings: Optional[MLSettings] = None,
) -> np.ndarray:
    """
    Y(t) with a sampled forcing F. On each of ``nodes`` equal panels F is replaced by
    its quadratic interpolant at the panel ends and midpoint, and the product with
    the weakly singular kernel is integrated exactly through kernel moments.

    :raises NodeBudget: If ``nodes`` < 2.
    """
    forcing = sys.forcing
    if not isinstance(forcing, SampledForcing):
        raise ValidationError("solve_sampled_source needs a sampled forcing")
    if int(nodes) != nodes or nodes < 2:
        raise NodeBudget(f"product integration needs at least 2 panels, got {nodes!r}")
    nodes = int(nodes)
    settings = settings or get_settings()
    t = _time(t)
    ev = _evaluator(sys, evaluator, settings)
    Y = _homogeneous(sys, t, ev)
    if t == 0.0:
        return Y

    grid = np.linspace(0.0, t, nodes + 1)
    h = t / nodes
    moments = parallel_map(lambda i: kernel_moments(ev, t - grid[i]), range(nodes + 1), settings.workers)

    def sample(s: float) -> np.ndarray:
        F = forcing(s)
        if F.shape != (sys.n,):
            raise ValidationError(f"sampled forcing returned shape {F.shape}, expected ({sys.n},)")
        return F

    Fb = sample(grid[0])
    for i in range(nodes):
        Fa = Fb
        Fm = sample(grid[i] + h / 2)
        Fb = sample(grid[i + 1])
        c0 = Fa
        c1 = (4 * Fm - 3 * Fa - Fb) / h
        c2 = 2 * (Fa - 2 * Fm + Fb) / h**2
        W0, W1, W2 = _panel_weights(moments[i], moments[i + 1], h)
        Y = Y + W0 @ c0 + W1 @ c1 + W2 @ c2
    return Y


def solve(
    sys: LinearFdeSystem,
    t: float,
    evaluator: Optional[MatrixMLEvaluator] = None,
    settings: Optional[MLSettings] = None,
    nodes: int = DEFAULT_PANELS,
) -> np.ndarray:
    """Y(t) by whichever closed form fits the forcing of ``sys``."""
    if sys.forcing is None:
        return solve_linear_fde(sys, t, evaluator, settings)
    if isinstance(sys.forcing, PolynomialForcing):
        return solve_poly_source(sys, t, evaluator, settings)
    return solve_sampled_source(sys, t, nodes, evaluator, settings)


def trajectory(
    sys: LinearFdeSystem,
    times: Sequence[float],
    solver: Solver = solve,
    settings: Optional[MLSettings] = None,
    **kwargs,
) -> np.ndarray:
    """
    Evaluate ``solver`` at every time in ``times`` from a single factorization of A.

    :returns: Array of shape (len(times), n).
    """
    settings = settings or get_settings()
    times = [_time(t) for t in times]
    ev = MatrixMLEvaluator(sys.A, sys.alpha, settings=settings)
    rows = parallel_map(lambda t: solver(sys, t, evaluator=ev, settings=settings, **kwargs), times, settings.workers)
    logger.debug("trajectory: %d times, n=%d, highest derivative order %d", len(times), sys.n, ev.max_order)
    return np.array(rows).reshape(len(times), sys.n)


def solve_multiterm(
    mt: MultitermFde, times: Sequence[float], settings: Optional[MLSettings] = None, nodes: int = DEFAULT_PANELS
) -> np.ndarray:
    """y(t) on ``times`` for a multiterm equation, through its companion system."""
    companion: CompanionSystem = companion_from_multiterm(mt)
    kwargs: Dict[str, int] = {"nodes": nodes} if isinstance(mt.forcing, SampledForcing) else {}
    states = trajectory(companion.system, times, settings=settings, **kwargs)
    return companion.read(states)
