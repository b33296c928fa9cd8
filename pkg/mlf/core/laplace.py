# mlf/core/laplace.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Derivatives of the Mittag-Leffler function by numerical inversion of the Laplace
transform

    H_k(s; z) = s^(alpha-beta) / (s^alpha - z)^(k+1),   k! H_k = LT of d^k/dz^k E_{alpha,beta}(t^alpha z)

on a parabolic contour sigma(u) = mu (iu + 1)^2 with the truncated trapezoidal rule.
Poles of H_k to the right of the contour are removed by adding their residues.
Contour parameters balance the discretization and truncation errors against the
target tolerance region by region between consecutive singularities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from mlf.config import EPS
from mlf.core.base import ContourSpec, DerivEval, Method, MLParams, ResiduePoly
from mlf.core.data_management import CoefficientCache
from mlf.core.errors import AccuracyLost, InvalidArgument, TargetUnreachable, ValidationError
from mlf.core.gamma import falling_factorial, generalized_binomial

logger = logging.getLogger(__name__)

LOG_EPS = math.log(EPS)

# singularities with phi(s) below this are treated as lying on the branch cut
_PHI_ZERO = 1.0e-15
_STRENGTH_ZERO = 1.0e-14
_REGION_FAC = 1.01

_residue_cache = CoefficientCache()


def pole_set(z: complex, alpha: float) -> List[complex]:
    """
    Nonzero poles of H_k(s; z) on the principal sheet: every s with -pi < Arg(s) <= pi
    and s^alpha = z.

    :raises InvalidArgument: If ``z`` is 0.
    """
    z = complex(z)
    if z == 0:
        raise InvalidArgument("pole set is undefined at z = 0")
    theta = math.atan2(z.imag, z.real)
    lower = -alpha / 2.0 - theta / (2.0 * math.pi)
    upper = alpha / 2.0 - theta / (2.0 * math.pi)
    j_first = math.floor(lower) + 1
    j_last = math.floor(upper)
    radius = abs(z) ** (1.0 / alpha)
    return [radius * np.exp(1j * (theta + 2.0 * j * math.pi) / alpha) for j in range(j_first, j_last + 1)]


def _build_residue_poly(k: int, alpha: float, beta: float) -> ResiduePoly:
    h = [1.0]
    for j in range(1, k + 1):
        acc = 0.0
        for ell in range(1, j + 1):
            acc += generalized_binomial(alpha, ell + 1) * (k * ell / j + 1.0) * h[j - ell]
        h.append(-acc / alpha)
    p_coeffs = []
    for j in range(k + 1):
        acc = 0.0
        for ell in range(k - j + 1):
            acc += falling_factorial(alpha - beta, ell) / math.factorial(ell) * h[k - j - ell]
        p_coeffs.append(acc / math.factorial(j))
    return ResiduePoly(k, tuple(float(c) for c in p_coeffs), tuple(h))


def residue_poly(k: int, p: MLParams) -> ResiduePoly:
    """
    Polynomial P_k such that Res(e^s H_k(s; z), s*) = alpha^-(k+1) e^s* (s*)^(1-alpha k-beta) P_k(s*),
    built from the reciprocal-power coefficients H_j^(k). Memoized per (k, alpha, beta).
    """
    if k < 0:
        raise ValidationError(f"derivative order must be nonnegative, got {k}")
    return _residue_cache.get_or_compute(("residue", k, p.alpha, p.beta), lambda: _build_residue_poly(k, p.alpha, p.beta))


def residue_at(s_star: complex, z: complex, k: int, p: MLParams) -> complex:
    """
    Residue of e^s H_k(s; z) at the pole ``s_star``.

    :raises InvalidArgument: If ``s_star`` is not a pole, i.e. s_star^alpha differs from z.
    """
    s_star = complex(s_star)
    z = complex(z)
    if s_star == 0 or abs(s_star**p.alpha - z) > 1.0e-8 * max(1.0, abs(z)):
        raise InvalidArgument(f"{s_star} is not a pole of H_{k}(s; {z})")
    poly = residue_poly(k, p)
    return complex(
        p.alpha ** (-(k + 1)) * np.exp(s_star) * s_star ** (1.0 - p.alpha * k - p.beta) * poly(s_star)
    )


@dataclass(frozen=True)
class _Region:
    mu: float
    h: float
    N: float


def _region_bounded(phi_j: float, phi_j1: float, pj: float, qj: float, log_tol: float) -> Tuple[_Region, float]:
    """Optimal parameters for a contour lying between two singularities; returns the region and log f_bar."""
    f_max = math.exp(log_tol - LOG_EPS)
    sq_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt(log_tol - LOG_EPS)
    sq_j1 = min(math.sqrt(phi_j1), threshold - sq_j)
    f_bar = 1.0

    if pj < _STRENGTH_ZERO and qj < _STRENGTH_ZERO:
        sqbar_j, sqbar_j1 = sq_j, sq_j1
    elif pj < _STRENGTH_ZERO:
        sqbar_j = sq_j
        f_min = _REGION_FAC * (sq_j / (sq_j1 - sq_j)) ** qj if sq_j > 0 else _REGION_FAC
        if f_min >= f_max:
            return _Region(0.0, 0.0, math.inf), 0.0
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fq = f_bar ** (-1.0 / qj)
        sqbar_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq)
    elif qj < _STRENGTH_ZERO:
        sqbar_j1 = sq_j1
        f_min = _REGION_FAC * (sq_j1 / (sq_j1 - sq_j)) ** pj
        if f_min >= f_max:
            return _Region(0.0, 0.0, math.inf), 0.0
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        sqbar_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp)
    else:
        f_min = _REGION_FAC * (sq_j + sq_j1) / (sq_j1 - sq_j) ** max(pj, qj)
        if f_min >= f_max:
            return _Region(0.0, 0.0, math.inf), 0.0
        f_min = max(f_min, 1.5)
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        fq = f_bar ** (-1.0 / qj)
        w = -phi_j1 / log_tol
        den = 2.0 + w - (1.0 + w) * fp + fq
        sqbar_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den
        sqbar_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den

    log_tol = log_tol - math.log(f_bar)
    w = -(sqbar_j1**2) / log_tol
    mu = (((1.0 + w) * sqbar_j + sqbar_j1) / (2.0 + w)) ** 2
    h = -2.0 * math.pi / log_tol * (sqbar_j1 - sqbar_j) / ((1.0 + w) * sqbar_j + sqbar_j1)
    if not (mu > 0 and h > 0):
        return _Region(0.0, 0.0, math.inf), 0.0
    N = math.ceil(math.sqrt(1.0 - log_tol / mu) / h)
    return _Region(mu, h, N), math.log(f_bar)


def _region_unbounded(phi_j: float, pj: float, log_tol: float, max_iter: int = 100) -> _Region:
    """Optimal parameters for a contour to the right of every singularity."""
    sq_phi_j = math.sqrt(phi_j)
    phibar = phi_j * _REGION_FAC if phi_j > 0 else 0.01
    sqbar = math.sqrt(phibar)
    f_min, f_max, f_tar = 1.0, 10.0, 5.0

    for _ in range(max_iter):
        log_eps_phi = log_tol / phibar
        N = math.ceil(phibar / math.pi * (1.0 - 1.5 * log_eps_phi + math.sqrt(1.0 - 2.0 * log_eps_phi)))
        A = math.pi * N / phibar
        sq_mu = sqbar * abs(4.0 - A) / abs(7.0 - math.sqrt(1.0 + 12.0 * A))
        if pj < _STRENGTH_ZERO:
            break
        fbar = ((sqbar - sq_phi_j) / sq_mu) ** (-pj)
        if f_min < fbar < f_max:
            break
        sqbar = f_tar ** (-1.0 / pj) * sq_mu + sq_phi_j
        phibar = sqbar**2
    mu = sq_mu**2
    h = (-3.0 * A - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * A)) / (4.0 - A) / N

    threshold = log_tol - LOG_EPS
    if mu > threshold:
        q_shift = 0.0 if abs(pj) < _STRENGTH_ZERO else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phibar = (q_shift + sq_phi_j) ** 2
        if phibar < threshold:
            w = math.sqrt(LOG_EPS / (LOG_EPS - log_tol))
            u = math.sqrt(-phibar / LOG_EPS)
            mu = threshold
            N = math.ceil(w * log_tol / (2.0 * math.pi) / (u * w - 1.0))
            h = w / N
        else:
            return _Region(0.0, 0.0, math.inf)
    return _Region(mu, h, N)


def _singularities(z: complex, k: int, p: MLParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Singularities of H_k sorted by phi(s) = (Re s + |s|)/2 with the origin first, their
    phi values and the strengths at the left and right edge of each region.
    """
    poles = np.array(pole_set(z, p.alpha), dtype=complex)
    phi = (poles.real + np.abs(poles)) / 2.0
    order = np.argsort(phi, kind="stable")
    poles, phi = poles[order], phi[order]
    keep = phi > _PHI_ZERO
    poles, phi = poles[keep], phi[keep]

    origin_strength = max(0.0, -2.0 * (p.alpha - p.beta + 1.0))
    if k > 0:
        origin_strength = max(origin_strength, float(k + 1))
    s_star = np.concatenate(([0.0 + 0.0j], poles))
    phi = np.concatenate(([0.0], phi, [math.inf]))
    left = np.concatenate(([origin_strength], np.full(poles.size, float(k + 1))))
    right = np.concatenate((np.full(poles.size, float(k + 1)), [math.inf]))
    return s_star, phi, left, right


def contour_select(
    z: complex, k: int, p: MLParams, tau: float = 1.0e-15, max_nodes: int = 200
) -> ContourSpec:
    """
    Choose (mu, h, N) for the parabolic contour and the poles whose residues are
    subtracted.

    Each region between consecutive singularities (ordered by phi) whose left edge
    satisfies phi < log(tau) - log(eps) is a candidate; the region needing the fewest
    nodes wins and every pole to its right is subtracted.

    :raises TargetUnreachable: If tau <= eps or no region meets tau with at most
        ``max_nodes`` nodes.
    """
    z = complex(z)
    if z == 0:
        raise InvalidArgument("contour selection needs z != 0")
    if not tau > EPS:
        raise TargetUnreachable(f"tau={tau!r} is not above machine precision")
    log_tol = math.log(tau)
    s_star, phi, left, right = _singularities(z, k, p)
    n_regions = s_star.size
    admissible = [j for j in range(n_regions) if phi[j] < log_tol - LOG_EPS and phi[j] < phi[j + 1]]
    if not admissible:
        raise TargetUnreachable(f"no admissible contour region for z={z}, k={k}, tau={tau:.1e}")

    best: Tuple[float, int, _Region, float] = (math.inf, -1, _Region(0.0, 0.0, math.inf), 0.0)
    for j in admissible:
        if j < n_regions - 1:
            region, log_fbar = _region_bounded(phi[j], phi[j + 1], left[j], right[j], log_tol)
        else:
            region, log_fbar = _region_unbounded(phi[j], left[j], log_tol), 0.0
        if region.N < best[0]:
            best = (region.N, j, region, log_fbar)

    n_nodes, j_best, region, log_fbar = best
    if not n_nodes <= max_nodes:
        raise TargetUnreachable(f"contour needs more than {max_nodes} nodes for z={z}, k={k}, tau={tau:.1e}")
    subtracted = tuple(complex(s) for s in s_star[j_best + 1 :])
    return ContourSpec(region.mu, region.h, int(region.N), subtracted, log_tol - log_fbar)


def contour_sum(z: complex, k: int, p: MLParams, spec: ContourSpec) -> complex:
    """(h / 2 pi i) sum_j e^sigma(u_j) H_k(sigma(u_j); z) sigma'(u_j), without residues or k!."""
    u = spec.h * np.arange(-spec.N, spec.N + 1, dtype=float)
    s = spec.sigma(u)
    ds = spec.sigma_prime(u)
    with np.errstate(over="ignore", invalid="ignore"):
        H = s ** (p.alpha - p.beta) / (s**p.alpha - z) ** (k + 1)
        terms = np.exp(s) * H * ds
    return complex(spec.h * np.sum(terms) / (2j * math.pi))


def lt_derivative(
    z: complex, k: int, p: MLParams, tau: float = 1.0e-15, max_nodes: int = 200
) -> DerivEval:
    """
    k-th derivative of E_{alpha,beta} at ``z`` by Laplace transform inversion.

    When no contour reaches ``tau`` within ``max_nodes`` nodes the tolerance is relaxed
    tenfold until one does; the result is then flagged ``degraded``.

    :param z: Complex argument, nonzero.
    :param k: Derivative order.
    :param p: Parameters (alpha, beta).
    :param tau: Target accuracy, tau > eps.
    :raises InvalidArgument: If ``z`` is 0.
    :raises AccuracyLost: If the quadrature produces a non-finite value.
    """
    z = complex(z)
    if z == 0:
        raise InvalidArgument("Laplace inversion needs z != 0; use the exact value at the origin")
    if k < 0:
        raise ValidationError(f"derivative order must be nonnegative, got {k}")
    if not tau > EPS:
        raise ValidationError(f"tau must exceed machine precision, got {tau!r}")

    tau_used = tau
    while True:
        try:
            spec = contour_select(z, k, p, tau_used, max_nodes)
            break
        except TargetUnreachable:
            if tau_used * 10.0 >= 1.0:
                raise
            tau_used *= 10.0
            logger.debug("contour target relaxed to %.1e at z=%s k=%d", tau_used, z, k)

    integral = contour_sum(z, k, p, spec)
    residues = sum((residue_at(s, z, k, p) for s in spec.subtracted_poles), 0.0 + 0.0j)
    value = math.factorial(k) * (integral + residues)
    if z.imag == 0.0:
        value = complex(value.real, 0.0)

    err = tau_used * (1.0 + abs(value))
    result = DerivEval(value, k, Method.LAPLACE_INVERSION, err, 2 * spec.N + 1, None, tau_used > tau)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise AccuracyLost(f"Laplace inversion produced a non-finite value at z={z}, k={k}", result=result)
    return result
