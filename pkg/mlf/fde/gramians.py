# mlf/fde/gramians.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Controllability and observability Gramians of D^alpha x = A x + B u, y = C x:

    C(t) = int_0^t E_{alpha,alpha}(s^alpha A) B B^T E_{alpha,alpha}(s^alpha A)^T ds
    O(t) = int_0^t E_{alpha,1}(s^alpha A)^T C^T C E_{alpha,1}(s^alpha A) ds

by Gauss-Legendre quadrature. For alpha < 1 the substitution s = t u^(1/alpha) turns
s^alpha into t^alpha u, so the integrand is smooth in u at the origin.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from mlf.config import EPS, MLSettings, get_settings
from mlf.core.errors import NodeBudget, ValidationError
from mlf.core.validations import finite_real, get_validator
from mlf.matrix.matrix_ml import MatrixMLEvaluator
from mlf.runtime.concurrency import parallel_map

logger = logging.getLogger(__name__)


class GramianKind(str, enum.Enum):
    CONTROLLABILITY = "controllability"
    OBSERVABILITY = "observability"


class Definiteness(str, enum.Enum):
    DEFINITE = "positive definite"
    SEMIDEFINITE = "positive semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class GramianResult:
    """
    Symmetrized Gramian from a rule with ``nodes`` points, its smallest eigenvalue and
    the change against the rule with half the points, which also sets the tolerance of
    the definiteness verdict.
    """

    G: np.ndarray
    kind: GramianKind
    min_eig: float
    quadrature_error: float
    verdict: Definiteness
    nodes: int

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "min_eig": self.min_eig,
            "quadrature_error": self.quadrature_error,
            "verdict": self.verdict.value,
            "nodes": self.nodes,
        }


def quadrature_rule(alpha: float, t: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points c_i and weights w_i with int_0^t g(s^alpha) ds ~ sum_i w_i g(c_i).
    """
    u, w = special.roots_legendre(nodes)
    u = (u + 1.0) / 2.0
    w = w / 2.0
    if alpha < 1.0:
        # s = t u^(1/alpha), ds = (t / alpha) u^(1/alpha - 1) du
        return t**alpha * u, (t / alpha) * u ** (1.0 / alpha - 1.0) * w
    return (t * u) ** alpha, t * w


def _integrate(ev: MatrixMLEvaluator, kind: GramianKind, M: np.ndarray, t: float, nodes: int, workers: int):
    beta = ev.alpha if kind is GramianKind.CONTROLLABILITY else 1.0
    points, weights = quadrature_rule(ev.alpha, t, nodes)

    def term(i: int) -> np.ndarray:
        E = ev(points[i], beta)
        if kind is GramianKind.CONTROLLABILITY:
            X = E @ M
            return weights[i] * (X @ X.conj().T)
        X = M @ E
        return weights[i] * (X.conj().T @ X)

    G = sum(parallel_map(term, range(nodes), workers))
    return (G + G.conj().T) / 2.0


def gramian(
    kind,
    A,
    M,
    alpha: float,
    t: float,
    nodes: Optional[int] = None,
    settings: Optional[MLSettings] = None,
) -> GramianResult:
    """
    Controllability (``M`` = B, n x r) or observability (``M`` = C, r x n) Gramian at t.

    :param kind: ``GramianKind`` or its value.
    :param nodes: Gauss-Legendre nodes of the check rule; the returned Gramian uses twice
        as many. Defaults to ``settings.gramian_nodes``.
    :raises NodeBudget: If fewer than 2 nodes are requested.
    :raises DimensionError: If ``M`` is not conformal with ``A``.
    """
    settings = settings or get_settings()
    try:
        kind = GramianKind(kind)
    except ValueError as exc:
        raise ValidationError(f"unknown Gramian kind {kind!r}") from exc
    validator = get_validator()
    A = validator.validate_square(A)
    M = np.asarray(M, dtype=A.dtype if np.iscomplexobj(A) else float)
    if kind is GramianKind.CONTROLLABILITY:
        M = M.reshape(-1, 1) if M.ndim == 1 else M
        validator.validate_conformal(A, M, 0, "B")
    else:
        M = M.reshape(1, -1) if M.ndim == 1 else M
        validator.validate_conformal(A, M, 1, "C")
    t = finite_real(t, "t")
    if t <= 0:
        raise ValidationError(f"t must be positive, got {t}")
    nodes = settings.gramian_nodes if nodes is None else nodes
    if int(nodes) != nodes or nodes < 2:
        raise NodeBudget(f"Gauss-Legendre quadrature needs at least 2 nodes, got {nodes!r}")
    nodes = int(nodes)

    ev = MatrixMLEvaluator(A, alpha, settings=settings)
    coarse = _integrate(ev, kind, M, t, nodes, settings.workers)
    G = _integrate(ev, kind, M, t, 2 * nodes, settings.workers)
    err = float(np.linalg.norm(G - coarse))

    min_eig = float(np.linalg.eigvalsh(G).min())
    tol = max(err, G.shape[0] * EPS * float(np.linalg.norm(G)))
    if min_eig > tol:
        verdict = Definiteness.DEFINITE
    elif min_eig >= -tol:
        verdict = Definiteness.SEMIDEFINITE
    else:
        verdict = Definiteness.INDEFINITE
    logger.debug("%s Gramian: n=%d, min eigenvalue %.6e, quadrature change %.3e", kind.value, A.shape[0], min_eig, err)
    return GramianResult(G, kind, min_eig, err, verdict, 2 * nodes)
