# mlf/matrix/schur.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Complex Schur factorization A = Q T Q* and reordering of its diagonal by unitary
swaps of adjacent eigenvalues.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg

from mlf.config import EPS
from mlf.core.errors import NoConvergence, SwapInstability, ValidationError
from mlf.core.validations import get_validator
from mlf.matrix.clustering import BlockPattern, contiguous_boundaries

logger = logging.getLogger(__name__)

# swap residual tolerance in units of eps * ||T||_F
_SWAP_TOL = 100.0


@dataclass(frozen=True)
class SchurForm:
    """Unitary Q and upper triangular T with A = Q T Q*."""

    Q: np.ndarray
    T: np.ndarray

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.T).copy()

    def reconstruct(self) -> np.ndarray:
        return self.Q @ self.T @ self.Q.conj().T


def schur_decompose(A) -> SchurForm:
    """
    Complex Schur factorization of a square matrix.

    :raises DimensionError: If ``A`` is not square.
    :raises NoConvergence: If the QR iteration fails to converge.
    """
    A = get_validator().validate_square(A)
    try:
        T, Q = linalg.schur(A.astype(complex), output="complex")
    except linalg.LinAlgError as exc:
        raise NoConvergence(f"Schur factorization did not converge: {exc}") from exc
    return SchurForm(Q, np.triu(T))


def swap_adjacent(Q: np.ndarray, T: np.ndarray, i: int) -> None:
    """
    Exchange T[i, i] and T[i+1, i+1] in place by a plane rotation applied to rows and
    columns i, i+1 of T and to columns i, i+1 of Q.

    :raises SwapInstability: If the rotated subdiagonal entry is not negligible.
    """
    a, b, c = T[i, i], T[i, i + 1], T[i + 1, i + 1]
    x = np.array([b, c - a])
    r = np.linalg.norm(x)
    if r == 0.0:
        return
    x1, x2 = x / r
    G = np.array([[x1, -np.conj(x2)], [x2, np.conj(x1)]])
    T[i : i + 2, :] = G.conj().T @ T[i : i + 2, :]
    T[:, i : i + 2] = T[:, i : i + 2] @ G
    Q[:, i : i + 2] = Q[:, i : i + 2] @ G

    residual = abs(T[i + 1, i])
    if residual > _SWAP_TOL * EPS * max(np.linalg.norm(T), 1.0):
        raise SwapInstability(f"swap at position {i} left subdiagonal residual {residual:.3e}")
    T[i + 1, i] = 0.0
    T[i, i], T[i + 1, i + 1] = c, a


def reorder_schur(S: SchurForm, pattern: BlockPattern) -> Tuple[SchurForm, BlockPattern]:
    """
    Make every cluster contiguous with clusters in ascending id order.

    Adjacent eigenvalues are exchanged by a stable bubble sort on the cluster ids, so
    members of the same cluster keep their relative order and are never swapped with
    each other.

    :param S: Schur form whose diagonal ``pattern`` describes.
    :param pattern: Clustering of ``diag(S.T)``.
    :returns: The reordered Schur form and the confluent pattern.
    """
    n = S.n
    if len(pattern.cluster_of) != n:
        raise ValidationError(f"pattern describes {len(pattern.cluster_of)} eigenvalues, Schur form has {n}")
    ranks = list(pattern.cluster_of)
    Q = np.array(S.Q, dtype=complex, copy=True)
    T = np.array(S.T, dtype=complex, copy=True)

    swaps = 0
    for end in range(n - 1, 0, -1):
        moved = False
        for i in range(end):
            if ranks[i] > ranks[i + 1]:
                swap_adjacent(Q, T, i)
                ranks[i], ranks[i + 1] = ranks[i + 1], ranks[i]
                swaps += 1
                moved = True
        if not moved:
            break

    if swaps:
        logger.debug("reordered Schur form with %d adjacent swaps", swaps)
    cluster_of = tuple(ranks)
    return SchurForm(Q, np.triu(T)), BlockPattern(cluster_of, contiguous_boundaries(cluster_of), pattern.delta)
