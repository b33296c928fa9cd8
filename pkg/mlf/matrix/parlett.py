# mlf/matrix/parlett.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Schur-Parlett evaluation of f(A) for an entire function f known through its
derivatives: Schur factorization, clustering and reordering of the eigenvalues,
Taylor expansion on each diagonal block about the mean of its eigenvalues, and the
block Parlett recurrence for the off-diagonal blocks.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy import linalg

from mlf.config import EPS
from mlf.core.errors import MLError, NearSingularSeparation, SlowTaylorDecay
from mlf.core.validations import get_validator
from mlf.matrix.clustering import BlockPattern, cluster_eigenvalues
from mlf.matrix.schur import SchurForm, reorder_schur, schur_decompose
from mlf.runtime.concurrency import parallel_map

logger = logging.getLogger(__name__)

# consecutive negligible Taylor terms required to stop
_NEGLIGIBLE_RUN = 2


class DerivativeOracle(Protocol):
    def __call__(self, sigma: complex, max_order: int) -> Sequence[complex]:
        """Return f(sigma), f'(sigma), ..., f^(max_order)(sigma)."""
        ...


class ExpOracle:
    """Derivatives of exp; every one equals e^sigma."""

    def __call__(self, sigma: complex, max_order: int) -> Sequence[complex]:
        return [complex(np.exp(sigma))] * (max_order + 1)


@dataclass(frozen=True)
class BlockStats:
    """What the Taylor evaluation of one diagonal block used."""

    start: int
    size: int
    sigma: complex
    terms: int


@dataclass
class FunmResult:
    F: np.ndarray
    schur: Optional[SchurForm] = None
    pattern: Optional[BlockPattern] = None
    blocks: List[BlockStats] = field(default_factory=list)
    path: str = "schur-parlett"

    @property
    def max_order(self) -> int:
        """Highest derivative order used by any diagonal block."""
        return max((b.terms - 1 for b in self.blocks), default=0)


def _fetch(oracle: DerivativeOracle, sigma: complex, order: int, max_order: int) -> List[complex]:
    return list(oracle(sigma, min(order, max_order)))


def atomic_block_eval(
    Tii: np.ndarray, oracle: DerivativeOracle, max_order: int = 250, start: int = 0
) -> Tuple[np.ndarray, BlockStats]:
    """
    f on an upper triangular block whose eigenvalues form one cluster, by the Taylor
    series about sigma = trace(Tii)/m.

    Summation stops once two consecutive terms are below eps times the partial sum
    and at least m terms were used. When all diagonal entries coincide M = Tii - sigma I
    is nilpotent and exactly m terms are used.

    :raises SlowTaylorDecay: If no stop happens within ``max_order`` derivatives.
    """
    Tii = np.asarray(Tii, dtype=complex)
    m = Tii.shape[0]
    sigma = complex(np.trace(Tii) / m)
    if m == 1:
        value = _fetch(oracle, sigma, 0, max_order)[0]
        return np.array([[value]], dtype=complex), BlockStats(start, 1, sigma, 1)

    M = Tii - sigma * np.eye(m)
    diag = np.diag(Tii)
    nilpotent = bool(np.all(diag == diag[0]))
    derivs = _fetch(oracle, sigma, m + 4, max_order)

    F = derivs[0] * np.eye(m, dtype=complex)
    P = np.eye(m, dtype=complex)
    negligible = 0
    used = 1
    k = 0
    while True:
        k += 1
        if nilpotent and k >= m:
            break
        if k > max_order:
            raise SlowTaylorDecay(
                f"Taylor series on a {m}x{m} block about {sigma:.6g} did not converge within order {max_order}"
            )
        if k >= len(derivs):
            derivs = _fetch(oracle, sigma, 2 * k, max_order)
        P = P @ M / k
        term = derivs[k] * P
        F = F + term
        used = k + 1
        if not np.any(P):
            break
        if np.linalg.norm(term) <= EPS * np.linalg.norm(F):
            negligible += 1
        else:
            negligible = 0
        if negligible >= _NEGLIGIBLE_RUN and k + 1 >= m:
            break
    return F, BlockStats(start, m, sigma, used)


def atomic_block_fun(Tii: np.ndarray, oracle: DerivativeOracle, max_order: int = 250) -> np.ndarray:
    """f(Tii) for a single-cluster triangular block; see :func:`atomic_block_eval`."""
    return atomic_block_eval(Tii, oracle, max_order)[0]


def sylvester_triangular(Tii: np.ndarray, Tjj: np.ndarray, C: np.ndarray, min_separation: float = 0.0) -> np.ndarray:
    """
    Solve Tii F - F Tjj = C for upper triangular Tii, Tjj, one column at a time:
    (Tii - Tjj[l, l] I) F[:, l] = C[:, l] + sum_{r<l} F[:, r] Tjj[r, l].

    :raises NearSingularSeparation: If some |Tii[a, a] - Tjj[b, b]| <= ``min_separation``
        (or is zero).
    """
    Tii = np.asarray(Tii, dtype=complex)
    Tjj = np.asarray(Tjj, dtype=complex)
    C = np.asarray(C, dtype=complex)
    p, q = Tii.shape[0], Tjj.shape[0]
    gaps = np.abs(np.diag(Tii)[:, None] - np.diag(Tjj)[None, :])
    gap = float(gaps.min())
    if gap == 0.0 or gap <= min_separation:
        raise NearSingularSeparation(f"diagonal blocks are separated by only {gap:.3e}")
    F = np.zeros((p, q), dtype=complex)
    eye = np.eye(p)
    for ell in range(q):
        rhs = C[:, ell] + F[:, :ell] @ Tjj[:ell, ell]
        F[:, ell] = linalg.solve_triangular(Tii - Tjj[ell, ell] * eye, rhs, lower=False)
    return F


def _with_context(exc: MLError, context: str) -> MLError:
    """Copy of ``exc`` with ``context`` prefixed to its message; attributes such as ``result`` are kept."""
    try:
        wrapped = copy.copy(exc)
    except TypeError:
        return MLError(f"{context}: {exc}")
    wrapped.args = (f"{context}: {exc}",) + tuple(exc.args[1:])
    return wrapped


def funm_from_schur(
    S: SchurForm,
    oracle: DerivativeOracle,
    delta: float = 0.1,
    max_order: int = 250,
    workers: int = 1,
) -> FunmResult:
    """
    f(A) from a Schur form of A; the factorization is reordered, not recomputed.
    """
    pattern = cluster_eigenvalues(S.eigenvalues, delta)
    S, pattern = reorder_schur(S, pattern)
    T = S.T
    blocks = pattern.blocks()

    def evaluate(block: slice) -> Tuple[np.ndarray, BlockStats]:
        try:
            return atomic_block_eval(T[block, block], oracle, max_order, block.start)
        except MLError as exc:
            sigma = complex(np.trace(T[block, block]) / (block.stop - block.start))
            context = f"diagonal block {blocks.index(block)} (size {block.stop - block.start}, mean {sigma:.6g})"
            raise _with_context(exc, context) from exc

    evaluated = parallel_map(evaluate, blocks, workers)
    F = np.zeros_like(T)
    for block, (Fii, _) in zip(blocks, evaluated):
        F[block, block] = Fii

    nb = len(blocks)
    for d in range(1, nb):
        for i in range(nb - d):
            j = i + d
            bi, bj = blocks[i], blocks[j]
            C = F[bi, bi] @ T[bi, bj] - T[bi, bj] @ F[bj, bj]
            for k in range(i + 1, j):
                bk = blocks[k]
                C = C + F[bi, bk] @ T[bk, bj] - T[bi, bk] @ F[bk, bj]
            try:
                F[bi, bj] = sylvester_triangular(T[bi, bi], T[bj, bj], C, min_separation=delta)
            except NearSingularSeparation as exc:
                raise NearSingularSeparation(f"Parlett recurrence for blocks ({i}, {j}): {exc}") from exc

    stats = [s for _, s in evaluated]
    logger.debug(
        "Schur-Parlett: n=%d, %d blocks, sizes %s, max derivative order %d",
        S.n,
        nb,
        pattern.sizes(),
        max((s.terms - 1 for s in stats), default=0),
    )
    return FunmResult(S.Q @ F @ S.Q.conj().T, S, pattern, stats)


def funm_eval(A, oracle: DerivativeOracle, delta: float = 0.1, max_order: int = 250, workers: int = 1) -> FunmResult:
    """
    f(A) with diagnostics. A diagonal A is mapped entrywise; a Hermitian A goes through
    its spectral decomposition; anything else takes the Schur-Parlett route.
    """
    A = get_validator().validate_square(A)
    n = A.shape[0]
    off_diagonal = A - np.diag(np.diag(A))
    if not np.any(off_diagonal):
        values = [complex(_fetch(oracle, complex(lam), 0, max_order)[0]) for lam in np.diag(A)]
        stats = [BlockStats(i, 1, complex(lam), 1) for i, lam in enumerate(np.diag(A))]
        return FunmResult(np.diag(np.array(values, dtype=complex)), blocks=stats, path="diagonal")

    norm_a = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) <= n * EPS * norm_a:
        lam, V = np.linalg.eigh((A + A.conj().T) / 2.0)
        values = np.array([_fetch(oracle, complex(x), 0, max_order)[0] for x in lam], dtype=complex)
        stats = [BlockStats(i, 1, complex(x), 1) for i, x in enumerate(lam)]
        return FunmResult((V * values) @ V.conj().T, blocks=stats, path="hermitian")

    return funm_from_schur(schur_decompose(A), oracle, delta, max_order, workers)


def funm(A, oracle: DerivativeOracle, delta: float = 0.1, max_order: int = 250, workers: int = 1) -> np.ndarray:
    """
    f(A) for a dense square matrix and an entire function f given by ``oracle``.

    :param A: Square matrix.
    :param oracle: Callable returning f and its derivatives at a point.
    :param delta: Eigenvalue clustering tolerance.
    :param max_order: Largest derivative order a diagonal block may request.
    :param workers: Threads for independent diagonal blocks.
    """
    return funm_eval(A, oracle, delta, max_order, workers).F

