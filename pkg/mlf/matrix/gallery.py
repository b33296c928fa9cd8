# mlf/matrix/gallery.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""Test matrices: Redheffer, classical gallery members and matrices with prescribed clustered spectra."""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg, special

from mlf.core.errors import ValidationError

# (eigenvalue, multiplicity); a nonreal entry stands for a conjugate pair with that multiplicity
SpectrumRow = Sequence[Tuple[complex, int]]

SELECTED_SPECTRA: Dict[int, SpectrumRow] = {
    1: [(1, 5), (-1, 5), (1.0001, 4), (-1.0001, 4), (1.001, 4), (-1.001, 4), (1.01, 4), (-1.01, 4), (1.1, 3), (-1.1, 3)],
    2: [(1, 8), (-1, 8), (2, 8), (-5, 8), (-10, 8)],
    3: [(-1, 2), (-5, 2), (1 + 10j, 6), (-4 + 1.5j, 6), (5j, 6)],
    4: [(1, 4), (1.0001, 4), (1.001, 4), (1 + 10j, 7), (-4 + 1.5j, 7)],
}


def redheffer(n: int) -> np.ndarray:
    """R[i, j] = 1 when j = 1 or i divides j (1-based), else 0."""
    if n < 1:
        raise ValidationError(f"order must be positive, got {n}")
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return ((j % i == 0) | (j == 1)).astype(float)


def lehmer(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)[:, None].astype(float)
    j = np.arange(1, n + 1)[None, :].astype(float)
    return np.minimum(i, j) / np.maximum(i, j)


def minij(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return np.minimum(i, j).astype(float)


def pascal(n: int) -> np.ndarray:
    """Symmetric Pascal matrix, P[i, j] = binom(i + j, i) (0-based)."""
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return special.comb(i + j, i, exact=False)


def frank(n: int) -> np.ndarray:
    """Upper Hessenberg Frank matrix, F[i, j] = n + 1 - max(i, j) for j >= i - 1 (1-based)."""
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return np.where(j >= i - 1, n + 1 - np.maximum(i, j), 0).astype(float)


CONDITIONING_SUBSET = {
    "lehmer": lehmer,
    "minij": minij,
    "pascal": pascal,
    "frank": frank,
    "redheffer": redheffer,
}


def _diagonal_blocks(spectrum: SpectrumRow) -> List[np.ndarray]:
    blocks: List[np.ndarray] = []
    for value, multiplicity in spectrum:
        value = complex(value)
        for _ in range(multiplicity):
            if value.imag == 0.0:
                blocks.append(np.array([[value.real]]))
            else:
                a, b = value.real, abs(value.imag)
                blocks.append(np.array([[a, b], [-b, a]]))
    return blocks


def selected_eigenvalue_matrix(row: int, seed: int = 0, coupling: float = 0.05) -> np.ndarray:
    """
    Real 40 x 40 matrix Q (D + N) Q^T with the clustered spectrum of table row ``row``.

    D is block diagonal (1 x 1 blocks for real eigenvalues, 2 x 2 rotation-scaling blocks
    for conjugate pairs), N is a seeded random coupling strictly above the block
    diagonal of size ``coupling``, and Q is a seeded random orthogonal matrix.
    """
    if row not in SELECTED_SPECTRA:
        raise ValidationError(f"row must be one of {sorted(SELECTED_SPECTRA)}, got {row!r}")
    blocks = _diagonal_blocks(SELECTED_SPECTRA[row])
    D = linalg.block_diag(*blocks)
    n = D.shape[0]
    rng = np.random.default_rng(seed)
    mask = np.ones((n, n), dtype=bool)
    start = 0
    for block in blocks:
        m = block.shape[0]
        mask[start:, start : start + m] = False
        start += m
    N = np.where(mask, rng.uniform(-1.0, 1.0, (n, n)), 0.0) * coupling
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    return Q @ (D + N) @ Q.T


def spectrum_of_row(row: int) -> np.ndarray:
    """Eigenvalues of ``selected_eigenvalue_matrix(row)`` with multiplicity."""
    if row not in SELECTED_SPECTRA:
        raise ValidationError(f"row must be one of {sorted(SELECTED_SPECTRA)}, got {row!r}")
    values: List[complex] = []
    for value, multiplicity in SELECTED_SPECTRA[row]:
        value = complex(value)
        if value.imag == 0.0:
            values.extend([value] * multiplicity)
        else:
            values.extend([value, value.conjugate()] * multiplicity)
    return np.array(values)
