# mlf/matrix/clustering.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from mlf.core.errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockPattern:
    """
    Partition of the eigenvalues into clusters.

    ``cluster_of[i]`` is the cluster of the i-th eigenvalue in the current diagonal
    order. ``boundaries`` lists the start index of every block once clusters are
    contiguous, followed by n; it is empty while the pattern is not confluent.
    """

    cluster_of: Tuple[int, ...]
    boundaries: Tuple[int, ...]
    delta: float

    @property
    def n_clusters(self) -> int:
        return len(set(self.cluster_of))

    @property
    def is_confluent(self) -> bool:
        return bool(self.boundaries)

    def blocks(self) -> List[slice]:
        """Slices of the diagonal blocks; valid only for a confluent pattern."""
        if not self.is_confluent:
            raise ValidationError("block slices need a confluent pattern; reorder the Schur form first")
        return [slice(a, b) for a, b in zip(self.boundaries[:-1], self.boundaries[1:])]

    def sizes(self) -> List[int]:
        return [b.stop - b.start for b in self.blocks()]


def contiguous_boundaries(cluster_of: Sequence[int]) -> Tuple[int, ...]:
    """Block starts (plus n) when every cluster occupies one contiguous run, else ()."""
    seen = set()
    starts = []
    previous = None
    for i, c in enumerate(cluster_of):
        if c != previous:
            if c in seen:
                return ()
            seen.add(c)
            starts.append(i)
            previous = c
    return tuple(starts) + (len(cluster_of),)


def _find(parent: List[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def cluster_eigenvalues(eigs: Sequence[complex], delta: float = 0.1) -> BlockPattern:
    """
    Connected components of the graph joining eigenvalues at distance <= ``delta``.

    Cluster ids are assigned in ascending order of each cluster's smallest member,
    compared lexicographically on (Re, Im).

    :param eigs: Eigenvalues in diagonal order.
    :param delta: Clustering tolerance, > 0.
    """
    if not delta > 0:
        raise ValidationError(f"delta must be positive, got {delta!r}")
    eigs = np.asarray(eigs, dtype=complex).ravel()
    n = eigs.size
    parent = list(range(n))
    dist = np.abs(eigs[:, None] - eigs[None, :])
    for i, j in zip(*np.nonzero(np.triu(dist <= delta, k=1))):
        ri, rj = _find(parent, int(i)), _find(parent, int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = [_find(parent, i) for i in range(n)]

    members = {}
    for i, r in enumerate(roots):
        members.setdefault(r, []).append(i)
    smallest = {r: min((eigs[i].real, eigs[i].imag) for i in idx) for r, idx in members.items()}
    ranking = {r: rank for rank, r in enumerate(sorted(members, key=lambda r: smallest[r]))}
    cluster_of = tuple(ranking[r] for r in roots)

    logger.debug("clustered %d eigenvalues into %d clusters (delta=%g)", n, len(members), delta)
    return BlockPattern(cluster_of, contiguous_boundaries(cluster_of), float(delta))
