# mlf/core/data_management.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import threading
from typing import Callable, Dict, Hashable, TypeVar

V = TypeVar("V")


class CoefficientCache:
    """
    Read-mostly memo table for coefficient sets (summation formula and residue
    polynomial coefficients). Values must be immutable. Reads take no lock; a single
    writer at a time inserts missing entries.
    """

    def __init__(self, max_entries: int = 4096) -> None:
        self._entries: Dict[Hashable, object] = {}
        self._lock = threading.Lock()
        self._max_entries = max_entries

    def get_or_compute(self, key: Hashable, factory: Callable[[], V]) -> V:
        """
        Return the cached value for ``key``, computing and storing it on a miss.

        :param key: Hashable key, typically (k, alpha, beta).
        :param factory: Zero-argument callable producing the immutable value.
        """
        value = self._entries.get(key)
        if value is not None:
            return value  # type: ignore[return-value]
        computed = factory()
        with self._lock:
            if len(self._entries) >= self._max_entries:
                self._entries.clear()
            value = self._entries.setdefault(key, computed)
        return value  # type: ignore[return-value]

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)
