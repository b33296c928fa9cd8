# mlf/core/hooks.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Protocol, Tuple

logger = logging.getLogger(__name__)

if TYPE_CHECKING:
    from mlf.core.base import DerivEval


class EvaluationHook(Protocol):
    def on_evaluate(self, z: complex, k: int, result: "DerivEval") -> None: ...
    def on_fallback(self, z: complex, k: int, from_method: str, reason: str) -> None: ...
    def on_error(self, error: Exception) -> None: ...


class HookManager:
    """
    Manages hooks that observe scalar evaluations (on_evaluate, on_fallback,
    on_error). Users can attach logging or diagnostics without altering the
    evaluation code.
    """

    def __init__(self, hooks: Optional[List["EvaluationHook"]] = None) -> None:
        """
        Initialize with an optional list of hook objects.
        :param hooks: A list of objects implementing EvaluationHook.
        """
        self._hooks = list(hooks) if hooks else []
        self._invoker = _HookInvoker(self._hooks)

    def register_hook(self, hook: "EvaluationHook") -> None:
        """
        Add a new hook to the manager's list of hooks.

        :param hook: An object implementing some or all EvaluationHook methods.
        """
        self._hooks.append(hook)
        self._invoker = _HookInvoker(self._hooks)

    def __bool__(self) -> bool:
        return bool(self._hooks)

    def execute_on_evaluate(self, z: complex, k: int, result: "DerivEval") -> None:
        self._invoker.invoke("on_evaluate", z, k, result)

    def execute_on_fallback(self, z: complex, k: int, from_method: str, reason: str) -> None:
        self._invoker.invoke("on_fallback", z, k, from_method, reason)

    def execute_on_error(self, error: Exception) -> None:
        self._invoker.invoke("on_error", error)


class _HookInvoker:
    """
    Internal helper that calls a lifecycle method on every hook that defines it.
    A hook that raises is logged and skipped; the evaluation it observes goes on.
    """

    def __init__(self, hooks: List["EvaluationHook"]) -> None:
        self._hooks = hooks

    def invoke(self, name: str, *args) -> None:
        for hook in self._hooks:
            method = getattr(hook, name, None)
            if method is None:
                continue
            try:
                method(*args)
            except Exception:
                logger.exception("hook %s.%s failed", type(hook).__name__, name)


@dataclass
class DiagnosticsHook:
    """
    Records what the scalar dispatcher did: the highest derivative order requested,
    the number of evaluations per method and the worst error estimate seen.
    """

    max_order: int = -1
    worst_error: float = 0.0
    degraded: int = 0
    method_counts: Dict[str, int] = field(default_factory=dict)
    fallbacks: List[Tuple[complex, int, str, str]] = field(default_factory=list)

    def on_evaluate(self, z: complex, k: int, result: "DerivEval") -> None:
        self.max_order = max(self.max_order, k)
        self.worst_error = max(self.worst_error, result.err_estimate)
        self.degraded += int(result.degraded)
        name = result.method.value
        self.method_counts[name] = self.method_counts.get(name, 0) + 1

    def on_fallback(self, z: complex, k: int, from_method: str, reason: str) -> None:
        self.fallbacks.append((z, k, from_method, reason))
