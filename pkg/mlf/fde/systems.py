# mlf/fde/systems.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Linear fractional differential systems D^alpha Y = A Y + forcing, scalar multiterm
equations sum_k a_k D^{k alpha} y = f with commensurate order alpha = p/q, and the
companion construction turning the latter into the former.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from mlf.core.errors import DimensionError, IrrationalOrder, ValidationError
from mlf.core.validations import finite_real, get_validator

logger = logging.getLogger(__name__)

# largest denominator accepted when a commensurate order is given as a decimal
MAX_DENOMINATOR = 100


@dataclass(frozen=True)
class PolynomialForcing:
    """f(t) = sum_l coeffs[l] t^l acting along ``direction``."""

    coeffs: Tuple[float, ...]
    direction: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        coeffs = tuple(finite_real(c, "polynomial coefficient") for c in self.coeffs)
        if not coeffs:
            raise ValidationError("polynomial forcing needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        if self.direction is not None:
            object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float).ravel())

    def __call__(self, t: float) -> float:
        value = 0.0
        for c in reversed(self.coeffs):
            value = value * t + c
        return value

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class SampledForcing:
    """Forcing known only through point samples F(t); vector valued for systems."""

    func: Callable[[float], Any]

    def __call__(self, t: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.func(t), dtype=float))


Forcing = Union[None, PolynomialForcing, SampledForcing]


@dataclass
class LinearFdeSystem:
    """
    D^alpha Y(t) = A Y(t) + forcing(t) with Caputo derivative and the m = ceil(alpha)
    initial vectors Y0[l] = Y^(l)(0).
    """

    A: np.ndarray
    alpha: float
    Y0: List[np.ndarray]
    forcing: Forcing = None

    def __post_init__(self) -> None:
        validator = get_validator()
        self.A = validator.validate_square(self.A)
        self.alpha = finite_real(self.alpha, "alpha")
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if isinstance(self.Y0, np.ndarray) and self.Y0.ndim == 1:
            self.Y0 = [self.Y0]
        vectors = [np.asarray(y, dtype=float).ravel() for y in self.Y0]
        if len(vectors) != self.m:
            raise ValidationError(f"alpha = {self.alpha} needs {self.m} initial vector(s), got {len(vectors)}")
        for ell, y in enumerate(vectors):
            validator.validate_conformal(self.A, y, 0, f"Y0[{ell}]")
        self.Y0 = vectors
        if isinstance(self.forcing, PolynomialForcing):
            if self.forcing.direction is None:
                raise ValidationError("polynomial forcing of a system needs a direction vector")
            validator.validate_conformal(self.A, self.forcing.direction, 0, "forcing direction")
        elif self.forcing is not None and not isinstance(self.forcing, SampledForcing):
            raise ValidationError(f"unsupported forcing {type(self.forcing).__name__}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return math.ceil(self.alpha)


def as_rational_order(alpha: Any) -> Fraction:
    """
    Read a commensurate order given as a Fraction, an integer, a ``(p, q)`` pair, a
    mapping ``{"p": .., "q": ..}``, a ``"p/q"`` string or a short decimal.

    :raises IrrationalOrder: If ``alpha`` has no small-denominator rational reading.
    """
    try:
        if isinstance(alpha, Fraction):
            value = alpha
        elif isinstance(alpha, bool):
            raise TypeError(alpha)
        elif isinstance(alpha, int):
            value = Fraction(alpha)
        elif isinstance(alpha, (tuple, list)) and len(alpha) == 2:
            value = Fraction(int(alpha[0]), int(alpha[1]))
        elif isinstance(alpha, dict):
            value = Fraction(int(alpha["p"]), int(alpha["q"]))
        elif isinstance(alpha, str):
            value = Fraction(alpha.strip())
        elif isinstance(alpha, float):
            if not math.isfinite(alpha):
                raise ValueError(alpha)
            value = Fraction(repr(alpha))
        else:
            raise TypeError(alpha)
    except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise IrrationalOrder(f"order {alpha!r} is not a rational p/q") from exc
    if value.denominator > MAX_DENOMINATOR:
        raise IrrationalOrder(f"order {alpha!r} has denominator {value.denominator} > {MAX_DENOMINATOR}")
    return value


@dataclass
class MultitermFde:
    """
    sum_{k=0}^{n} a[k] D^{k alpha} y(t) = f(t), alpha = p/q in (0, 1], with the
    integer-order initial values b[j] = y^(j)(0), j < ceil(n alpha).
    """

    a: Sequence[float]
    alpha: Any
    b: Sequence[float] = field(default_factory=list)
    forcing: Forcing = None

    def __post_init__(self) -> None:
        self.a = tuple(finite_real(x, "coefficient") for x in self.a)
        if len(self.a) < 2:
            raise ValidationError("a multiterm equation needs at least two coefficients")
        if self.a[-1] == 0.0:
            raise ValidationError("leading coefficient a[n] must be nonzero")
        self.alpha = as_rational_order(self.alpha)
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"commensurate order must lie in (0, 1], got {self.alpha}")
        b = tuple(finite_real(x, "initial value") for x in self.b)
        if not b:
            b = (0.0,) * self.n_initial
        if len(b) != self.n_initial:
            raise ValidationError(f"n*alpha = {self.n * self.alpha} needs {self.n_initial} initial value(s), got {len(b)}")
        self.b = b
        if isinstance(self.forcing, PolynomialForcing) and self.forcing.direction is not None:
            raise ValidationError("scalar forcing takes no direction vector")

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def p(self) -> int:
        return self.alpha.numerator

    @property
    def q(self) -> int:
        return self.alpha.denominator

    @property
    def n_initial(self) -> int:
        return math.ceil(self.n * self.alpha)

    @property
    def companion_dimension(self) -> int:
        return self.n * self.p

    def forcing_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.forcing is None:
            return np.zeros_like(t)
        if isinstance(self.forcing, PolynomialForcing):
            return np.asarray(self.forcing(t), dtype=float)
        return np.array([self.forcing(float(s))[0] for s in np.ravel(t)]).reshape(t.shape)


@dataclass
class CompanionSystem:
    """A multiterm equation recast as D^{1/q} Y = A Y + e_N f / a_n."""

    system: LinearFdeSystem
    source: MultitermFde
    forcing_vector: np.ndarray
    readout: int = 0

    @property
    def dimension(self) -> int:
        return self.system.n

    def read(self, Y: np.ndarray):
        """y(t) from a state vector or a stack of them."""
        return np.asarray(Y)[..., self.readout]


def companion_from_multiterm(mt: MultitermFde) -> CompanionSystem:
    """
    Companion system of order 1/q and dimension N = n p for the state
    Y = (y, D^{1/q} y, ..., D^{(N-1)/q} y).

    The superdiagonal is one; the last row holds -a[k]/a[n] in column k p. The forcing
    enters along e_N / a[n]. An integer-order initial value b[j] sits at position j q
    when that position lies inside the state; the other components start at zero.
    """
    if not isinstance(mt, MultitermFde):
        raise ValidationError(f"expected a MultitermFde, got {type(mt).__name__}")
    n, p, q = mt.n, mt.p, mt.q
    N = n * p
    A = np.diag(np.ones(N - 1), 1) if N > 1 else np.zeros((1, 1))
    an = mt.a[-1]
    for k in range(n):
        A[N - 1, k * p] -= mt.a[k] / an
    Y0 = np.zeros(N)
    for j, value in enumerate(mt.b):
        if j * q < N:
            Y0[j * q] = value
        elif value != 0.0:
            raise DimensionError(f"initial value b[{j}] has no slot in the {N}-dimensional companion state")
    e = np.zeros(N)
    e[-1] = 1.0 / an

    forcing: Forcing = None
    if isinstance(mt.forcing, PolynomialForcing):
        forcing = PolynomialForcing(mt.forcing.coeffs, e)
    elif isinstance(mt.forcing, SampledForcing):
        scalar = mt.forcing
        forcing = SampledForcing(lambda t: scalar(t)[0] * e)

    system = LinearFdeSystem(A, float(Fraction(1, q)), [Y0], forcing)
    logger.debug("companion system: n=%d, alpha=%s, N=%d", n, mt.alpha, N)
    return CompanionSystem(system, mt, e)
