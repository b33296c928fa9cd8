# tests/oracles.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
Extended-precision reference values computed at test time: term-by-term big-float
summation of the derivative series, matrix Taylor summation, and closed forms of
special cases.
"""

import math
from fractions import Fraction

import mpmath as mp
import numpy as np

from mlf.core.errors import BudgetExceeded

MAX_SERIES_TERMS = 10**6
MAX_MATRIX_TERMS = 20000


def _peak_log10(z: complex, k: int, alpha: float, beta: float) -> float:
    """log10 of the largest term of the derivative series, at low precision."""
    with mp.workdps(15):
        z = mp.mpc(z)
        peak = mp.mpf(0)
        small = 0
        j = 0
        while small < 3 and j < MAX_SERIES_TERMS:
            term = abs(mp.rf(j + 1, k) * z**j * mp.rgamma(alpha * (j + k) + beta))
            peak = max(peak, term)
            small = small + 1 if (j > 2 * k + 10 and term < peak * mp.mpf(10) ** -40) else 0
            j += 1
        return float(mp.log10(peak)) if peak > 0 else 0.0


def bigfloat_series(z, k: int, alpha: float, beta: float, digits: int = 50):
    """
    k-th derivative of E_{alpha,beta} at z,
    sum_j (j+1)...(j+k) z^j / Gamma(alpha (j+k) + beta), summed with enough guard
    digits to absorb the cancellation between terms. Returns an mpmath number
    rounded to ``digits`` significant digits.

    :raises BudgetExceeded: Beyond 10**6 terms.
    """
    if digits < 30:
        raise ValueError("digits must be at least 30")
    guard = 15 + 2 * max(0, math.ceil(_peak_log10(z, k, alpha, beta)))
    with mp.workdps(digits + guard):
        z = mp.mpc(z)
        a = mp.mpf(alpha)
        b = mp.mpf(beta)
        total = mp.mpc(0)
        peak = mp.mpf(0)
        threshold = mp.mpf(10) ** (-(digits + 10))
        small = 0
        for j in range(MAX_SERIES_TERMS):
            term = mp.rf(j + 1, k) * z**j * mp.rgamma(a * (j + k) + b)
            total += term
            peak = max(peak, abs(term))
            if j > 2 * k + 10 and abs(term) <= threshold * max(abs(total), peak * mp.mpf(10) ** -guard):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        else:
            raise BudgetExceeded(f"series for z={z} did not settle within {MAX_SERIES_TERMS} terms")
    with mp.workdps(digits):
        return +total if mp.im(total) != 0 else +mp.re(total)


def as_complex(value) -> complex:
    return complex(mp.mpc(value))


def _taylor_plan(A: np.ndarray, alpha: float, beta: float, digits: int):
    """Number of terms and guard digits from a float64 run on log-scaled powers."""
    n = A.shape[0]
    P = np.eye(n, dtype=A.dtype)
    log_norm = 0.0
    log_peak = -math.inf
    for j in range(1, MAX_MATRIX_TERMS):
        P = P @ A
        s = np.linalg.norm(P)
        if s == 0.0:
            return j, 10
        log_norm += math.log(s)
        P = P / s
        log_term = log_norm - math.lgamma(alpha * j + beta) if alpha * j + beta > 0 else log_norm
        log_peak = max(log_peak, log_term)
        cutoff = max(log_peak, 0.0) - digits * math.log(10)
        if j > 10 and log_term < cutoff:
            return j, 10 + 2 * max(0, math.ceil(log_peak / math.log(10)))
    raise BudgetExceeded(f"matrix Taylor series did not settle within {MAX_MATRIX_TERMS} terms")


def _object_matrix(A: np.ndarray):
    """
    Exact object-array form of A: for real A the integer matrix A 2^s and the shift s,
    for complex A mpc entries and shift 0.
    """
    if np.isrealobj(A):
        fracs = [Fraction(float(x)) for x in A.flat]
        s = max(f.denominator.bit_length() - 1 for f in fracs)
        ints = [int(f * (1 << s)) for f in fracs]
        return np.array(ints, dtype=object).reshape(A.shape), s
    return np.vectorize(lambda x: mp.mpc(complex(x)), otypes=[object])(A), 0


def matrix_taylor(A, alpha: float, beta: float = 1.0, digits: int = 30) -> np.ndarray:
    """
    E_{alpha,beta}(A) = sum_j A^j / Gamma(alpha j + beta) in extended precision, summed
    until two consecutive terms fall below 1e-20 times the partial sum. Integer
    matrices are scaled to integers and raised to powers exactly.

    :raises BudgetExceeded: If the series does not settle.
    """
    A = np.asarray(A)
    n = A.shape[0]
    planned, guard = _taylor_plan(A, alpha, beta, digits)
    with mp.workdps(digits + guard):
        M, shift = _object_matrix(A)
        a = mp.mpf(alpha)
        b = mp.mpf(beta)
        P = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                P[i, j] = 1 if i == j else 0
        S = P * mp.rgamma(b)
        threshold = mp.mpf(10) ** -20
        small = 0
        for j in range(1, MAX_MATRIX_TERMS):
            P = P @ M
            term = P * mp.ldexp(mp.rgamma(a * j + b), -shift * j)
            S = S + term
            t_norm = max(abs(x) for x in term.flat)
            s_norm = max(abs(x) for x in S.flat)
            small = small + 1 if t_norm <= threshold * s_norm else 0
            if small >= 2 and j >= planned:
                break
        else:
            raise BudgetExceeded(f"matrix Taylor series did not settle within {MAX_MATRIX_TERMS} terms")
        if np.isrealobj(A):
            return np.array([[float(x) for x in row] for row in S])
        return np.array([[complex(x) for x in row] for row in S])


def ml_half_erfc(x: float):
    """E_{1/2,1}(x) = exp(x^2) erfc(-x)."""
    with mp.workdps(40):
        return mp.exp(mp.mpf(x) ** 2) * mp.erfc(-mp.mpf(x))


def ml_two_cosh(z: complex):
    """E_{2,1}(z) = cosh(sqrt(z))."""
    with mp.workdps(40):
        return mp.cosh(mp.sqrt(mp.mpc(z)))


def scalar_series(z, alpha: float, beta: float, digits: int = 40):
    """E_{alpha,beta}(z) for any complex z, including beta at poles of Gamma."""
    return bigfloat_series(z, 0, alpha, beta, max(digits, 30))


def quad_gramian_scalar(alpha: float, a: float, t: float, digits: int = 30):
    """int_0^t E_{alpha,alpha}(a s^alpha)^2 ds for a scalar system."""
    with mp.workdps(digits):

        def integrand(s):
            e = scalar_series(a * s**alpha, alpha, alpha, digits) if s > 0 else mp.rgamma(alpha)
            return mp.re(e) ** 2

        return mp.quad(integrand, [0, t])
