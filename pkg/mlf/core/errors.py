# mlf/core/errors.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details
class MLError(Exception):
    """
    Base exception class for errors within the Mittag-Leffler function library.
    """

    pass


class ValidationError(MLError):
    """
    Raised when validation detects invalid parameters, tolerances or matrix shapes.
    """

    pass


class InvalidArgument(ValidationError):
    """
    Raised when an argument is outside the domain of an operation (for example z = 0
    where the operation divides by z).
    """

    pass


class ArgumentOutOfRange(ValidationError):
    """
    Raised when the truncated series cannot reach the target accuracy because the
    argument exceeds the admissibility bound set by the Gamma overflow threshold.
    """

    pass


class IrrationalOrder(ValidationError):
    """
    Raised when a multiterm equation is given an order that is not a rational p/q.
    """

    pass


class NodeBudget(ValidationError):
    """
    Raised when a quadrature is requested with fewer nodes than it needs.
    """

    pass


class ParseError(ValidationError):
    """
    Raised when an input file (matrix or problem description) cannot be parsed.
    """

    pass


class DimensionError(ValidationError):
    """
    Raised when matrices or vectors have nonconformal or non-square shapes.
    """

    pass


class GammaError(MLError):
    """
    Base class for failures of the Gamma function.
    """

    pass


class PoleOfGamma(GammaError):
    """
    Raised when the Gamma function is evaluated at a nonpositive integer.
    """

    pass


class GammaOverflow(GammaError):
    """
    Raised when the Gamma function is evaluated beyond the double precision overflow threshold.
    """

    pass


class AccuracyError(MLError):
    """
    Base class for evaluations that cannot certify the requested accuracy.
    """

    pass


class AccuracyLost(AccuracyError):
    """
    Raised by a single method when its a-posteriori error estimate exceeds the target;
    the dispatcher catches it and falls back to another method.
    """

    def __init__(self, message: str = "", result=None) -> None:
        super().__init__(message)
        self.result = result


class AccuracyDegraded(AccuracyError):
    """
    Raised in strict mode when the best available result misses the target accuracy.
    The degraded result is attached as ``result``.
    """

    def __init__(self, message: str = "", result=None) -> None:
        super().__init__(message)
        self.result = result


class TargetUnreachable(AccuracyError):
    """
    Raised when no contour parameters can meet the requested tolerance.
    """

    pass


class MatrixFunctionError(MLError):
    """
    Base class for failures of the Schur-Parlett matrix function engine.
    """

    pass


class NoConvergence(MatrixFunctionError):
    """
    Raised when the Schur factorization does not converge.
    """

    pass


class SwapInstability(MatrixFunctionError):
    """
    Raised when swapping two adjacent diagonal entries of a triangular factor leaves
    a residual above tolerance.
    """

    pass


class SlowTaylorDecay(MatrixFunctionError):
    """
    Raised when the Taylor series of an atomic block does not converge within the
    derivative order budget.
    """

    pass


class NearSingularSeparation(MatrixFunctionError):
    """
    Raised when a triangular Sylvester equation meets two eigenvalues that are too close.
    """

    pass


class DerivativeBudgetExceeded(MatrixFunctionError):
    """
    Raised when a matrix evaluation needs derivatives above the configured order cap.
    """

    pass


class ZeroFunctionNorm(MatrixFunctionError):
    """
    Raised when a relative condition number is requested for a matrix with f(A) = 0.
    """

    pass


class BudgetExceeded(MLError):
    """
    Raised by the extended precision oracles when a summation needs too many terms.
    """

    pass
