# tests/unit/fde/test_fde_systems.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

from fractions import Fraction

import numpy as np
import pytest


def test_polynomial_forcing():
    from mlf.fde.systems import PolynomialForcing

    f = PolynomialForcing((0.0, 2.0, -0.5))
    assert f(2.0) == pytest.approx(2.0)
    np.testing.assert_allclose(f(np.array([0.0, 1.0])), [0.0, 1.5])
    assert not f.is_zero
    assert PolynomialForcing((0.0, 0.0)).is_zero
    directed = PolynomialForcing((1.0,), [[1.0], [2.0]])
    assert directed.direction.shape == (2,)


def test_polynomial_forcing_needs_coefficients():
    from mlf.core.errors import ValidationError
    from mlf.fde.systems import PolynomialForcing

    with pytest.raises(ValidationError):
        PolynomialForcing(())
    with pytest.raises(ValidationError):
        PolynomialForcing((float("nan"),))


def test_sampled_forcing_returns_vectors():
    from mlf.fde.systems import SampledForcing

    f = SampledForcing(lambda t: 3.0 * t)
    assert f(2.0).shape == (1,)
    assert f(2.0)[0] == 6.0


def test_linear_system_initial_vectors():
    from mlf.fde.systems import LinearFdeSystem

    sys = LinearFdeSystem(np.eye(2), 0.6, np.array([1.0, 2.0]))
    assert sys.n == 2
    assert sys.m == 1
    assert len(sys.Y0) == 1
    second_order = LinearFdeSystem(np.eye(2), 1.5, [[1.0, 0.0], [0.0, 1.0]])
    assert second_order.m == 2


def test_linear_system_validation():
    from mlf.core.errors import DimensionError, ValidationError
    from mlf.fde.systems import LinearFdeSystem, PolynomialForcing

    with pytest.raises(ValidationError):
        LinearFdeSystem(np.eye(2), 1.5, [np.zeros(2)])
    with pytest.raises(ValidationError):
        LinearFdeSystem(np.eye(2), 0.0, [np.zeros(2)])
    with pytest.raises(DimensionError):
        LinearFdeSystem(np.eye(2), 0.5, [np.zeros(3)])
    with pytest.raises(ValidationError):
        LinearFdeSystem(np.eye(2), 0.5, [np.zeros(2)], PolynomialForcing((1.0,)))
    with pytest.raises(DimensionError):
        LinearFdeSystem(np.eye(2), 0.5, [np.zeros(2)], PolynomialForcing((1.0,), [1.0, 0.0, 0.0]))
    with pytest.raises(ValidationError):
        LinearFdeSystem(np.eye(2), 0.5, [np.zeros(2)], lambda t: t)


@pytest.mark.parametrize("given", [Fraction(4, 5), (4, 5), [8, 10], {"p": 4, "q": 5}, "4/5", " 4/5 ", 0.8])
def test_rational_orders(given):
    from mlf.fde.systems import as_rational_order

    assert as_rational_order(given) == Fraction(4, 5)


def test_integer_order():
    from mlf.fde.systems import as_rational_order

    assert as_rational_order(1) == Fraction(1)


@pytest.mark.parametrize("given", [3.141592653589793, "pi", True, (1, 0), {"p": 1}, None, float("inf"), Fraction(1, 101)])
def test_irrational_orders(given):
    from mlf.core.errors import IrrationalOrder
    from mlf.fde.systems import as_rational_order

    with pytest.raises(IrrationalOrder):
        as_rational_order(given)


def test_multiterm_shape(example3_problem):
    mt = example3_problem
    assert mt.n == 4
    assert (mt.p, mt.q) == (4, 5)
    assert mt.n_initial == 4
    assert mt.b == (0.0, 0.0, 0.0, 0.0)
    assert mt.companion_dimension == 16
    np.testing.assert_allclose(mt.forcing_at(np.array([0.0, 1.0, 2.0])), [0.0, 1.5, 2.0])


def test_multiterm_validation():
    from mlf.core.errors import ValidationError
    from mlf.fde.systems import MultitermFde, PolynomialForcing

    with pytest.raises(ValidationError):
        MultitermFde([1.0], Fraction(1, 2))
    with pytest.raises(ValidationError):
        MultitermFde([1.0, 0.0], Fraction(1, 2))
    with pytest.raises(ValidationError):
        MultitermFde([1.0, 1.0], Fraction(3, 2))
    with pytest.raises(ValidationError):
        MultitermFde([1.0, 1.0, 1.0], Fraction(1, 2), b=[0.0, 0.0])
    with pytest.raises(ValidationError):
        MultitermFde([1.0, 1.0], Fraction(1, 2), forcing=PolynomialForcing((1.0,), [1.0]))


def test_multiterm_sampled_forcing():
    from mlf.fde.systems import MultitermFde, SampledForcing

    mt = MultitermFde([1.0, 1.0], "1/2", forcing=SampledForcing(lambda t: t * t))
    np.testing.assert_allclose(mt.forcing_at(np.array([1.0, 3.0])), [1.0, 9.0])
    assert not np.any(MultitermFde([1.0, 1.0], "1/2").forcing_at(np.ones(3)))


def test_companion_structure(example3_problem):
    from mlf.fde.systems import companion_from_multiterm

    companion = companion_from_multiterm(example3_problem)
    A = companion.system.A
    assert companion.dimension == 16
    assert companion.system.alpha == pytest.approx(0.2)
    np.testing.assert_array_equal(np.diag(A, 1), np.ones(15))
    assert [A[15, c] for c in (0, 4, 8, 12)] == [-2.0, -6.0, -7.0, -4.0]
    assert np.count_nonzero(A[15]) == 4
    assert companion.forcing_vector[-1] == 1.0
    np.testing.assert_array_equal(companion.system.forcing.direction, companion.forcing_vector)


def test_companion_spectrum(example3_problem):
    from mlf.fde.systems import companion_from_multiterm

    # lambda^4 runs over the roots of mu^4 + 4 mu^3 + 7 mu^2 + 6 mu + 2 = (mu + 1)^2 (mu^2 + 2 mu + 2)
    A = companion_from_multiterm(example3_problem).system.A
    for lam in np.linalg.eigvals(A):
        mu = lam**4
        assert abs(np.polyval([1.0, 4.0, 7.0, 6.0, 2.0], mu)) < 1e-6


def test_companion_initial_values():
    from mlf.fde.systems import MultitermFde, companion_from_multiterm

    companion = companion_from_multiterm(MultitermFde([1.0, 0.0, 1.0], Fraction(2, 3), b=[1.0, 0.5]))
    np.testing.assert_array_equal(companion.system.Y0[0], [1.0, 0.0, 0.0, 0.5])
    states = np.arange(8.0).reshape(2, 4)
    np.testing.assert_array_equal(companion.read(states), [0.0, 4.0])


def test_companion_needs_multiterm():
    from mlf.core.errors import ValidationError
    from mlf.fde.systems import LinearFdeSystem, companion_from_multiterm

    with pytest.raises(ValidationError):
        companion_from_multiterm(LinearFdeSystem(np.eye(1), 0.5, [np.zeros(1)]))
