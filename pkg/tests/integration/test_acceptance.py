# tests/integration/test_acceptance.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

"""
End-to-end accuracy checks against the extended-precision oracles in tests/oracles.py.
"""

import cmath
import json
import math

import numpy as np
import pytest
from scipy import special
from typer.testing import CliRunner

pytestmark = [pytest.mark.integration, pytest.mark.slow]


def _metric(exact, approx):
    from mlf.core.dispatch import relative_error_metric

    return relative_error_metric(exact, approx)


def test_exponential_collapse():
    from mlf.core.base import MLParams
    from mlf.core.dispatch import ml_derivative

    rng = np.random.default_rng(1)
    radius = 20.0 * np.sqrt(rng.uniform(0.0, 1.0, 200))
    angle = rng.uniform(-math.pi, math.pi, 200)
    p = MLParams(1.0, 1.0)
    for r, a in zip(radius, angle):
        z = cmath.rect(r, a)
        assert _metric(cmath.exp(z), ml_derivative(z, 0, p).value) <= 1e-13, z


def test_special_function_identities():
    from mlf.core.dispatch import mittag_leffler

    rng = np.random.default_rng(2)
    z = rng.uniform(-20.0, 20.0, 100) + 1j * rng.uniform(-20.0, 20.0, 100)
    computed = mittag_leffler(z, 2.0, 1.0)
    for zi, ci in zip(z, computed):
        assert _metric(np.cosh(np.sqrt(zi)), ci) <= 1e-12, zi

    x = np.linspace(-6.0, 6.0, 100)
    computed = mittag_leffler(x, 0.5, 1.0)
    for xi, ci in zip(x, computed):
        assert _metric(special.erfcx(-xi), ci) <= 1e-12, xi


@pytest.mark.parametrize("alpha, beta, angle", [(0.6, 0.6, 0.8 * math.pi), (0.8, 1.2, 0.5 * math.pi)])
def test_derivatives_along_rays(alpha, beta, angle):
    from tests.oracles import as_complex, bigfloat_series

    from mlf.core.base import MLParams
    from mlf.core.dispatch import ml_derivative

    p = MLParams(alpha, beta)
    for r in np.linspace(0.25, 10.0, 8):
        z = cmath.rect(r, angle)
        for k in range(1, 7):
            exact = as_complex(bigfloat_series(z, k, alpha, beta))
            assert _metric(exact, ml_derivative(z, k, p).value) <= 5e-13, (z, k)


@pytest.mark.parametrize("alpha, beta", [(0.6, 0.6), (0.8, 1.2), (1.5, 0.5)])
def test_summation_coefficients_solve_the_moment_system(alpha, beta):
    from mlf.core.base import MLParams
    from mlf.core.summation import djrbashian_coeffs

    # matching z^m in (alpha z)^k E^(k) = sum_j c_j E_{alpha,beta-j}:
    # sum_j c_j Gamma(x)/Gamma(x-j) = alpha^k (m+1)_k with x = alpha(m+k)+beta
    p = MLParams(alpha, beta)
    for k in range(1, 9):
        c = djrbashian_coeffs(k, p).c
        for m in range(11):
            x = alpha * (m + k) + beta
            lhs = sum(cj * math.prod(x - 1 - i for i in range(j)) for j, cj in enumerate(c))
            rhs = alpha**k * math.prod(m + 1 + i for i in range(k))
            assert lhs == pytest.approx(rhs, rel=1e-10), (k, m)


def test_tabulated_coefficients_and_residue_polynomials():
    from mlf.core.base import MLParams
    from mlf.core.laplace import residue_poly
    from mlf.core.summation import djrbashian_coeffs

    alpha, beta = 0.7, 1.3
    p = MLParams(alpha, beta)
    assert djrbashian_coeffs(1, p).c == pytest.approx((1 - beta, 1.0))
    assert djrbashian_coeffs(2, p).c == pytest.approx(((1 - beta) * (1 - beta - alpha), 3 - 2 * beta - alpha, 1.0))
    assert djrbashian_coeffs(3, p).c[2] == pytest.approx(6 - 3 * beta - 3 * alpha)

    assert residue_poly(0, p).p_coeffs == pytest.approx((1.0,))
    # for alpha = beta = 1 the residue of e^s/(s-z)^(k+1) is e^z/k!, so P_k(x) = x^k/k!
    assert residue_poly(1, p).p_coeffs == pytest.approx((1 - beta, 1.0))
    assert residue_poly(2, MLParams(1.0, 1.0)).p_coeffs == pytest.approx((0.0, 0.0, 0.5))
    assert residue_poly(3, MLParams(1.0, 1.0)).p_coeffs == pytest.approx((0.0, 0.0, 0.0, 1.0 / 6.0))


def test_balancing_reduces_error_near_origin(ml_settings):
    from tests.oracles import as_complex, bigfloat_series

    from mlf.core.base import MLParams
    from mlf.core.laplace import lt_derivative
    from mlf.core.summation import balanced_derivative, sf_prabhakar

    p = MLParams(0.6, 1.0)
    tau, nodes = ml_settings.tau, ml_settings.contour_max_nodes
    balanced_err, plain_err = [], []
    for r in np.linspace(0.2, 2.0, 10):
        z = cmath.rect(r, 0.5 * math.pi)
        exact = as_complex(bigfloat_series(z, 5, p.alpha, p.beta))
        plain = sf_prabhakar(z, 5, p, lambda w, q: lt_derivative(w, 0, q, tau, nodes))
        balanced = balanced_derivative(z, 5, 1, p, lambda w, order, q: lt_derivative(w, order, q, tau, nodes))
        plain_err.append(_metric(exact, plain.value))
        balanced_err.append(_metric(exact, balanced.value))
    assert max(balanced_err) < max(plain_err)
    assert max(balanced_err) <= 1e-11


@pytest.mark.parametrize("n", [4, 8, 12, 16, 20])
def test_redheffer_matrices(n):
    from tests.oracles import matrix_taylor

    from mlf.core.base import MLParams
    from mlf.matrix.gallery import redheffer
    from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

    A = -redheffer(n)
    for alpha in (0.5, 0.8, 1.2):
        result = ml_matrix(MatrixMLRequest(A, MLParams(alpha, 1.0)))
        assert _metric(matrix_taylor(A, alpha, 1.0), result.value) <= 5e-13, alpha
        if n == 20:
            assert result.max_order >= 10


@pytest.fixture(scope="module")
def clustered_matrix():
    from mlf.matrix.gallery import selected_eigenvalue_matrix

    return selected_eigenvalue_matrix(1)


@pytest.mark.parametrize("alpha", [0.6, 0.9])
def test_clustered_spectrum(clustered_matrix, alpha):
    from tests.oracles import matrix_taylor

    from mlf.core.base import MLParams
    from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

    result = ml_matrix(MatrixMLRequest(clustered_matrix, MLParams(alpha, 1.0)))
    assert _metric(matrix_taylor(clustered_matrix, alpha, 1.0), result.value) <= 1e-11


def test_error_within_conditioning_bound(clustered_matrix):
    from tests.oracles import matrix_taylor

    from mlf.config import EPS, MLSettings
    from mlf.core.base import MLParams
    from mlf.matrix.conditioning import cond_estimate
    from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

    p = MLParams(0.9, 1.0)
    report = cond_estimate(clustered_matrix, p, probes=1, settings=MLSettings(cond_max_iterations=4), seed=7)
    assert report.kappa_rel == pytest.approx(report.kappa_abs * report.norm_a / report.norm_fa, rel=1e-12)
    exact = matrix_taylor(clustered_matrix, 0.9, 1.0)
    computed = ml_matrix(MatrixMLRequest(clustered_matrix, p)).value
    measured = np.linalg.norm(computed - exact) / np.linalg.norm(exact)
    assert measured <= 10.0 * report.kappa_rel * EPS


def test_conjugate_matrix_argument(rng):
    from mlf.core.base import MLParams
    from mlf.matrix.matrix_ml import MatrixMLRequest, ml_matrix

    for _ in range(5):
        A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        p = MLParams(0.7, 1.1)
        direct = np.conj(ml_matrix(MatrixMLRequest(A, p)).value)
        conjugated = ml_matrix(MatrixMLRequest(np.conj(A), p)).value
        assert np.max(np.abs(direct - conjugated)) <= 1e-12 * (1.0 + np.max(np.abs(direct)))


def test_multiterm_product_integration_self_convergence(example3_problem):
    from mlf.fde.product_integration import trapezoidal_pi
    from mlf.fde.solvers import solve_multiterm
    from mlf.fde.systems import companion_from_multiterm

    assert companion_from_multiterm(example3_problem).dimension == 16
    times = 0.5 * np.arange(1, 13)
    closed = solve_multiterm(example3_problem, times)
    errors = []
    for e in range(5, 10):
        h = 2.0**-e
        t, y = trapezoidal_pi(example3_problem, h, 6.0)
        on_grid = np.rint(times / h).astype(int)
        np.testing.assert_allclose(t[on_grid], times)
        errors.append(np.max(np.abs(y[on_grid] - closed)))
    order = math.log2(errors[0] / errors[-1]) / (len(errors) - 1)
    assert 1.7 <= order <= 2.3
    assert errors[-1] <= 1e-3


@pytest.fixture
def runner():
    return CliRunner()


def test_cli_high_order_derivative(runner):
    from tests.oracles import as_complex, bigfloat_series

    from mlf.cli import app

    result = runner.invoke(app, ["eval", "--alpha", "0.6", "--beta", "0.6", "--z", "-2.35+1.71i", "--k", "4"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    exact = as_complex(bigfloat_series(-2.35 + 1.71j, 4, 0.6, 0.6))
    assert _metric(exact, complex(data["value_re"], data["value_im"])) <= 5e-13


def test_cli_exact_origin(runner):
    from mlf.cli import app

    result = runner.invoke(app, ["eval", "--alpha", "0.5", "--beta", "1", "--z", "0+0i", "--k", "2"])
    data = json.loads(result.stdout)
    assert data["value_re"] == 2.0
    assert data["method"] == "Exact0"


def test_cli_matrix_round_trip(runner, tmp_path):
    from mlf.cli import app
    from mlf.io import read_matrix, write_matrix

    write_matrix(tmp_path / "Z.csv", np.zeros((2, 2)))
    out = tmp_path / "E.csv"
    result = runner.invoke(app, ["matfun", str(tmp_path / "Z.csv"), "--alpha", "0.7", "--beta", "0.5", "-o", str(out)])
    assert result.exit_code == 0
    np.testing.assert_allclose(read_matrix(out), 0.5641895835477563 * np.eye(2), rtol=1e-15, atol=0)


def test_cli_fde_methods_agree(runner, tmp_path):
    from mlf.cli import app

    problem = tmp_path / "example.json"
    problem.write_text(
        json.dumps({"type": "multiterm", "a": [2, 6, 7, 4, 1], "alpha": {"p": 4, "q": 5}, "forcing": {"poly": [0, 2, -0.5]}}),
        encoding="utf-8",
    )

    def column(*extra):
        result = runner.invoke(app, ["fde", str(problem), "--t", "0:0.5:6", *extra])
        assert result.exit_code == 0
        return np.array([float(line.split(",")[1]) for line in result.stdout.strip().splitlines()[1:]])

    closed = column()
    pi = column("--method", "pi", "--h", "0.01")
    assert closed.size == 13
    assert np.max(np.abs(closed - pi)) <= 1e-3
