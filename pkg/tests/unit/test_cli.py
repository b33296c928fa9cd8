# tests/unit/test_cli.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

import json
import math

import numpy as np
import pytest
from scipy import linalg
from typer.testing import CliRunner


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, *args):
    from mlf.cli import app

    return runner.invoke(app, [str(a) for a in args])


def _write_csv(path, M):
    from mlf.io import write_matrix

    write_matrix(path, np.asarray(M, dtype=float))
    return path


def test_eval_json(runner):
    result = _invoke(runner, "eval", "--alpha", "1", "--z", "1")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["value_re"] == pytest.approx(math.e, rel=1e-14)
    assert data["method"] == "Series"


def test_eval_csv_with_derivative(runner):
    result = _invoke(runner, "eval", "--alpha", "1", "--z", "0.5", "--k", "2", "--format", "csv")
    assert result.exit_code == 0
    header, row = result.stdout.strip().splitlines()
    assert header.split(",")[:3] == ["k", "value_re", "value_im"]
    assert float(row.split(",")[1]) == pytest.approx(math.exp(0.5), rel=1e-14)


def test_eval_reference_metric(runner):
    result = _invoke(runner, "eval", "--alpha", "1", "--z", "1", "--reference", repr(math.e))
    assert json.loads(result.stdout)["relative_error"] < 1e-14


def test_eval_bad_argument_exits_with_error(runner):
    result = _invoke(runner, "eval", "--alpha", "1", "--z", "one")
    assert result.exit_code == 1


def test_invalid_environment_tolerance(runner, monkeypatch):
    monkeypatch.setenv("ML_TAU", "tight")
    assert _invoke(runner, "eval", "--alpha", "1", "--z", "1").exit_code == 1


def test_degraded_result_exits_with_two(runner, monkeypatch):
    from mlf.core import dispatch
    from mlf.core.base import DerivEval, Method

    def loose(z, k, p, tau, max_nodes):
        return DerivEval(complex(1.0, 0.0), k, Method.LAPLACE_INVERSION, 1e-6, 11)

    monkeypatch.setattr(dispatch, "lt_derivative", loose)
    result = _invoke(runner, "eval", "--alpha", "0.5", "--z", "-50")
    assert result.exit_code == 2
    assert '"degraded": true' in result.output


def test_deriv_table(runner):
    result = _invoke(runner, "deriv", "--alpha", "1", "--z", "0.25", "--k", "2")
    assert result.exit_code == 0
    records = json.loads(result.stdout)["records"]
    assert [r["k"] for r in records] == [0, 1, 2]


def test_matfun_writes_matrix(runner, tmp_path, rng):
    from mlf.io import read_matrix

    A = rng.standard_normal((3, 3))
    out = tmp_path / "E.csv"
    result = _invoke(runner, "matfun", _write_csv(tmp_path / "A.csv", A), "--alpha", "1", "--output", out)
    assert result.exit_code == 0
    np.testing.assert_allclose(read_matrix(out), linalg.expm(A), rtol=1e-12, atol=1e-12)
    assert json.loads(result.stdout)["path"] == "schur-parlett"


def test_matfun_reference(runner, tmp_path):
    A = np.diag([0.0, 1.0])
    args = ["--alpha", "1", "--output", tmp_path / "E.csv"]
    reference = _write_csv(tmp_path / "R.csv", np.diag([1.0, math.e]))
    result = _invoke(runner, "matfun", _write_csv(tmp_path / "A.csv", A), *args, "--reference", reference)
    assert json.loads(result.stdout)["relative_error"] < 1e-14


def test_matfun_missing_file(runner, tmp_path):
    result = _invoke(runner, "matfun", tmp_path / "none.csv", "--alpha", "1", "--output", tmp_path / "E.csv")
    assert result.exit_code == 1


def test_cond(runner, tmp_path, rng):
    path = _write_csv(tmp_path / "A.csv", rng.standard_normal((3, 3)))
    result = _invoke(runner, "cond", path, "--alpha", "0.8", "--norm", "one")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["norm"] == "One"
    assert data["kappa_rel"] > 0.0


def test_fde_closed_form(runner, tmp_path):
    problem = tmp_path / "osc.json"
    problem.write_text(json.dumps({"type": "multiterm", "a": [1, 0, 1], "alpha": 1, "b": [1, 0]}), encoding="utf-8")
    result = _invoke(runner, "fde", problem, "--t", "0:0.5:1")
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "t,y"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    np.testing.assert_allclose(values, np.cos([0.0, 0.5, 1.0]), rtol=1e-12)


def test_fde_product_integration(runner, tmp_path):
    problem = tmp_path / "decay.json"
    problem.write_text(json.dumps({"type": "multiterm", "a": [1, 1], "alpha": 1, "b": [1]}), encoding="utf-8")
    result = _invoke(runner, "fde", problem, "--t", "1", "--method", "pi", "--h", "0.01", "--format", "json")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["columns"] == ["t", "y", "h"]
    assert data["rows"][0][1] == pytest.approx(math.exp(-1.0), abs=1e-4)


def test_fde_bad_problem(runner, tmp_path):
    problem = tmp_path / "bad.json"
    problem.write_text('{"type": "multiterm", "a": [1, 1], "alpha": "pi"}', encoding="utf-8")
    assert _invoke(runner, "fde", problem).exit_code == 1


def test_gramian(runner, tmp_path):
    from mlf.io import read_matrix

    A = _write_csv(tmp_path / "A.csv", [[-1.0]])
    B = _write_csv(tmp_path / "B.csv", [[1.0]])
    out = tmp_path / "G.csv"
    result = _invoke(runner, "gramian", A, B, "--alpha", "1", "--t", "1", "--output", out)
    assert result.exit_code == 0
    assert read_matrix(out)[0, 0] == pytest.approx((1.0 - math.exp(-2.0)) / 2.0, rel=1e-12)
    assert json.loads(result.stdout)["verdict"] == "positive definite"


def test_main_maps_usage_errors_to_one(capsys):
    from mlf.cli import main

    assert main(["eval", "--z", "1"]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["eval", "--alpha", "1", "--z", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["value_re"] == 1.0
