# tests/unit/matrix/test_gallery.py
# Copyright (c) 2024 Brad Edwards
# Licensed under the MIT License - see LICENSE file for details

import numpy as np
import pytest


def test_redheffer():
    from mlf.matrix.gallery import redheffer

    R = redheffer(4)
    expected = np.array(
        [
            [1, 1, 1, 1],
            [1, 1, 0, 1],
            [1, 0, 1, 0],
            [1, 0, 0, 1],
        ],
        dtype=float,
    )
    np.testing.assert_array_equal(R, expected)
    # det R(n) is the Mertens function M(n)
    assert np.linalg.det(redheffer(8)) == pytest.approx(-2.0)


def test_redheffer_order():
    from mlf.core.errors import ValidationError
    from mlf.matrix.gallery import redheffer

    with pytest.raises(ValidationError):
        redheffer(0)


def test_classical_members():
    from mlf.matrix.gallery import frank, lehmer, minij, pascal

    np.testing.assert_allclose(lehmer(3), [[1, 0.5, 1 / 3], [0.5, 1, 2 / 3], [1 / 3, 2 / 3, 1]])
    np.testing.assert_array_equal(minij(3), [[1, 1, 1], [1, 2, 2], [1, 2, 3]])
    assert pascal(4)[3, 3] == 20.0
    np.testing.assert_array_equal(frank(3), [[3, 2, 1], [2, 2, 1], [0, 1, 1]])


def test_conditioning_subset_is_square():
    from mlf.matrix.gallery import CONDITIONING_SUBSET

    for name, build in CONDITIONING_SUBSET.items():
        M = build(5)
        assert M.shape == (5, 5), name


@pytest.mark.parametrize("row", [1, 2, 3, 4])
def test_selected_eigenvalue_matrices(row):
    from mlf.matrix.gallery import selected_eigenvalue_matrix, spectrum_of_row

    A = selected_eigenvalue_matrix(row)
    spectrum = spectrum_of_row(row)
    assert A.shape == (40, 40)
    assert spectrum.size == 40
    assert not np.iscomplexobj(A)
    assert np.trace(A) == pytest.approx(spectrum.sum().real, abs=1e-10)
    np.testing.assert_array_equal(A, selected_eigenvalue_matrix(row))


def test_unknown_row():
    from mlf.core.errors import ValidationError
    from mlf.matrix.gallery import selected_eigenvalue_matrix, spectrum_of_row

    with pytest.raises(ValidationError):
        selected_eigenvalue_matrix(5)
    with pytest.raises(ValidationError):
        spectrum_of_row(0)
