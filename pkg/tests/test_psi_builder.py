import math
from fractions import Fraction

import numpy as np
import pytest

from MSL_Utils.Exceptions import DegenerateColumnError, InputError, ResolutionError
from Operator_Theory.Disc_Algebra import ChiFunction, ConstantFunction, halton_disc_points
from Operator_Theory.Psi_Builder import (
    PsiParameters,
    build_psi,
    build_psi_normalized,
    build_tau_sets,
    choose_parameters,
    column_data,
    normalize_column,
    verify_kappa_bounds,
)

C = 2 ** -0.5


@pytest.fixture(scope="module")
def worked_column(grid):
    return column_data([ConstantFunction(C), -C * ChiFunction()], grid)


@pytest.fixture(scope="module")
def worked_psi(worked_column):
    return build_psi(worked_column)


def test_column_data_of_worked_column(worked_column):
    assert worked_column.c_squared == pytest.approx(1.0)
    np.testing.assert_allclose(worked_column.sup_norms, [C, C])


def test_parameters_of_worked_column(worked_column):
    params = choose_parameters(worked_column)
    assert params.deltas == pytest.approx((0.5, 0.5))
    assert params.delta == pytest.approx(0.5)
    assert params.a == pytest.approx(0.25)
    assert params.b == pytest.approx(0.0625)
    assert params.kappa_bound == pytest.approx(0.125)
    assert params.row_bound == pytest.approx(0.25)
    assert all(params.check(worked_column).values())


def test_full_threshold_sets_are_split_in_halves(worked_psi):
    assert [s.measure for s in worked_psi.tau] == [1, 1]
    assert [s.measure for s in worked_psi.sigma] == [Fraction(1, 2), Fraction(1, 2)]
    assert worked_psi.sigma[0].isdisjoint(worked_psi.sigma[1])
    assert worked_psi.level_crossings == 0
    assert sum(worked_psi.sigma_cells) == worked_psi.column.grid.size


def test_psi_is_invertible_with_inner_image(worked_psi):
    assert worked_psi.det_lower_bound > 0
    assert worked_psi.image_residual < 1e-8
    grid = worked_psi.column.grid
    for theta in worked_psi.theta:
        np.testing.assert_allclose(np.abs(theta.boundary_values(grid)), 1.0, atol=1e-8)


def test_kappa_bounds_hold_inside(worked_psi):
    report = verify_kappa_bounds(worked_psi, count=200)
    assert report.passed
    assert report.kappa_min >= 0.125 - 1e-6
    assert min(report.row_mins) >= 0.25 - 1e-6


def test_three_entry_column_kappa_bound(grid):
    z = ChiFunction()
    s = 3 ** -0.5
    col = column_data([s * z, ConstantFunction(s), s * z * z], grid)
    params = choose_parameters(col)
    assert params.b == pytest.approx(params.a ** 2 / (2 * math.factorial(3)))
    psi = build_psi(col, params)
    assert sum(p.measure for p in psi.sigma) == 1
    assert all(p.measure > 0 for p in psi.sigma)
    report = verify_kappa_bounds(psi, points=halton_disc_points(150, 0.9))
    assert report.passed
    assert psi.image_residual < 1e-8


def test_column_validation(grid):
    with pytest.raises(InputError):
        column_data([ConstantFunction(2.0)], grid)
    with pytest.raises(InputError):
        column_data([ConstantFunction(0.0), ConstantFunction(0.0)], grid)
    col = column_data([ConstantFunction(0.0), ConstantFunction(1.0)], grid)
    with pytest.raises(DegenerateColumnError):
        choose_parameters(col)


def test_unreachable_threshold_is_a_resolution_error(worked_column):
    params = PsiParameters((2.0, 2.0), 2.0, 1.0, 0.1)
    with pytest.raises(ResolutionError):
        build_tau_sets(worked_column, params)


def test_normalize_column_moves_vanishing_entries(grid):
    normalized = normalize_column([ConstantFunction(0.0), ConstantFunction(1.0)], grid)
    np.testing.assert_array_equal(normalized.pre_matrix, [[0.0, 1.0], [1.0, 1.0]])
    assert normalized.nonzero == 1
    with pytest.raises(DegenerateColumnError):
        normalize_column([ConstantFunction(0.0)], grid)


def test_normalized_psi_maps_column_to_inner_functions(grid):
    phi = [ConstantFunction(0.0), ConstantFunction(1.0)]
    result = build_psi_normalized(phi, grid)
    values = result.matrix.boundary_matrix(grid)
    samples = np.array([f.boundary_values(grid) for f in phi])
    image = np.einsum("gnk,kg->ng", values, samples)
    np.testing.assert_allclose(np.abs(image), 1.0, atol=1e-8)
    assert np.min(np.abs(np.linalg.det(values))) > 0


def test_identity_normalization_reuses_psi(grid):
    result = build_psi_normalized([ConstantFunction(C), -C * ChiFunction()], grid)
    assert result.matrix is result.psi.matrix
