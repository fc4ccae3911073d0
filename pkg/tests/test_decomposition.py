import numpy as np
import pytest

from MSL_Utils.Exceptions import InputError, LowerBoundViolationError, PreconditionError, RankDeficientError
from Operator_Theory.Disc_Algebra import BlaschkeProduct, ChiFunction, ConstantFunction, ProductFunction
from Operator_Theory.Decomposition import (
    assemble_c0_similarity,
    assemble_from_subspaces,
    build_shift_subspaces,
    convergence_table,
    decompose_vector,
    inner_pair,
    model_basis_vector,
    unique_representation_check,
)
from Operator_Theory.Model_Space import MatrixInnerFunction

C = 2 ** -0.5


@pytest.fixture(scope="module")
def subspaces_64(worked_pair):
    return build_shift_subspaces(worked_pair, 64)


def first_channel_constant(degree):
    x = np.zeros((2, degree), dtype=complex)
    x[0, 0] = 1.0
    return x


#-----------------------------------------------------------------------
def test_worked_pair_is_certified(worked_pair):
    assert worked_pair.channels == 2
    assert worked_pair.theta_certificate < 1e-10
    assert worked_pair.phi_certificate < 1e-10
    assert worked_pair.annihilation < 1e-10
    assert worked_pair.row_residual < 1e-10


def test_inner_pair_rejects_bad_input(grid):
    theta = MatrixInnerFunction([[ProductFunction([ConstantFunction(C), ChiFunction()])], [ConstantFunction(C)]])
    wrong_sign = MatrixInnerFunction([[ConstantFunction(C), ProductFunction([ConstantFunction(C), ChiFunction()])]])
    with pytest.raises(PreconditionError):
        inner_pair(theta, wrong_sign, grid)
    with pytest.raises(InputError):
        inner_pair(theta, theta, grid)


#-----------------------------------------------------------------------
def test_shift_subspaces_are_bounded_below(subspaces_64):
    assert len(subspaces_64) == 2
    for s in subspaces_64:
        assert s.lower_bound >= 1 - 1e-4
        assert s.structure_residual < 1e-6
        assert s.matrix.shape == (128, 64)


def test_model_basis_vector_of_worked_pair(worked_pair, subspaces_64):
    # (1, 0) is orthogonal to Theta H^2 for Theta = [z; 1]/sqrt(2)
    x = model_basis_vector(worked_pair.theta, subspaces_64[0].space, 0)
    np.testing.assert_allclose(np.abs(x), np.abs(first_channel_constant(64)), atol=1e-12)


@pytest.mark.parametrize("degree", [128, 256])
def test_decomposition_residual_is_small(worked_pair, degree):
    subspaces = build_shift_subspaces(worked_pair, degree)
    report = decompose_vector(first_channel_constant(degree), subspaces)
    assert report.in_model
    assert report.residual <= 1e-6
    assert report.method in ("constructive", "lstsq")
    np.testing.assert_allclose(sum(report.components), first_channel_constant(degree), atol=1e-6)


def test_decompose_vector_checks_shape(subspaces_64):
    with pytest.raises(InputError):
        decompose_vector(np.zeros((2, 10)), subspaces_64)
    with pytest.raises(InputError):
        decompose_vector(first_channel_constant(64), [])


def test_full_residual_does_not_grow_with_degree(worked_pair):
    rows = convergence_table(worked_pair, first_channel_constant(32), [32, 64, 128])
    assert [row["degree"] for row in rows] == [32, 64, 128]
    for before, after in zip(rows, rows[1:]):
        assert after["full_residual"] <= before["full_residual"] + 1e-9
    with pytest.raises(InputError):
        convergence_table(worked_pair, first_channel_constant(32), [16])


def test_doubling_degree_shrinks_full_residual(worked_pair):
    coarse, fine = convergence_table(worked_pair, first_channel_constant(128), [128, 256])
    assert coarse["residual"] <= 1e-6
    assert fine["residual"] <= 1e-6
    assert fine["full_residual"] < coarse["full_residual"]


#-----------------------------------------------------------------------
def test_assembly_over_the_window(subspaces_64):
    result = assemble_from_subspaces(subspaces_64)
    assert result.subspace_count == 2
    assert result.R.dimension == result.rank
    assert result.rank + result.kernel_dimension == 128
    assert result.defects.d_T >= 0 and result.defects.d_T_star >= 0


def test_unique_representation_check():
    e = np.eye(3)
    verdict = unique_representation_check([e[:, :1], e[:, 1:]], T=np.diag([0.1, 0.2, 0.3]))
    assert verdict.unique
    assert verdict.dimension_sum == verdict.total_dimension == 3
    assert verdict.min_angles["1-2"] == pytest.approx(np.pi / 2)
    assert verdict.direct_sum_residual < 1e-12

    verdict = unique_representation_check([e[:, :1], e[:, :2]])
    assert not verdict.unique
    assert verdict.dimension_sum == 2
    assert verdict.direct_sum_residual is None


#-----------------------------------------------------------------------
def test_c0_similarity_from_eigenvectors():
    P = np.array([[1.0, 0.5], [0.0, 1.0]])
    T = P @ np.diag([0.3, -0.4]) @ np.linalg.inv(P)
    thetas = [BlaschkeProduct([0.3]), BlaschkeProduct([-0.4])]
    result = assemble_c0_similarity(thetas, [P[:, :1], P[:, 1:]], T)
    assert result.assembly.accepted
    assert result.annihilation_residual < 1e-10
    assert result.N == 2
    assert result.M == 2
    np.testing.assert_allclose(result.lower_bounds, [1.0, np.sqrt(1.25)])
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(result.assembly.R.matrix).real), [-0.4, 0.3], atol=1e-10)


def test_c0_similarity_needs_spanning_intertwiners():
    T = np.diag([0.3, -0.4])
    with pytest.raises(RankDeficientError):
        assemble_c0_similarity([BlaschkeProduct([0.3])], [np.array([[1.0], [0.0]])], T)
    with pytest.raises(InputError):
        assemble_c0_similarity([BlaschkeProduct([0.3])], [], T)


def test_c0_similarity_rejects_intertwiners_that_are_not_bounded_below():
    T = np.diag([0.3, 0.3, -0.4])
    thetas = [BlaschkeProduct([0.3, -0.4]), BlaschkeProduct([0.3])]
    # rank one on a two-dimensional model space
    flat = np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(LowerBoundViolationError):
        assemble_c0_similarity(thetas, [flat, np.array([[0.0], [1.0], [0.0]])], T)
    with pytest.raises(InputError):
        assemble_c0_similarity(thetas, [np.eye(3)[:, :1], np.eye(3)[:, 1:2]], T)
