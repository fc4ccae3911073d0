import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from MSL_Utils.Exceptions import (
    AnnihilationError,
    CarlesonViolationError,
    InputError,
    NotAContractionError,
    PreconditionError,
)
from Operator_Theory.Disc_Algebra import BlaschkeProduct
from Operator_Theory.Model_Space import compressed_shift, model_space
from Operator_Theory.Operator_Lab import (
    apply_blaschke,
    certify_similarity,
    defects,
    eigenspace_dims,
    find_similarity,
    intertwiner_space,
    jordan_model,
    multiplicity,
    numerical_rank,
    similar_to_finite_defect,
    takahashi_lift,
    triangulate,
)

from conftest import disc_points, separated_zeros


def jordan(lam, size):
    return lam * np.eye(size) + np.diag(np.ones(size - 1), 1)


def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


# mildly non-normal change of basis
S = np.array([[1.0, 0.3, 0.0], [0.0, 1.0, 0.2], [0.1, 0.0, 1.0]])


#-----------------------------------------------------------------------
def test_numerical_rank():
    assert numerical_rank(np.diag([1.0, 1e-12, 0.0])) == 1
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.zeros((0, 0))) == 0


def test_defects_of_small_contractions():
    assert defects(rotation(0.7)).is_unitary
    report = defects(np.diag([0.5, 1.0]))
    assert (report.d_T, report.d_T_star) == (1, 1)
    report = defects(jordan(0.0, 3))
    assert (report.d_T, report.d_T_star) == (1, 1)
    with pytest.raises(NotAContractionError):
        defects(2 * np.eye(2))


def test_eigenspace_dims():
    dims = eigenspace_dims(np.diag([0.2, 0.2, 0.5]), [0.2, 0.5, 0.7])
    assert dims == {0.2 + 0j: 2, 0.5 + 0j: 1, 0.7 + 0j: 0}


#-----------------------------------------------------------------------
def krylov_is_cyclic(T, seed=3):
    v = np.random.default_rng(seed).standard_normal(T.shape[0])
    K = np.column_stack([np.linalg.matrix_power(T, j) @ v for j in range(T.shape[0])])
    return numerical_rank(K) == T.shape[0]


@pytest.mark.parametrize("T, mu", [
    (jordan(0.0, 3), 1),
    (jordan(0.3, 3), 1),
    (np.diag([0.1, 0.2, 0.3]), 1),
    (np.diag([0.2, 0.2, 0.5]), 2),
    (np.diag([0.0, 0.0, 0.0]), 3),
    (np.block([[jordan(0.0, 2), np.zeros((2, 1))], [np.zeros((1, 3))]]), 2),
])
def test_multiplicity_matches_cyclicity(T, mu):
    assert multiplicity(T).mu == mu
    assert krylov_is_cyclic(T) == (mu == 1)


#-----------------------------------------------------------------------
def test_apply_blaschke_on_diagonal():
    B = BlaschkeProduct([0.3])
    result = apply_blaschke(np.diag([0.3, -0.2]), B).matrix
    np.testing.assert_allclose(np.diag(result), [0.0, B(-0.2)], atol=1e-14)
    with pytest.raises(NotAContractionError):
        apply_blaschke(2 * np.eye(2), B)


def test_intertwiners_and_similarity_search():
    D = np.diag([0.1, 0.2, -0.3])
    assert intertwiner_space(D, D).dimension == 3
    T = S @ D @ np.linalg.inv(S)
    certificate = find_similarity(D, T, seed=7)
    assert certificate is not None and certificate.accepted
    np.testing.assert_allclose(certificate.X @ D, T @ certificate.X, atol=1e-10)

    assert find_similarity(np.diag([0.1, 0.2]), np.diag([0.1, 0.3])) is None
    assert find_similarity(jordan(0.2, 2) * 0.5, 0.1 * np.eye(2)) is None


def test_certify_similarity_checks_shapes():
    with pytest.raises(InputError):
        certify_similarity(np.eye(2), np.eye(3), np.eye(3))


#-----------------------------------------------------------------------
def test_jordan_model_of_diagonalizable_operator():
    T = S @ np.diag([0.3, 0.3, -0.4]) @ np.linalg.inv(S)
    result = jordan_model(T, [0.3, -0.4])
    assert result.eigenspace_dims == {0.3 + 0j: 2, -0.4 + 0j: 1}
    assert result.zero_sets == [[0.3 + 0j, -0.4 + 0j], [0.3 + 0j]]
    assert result.model.shape == (3, 3)
    assert result.certificate.accepted
    assert result.annihilation_residual < 1e-10
    assert np.linalg.norm(result.intertwiner @ T - result.model @ result.intertwiner, 2) < 1e-8


def test_jordan_model_needs_annihilation():
    with pytest.raises(AnnihilationError):
        jordan_model(np.diag([0.3, 0.5]), [0.3])
    with pytest.raises(CarlesonViolationError):
        jordan_model(np.diag([0.3, 0.3]), [0.3, 0.3 + 1e-10])


def conjugated_diagonal(eigenvalues, seed):
    """Q (I + E/10) diag(eigenvalues) (I + E/10)^-1 Q* with ||E|| = 1 and Q unitary."""
    rng = np.random.default_rng(seed)
    d = len(eigenvalues)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    E = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    P = Q @ (np.eye(d) + 0.1 * E / np.linalg.norm(E, 2))
    return P @ np.diag(eigenvalues) @ np.linalg.inv(P)


@settings(max_examples=100, deadline=None)
@given(separated_zeros(min_size=1, max_size=4, max_radius=0.7, gap=0.1),
       st.lists(st.integers(1, 3), min_size=4, max_size=4),
       st.integers(0, 2 ** 32 - 1))
def test_jordan_model_recovers_constructed_multiplicities(zeros, counts, seed):
    counts = counts[:len(zeros)]
    T = conjugated_diagonal(np.repeat(zeros, counts), seed)
    result = jordan_model(T, zeros)

    assert result.eigenspace_dims == {complex(lam): k for lam, k in zip(zeros, counts)}
    assert len(result.zero_sets) == max(counts)
    for n, block in enumerate(result.blocks, start=1):
        assert block.degree == sum(1 for k in counts if k >= n)
        assert set(block.zeros) == {complex(lam) for lam, k in zip(zeros, counts) if k >= n}
    assert result.model.shape == T.shape
    assert result.certificate.residual <= 1e-8
    assert result.certificate.sigma_min >= 1e-8


#-----------------------------------------------------------------------
def test_triangulate_upper_triangular():
    T = np.array([[0.3, 0.2], [0.0, -0.4]])
    tri = triangulate(T, [BlaschkeProduct([0.3]), BlaschkeProduct([-0.4])])
    assert tri.block_sizes == [1, 1]
    np.testing.assert_allclose(tri.reassemble(), T, atol=1e-12)
    assert tri.lower_residual < 1e-10
    assert max(tri.residuals) < 1e-10
    assert abs(tri.block(0, 0)[0, 0] - 0.3) < 1e-12


def test_triangulate_rejects_non_annihilating_factors():
    with pytest.raises(AnnihilationError):
        triangulate(np.diag([0.3, 0.5]), [BlaschkeProduct([0.3])])
    with pytest.raises(InputError):
        triangulate(np.diag([0.3, 0.5]), [])


def ring(count, radius, turn=0.0):
    return [radius * np.exp(2j * np.pi * (k + turn) / count) for k in range(count)]


@pytest.mark.parametrize("first, second", [
    (ring(10, 0.5)[0::2], ring(10, 0.5)[1::2]),
    (ring(3, 0.4), ring(4, 0.6, turn=0.5)),
    ([0.0], [0.5, -0.5j]),
])
def test_triangulate_compressed_shift_along_a_factorization(first, second):
    B1, B2 = BlaschkeProduct(first), BlaschkeProduct(second)
    T = compressed_shift(model_space(BlaschkeProduct(first + second))).matrix
    tri = triangulate(T, [B1, B2])
    assert tri.block_sizes == [B1.degree, B2.degree]
    assert max(tri.residuals) <= 1e-8
    assert tri.lower_residual <= 1e-8
    np.testing.assert_allclose(tri.reassemble(), T, atol=1e-10)


def test_lift_solves_the_corner_equation():
    lift = takahashi_lift([[0.1]], [[0.3]], [[0.2]], [[1.0]], [[0.2]])
    np.testing.assert_allclose(lift.Z, [[3.0]], atol=1e-12)
    assert lift.method == "sylvester"
    with pytest.raises(PreconditionError):
        takahashi_lift([[0.1]], [[1.0]], [[0.2]], [[1.0]], [[0.5]])


#-----------------------------------------------------------------------
def test_finite_defect_similarity_of_small_triangular_operator():
    T = np.array([[0.3, 0.2], [0.0, -0.4]])
    result = similar_to_finite_defect(T, [BlaschkeProduct([0.3]), BlaschkeProduct([-0.4])])
    assert result.block_sizes == [1, 1]
    assert result.certificate.accepted
    assert (result.defects.d_T, result.defects.d_T_star) == (2, 2)
    assert "lift_block_1" in result.residuals


@settings(max_examples=20, deadline=None)
@given(separated_zeros(min_size=3, max_size=3, max_radius=0.45, gap=0.05),
       st.lists(disc_points(0.15), min_size=3, max_size=3))
def test_finite_defect_pipeline_on_triangular_operators(zeros, upper):
    T = np.diag(zeros).astype(complex)
    T[0, 1], T[0, 2], T[1, 2] = upper
    result = similar_to_finite_defect(T, [BlaschkeProduct([lam]) for lam in zeros])
    assert result.block_sizes == [1, 1, 1]
    assert result.certificate.accepted
    assert multiplicity(T).mu == 1
    eigenvalues = np.linalg.eigvals(result.R.matrix)
    for lam in zeros:
        assert np.min(np.abs(eigenvalues - lam)) < 1e-6


@settings(max_examples=30, deadline=None)
@given(separated_zeros(min_size=4, max_size=4, max_radius=0.45, gap=0.1),
       st.lists(disc_points(0.15), min_size=6, max_size=6))
def test_finite_defect_pipeline_on_coupled_blocks(zeros, upper):
    T = np.diag(zeros).astype(complex)
    T[0, 1], T[2, 3] = upper[:2]
    T[:2, 2:] = np.reshape(upper[2:], (2, 2))
    factors = [BlaschkeProduct(zeros[:2]), BlaschkeProduct(zeros[2:])]
    result = similar_to_finite_defect(T, factors)
    assert result.block_sizes == [2, 2]
    assert result.certificate.accepted
    assert result.R.dimension == 4
    assert result.R.norm <= 1 + 1e-8
    eigenvalues = np.linalg.eigvals(result.R.matrix)
    for lam in zeros:
        assert np.min(np.abs(eigenvalues - lam)) < 1e-6


def test_finite_defect_pipeline_with_repeated_eigenvalue():
    T = np.array([
        [0.3, 0.0, 0.1, 0.2],
        [0.0, 0.3, 0.0, 0.1],
        [0.0, 0.0, -0.4, 0.15],
        [0.0, 0.0, 0.0, 0.2j],
    ])
    result = similar_to_finite_defect(T, [BlaschkeProduct([0.3]), BlaschkeProduct([-0.4, 0.2j])])
    assert result.block_sizes == [2, 2]
    assert result.certificate.accepted
    assert result.R.norm <= 1 + 1e-8
    assert max(result.residuals.values()) <= 1e-6
