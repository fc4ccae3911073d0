import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from MSL_Utils.Exceptions import (
    ConfigError,
    DuplicateZeroError,
    EvaluationSingularityError,
    InputError,
    ZeroModulusError,
)
from Operator_Theory.Disc_Algebra import (
    BlaschkeProduct,
    BoundaryGrid,
    ChiFunction,
    ConstantFunction,
    SingularInnerExp,
    carleson_constant,
    eval_blaschke_factor,
    halton_disc_points,
    inner_certificate,
    inner_outer_factorize,
    outer_from_log_modulus,
    pseudo_hyperbolic,
    singular_exp_product,
)

from conftest import blaschke_products, disc_points, separated_zeros


def carleson_oracle(zeros):
    """inf_n prod_{k != n} |l_k - l_n| / |1 - conj(l_k) l_n|, written out directly."""
    values = []
    for n, a in enumerate(zeros):
        p = 1.0
        for k, b in enumerate(zeros):
            if k != n:
                p *= abs(b - a) / abs(1 - np.conj(b) * a)
        values.append(p)
    return min(values)


#-----------------------------------------------------------------------
def test_grid_validation_and_singular_mask():
    with pytest.raises(ConfigError):
        BoundaryGrid(100)
    grid = BoundaryGrid(64)
    mask = grid.singular_mask([1.0])
    assert mask.sum() == 3
    assert mask[0] and mask[1] and mask[63]
    assert grid.cell_of(-1.0) == 32


def test_blaschke_factor_basics():
    assert eval_blaschke_factor(0.0, 0.3 + 0.1j) == pytest.approx(0.3 + 0.1j)
    assert abs(eval_blaschke_factor(0.5j, 0.5j)) < 1e-15
    assert eval_blaschke_factor(0.5, 0.0) == pytest.approx(0.5)
    with pytest.raises(InputError):
        eval_blaschke_factor(1.0, 0.0)


def test_duplicate_zero_is_rejected():
    with pytest.raises(DuplicateZeroError):
        BlaschkeProduct([0.5, 0.5])
    assert BlaschkeProduct([0.5, 0.5], simple=False).degree == 2


def test_evaluation_outside_disc_is_rejected():
    with pytest.raises(InputError):
        ChiFunction()(1.5)


@settings(max_examples=40, deadline=None)
@given(blaschke_products(max_size=5))
def test_blaschke_is_inner(B):
    grid = BoundaryGrid(256)
    assert inner_certificate(B, grid) < 1e-10
    assert np.all(np.abs(B(halton_disc_points(50))) <= 1 + 1e-12)
    assert np.all(np.abs(B(np.array(B.zeros))) < 1e-12)


@settings(max_examples=40, deadline=None)
@given(blaschke_products(max_size=3), st.lists(disc_points(0.8), min_size=1, max_size=4))
def test_matrix_calculus_on_diagonal_operators(B, mu):
    T = np.diag(mu)
    np.testing.assert_allclose(np.diag(B.at_matrix(T)), B(np.array(mu)), atol=1e-10)


#-----------------------------------------------------------------------
def test_carleson_small_cases():
    assert carleson_constant([0.3j]) == 1.0
    assert carleson_constant([0.0, 0.5]) == pytest.approx(0.5)
    with pytest.raises(DuplicateZeroError):
        carleson_constant([0.2, 0.2])
    with pytest.raises(InputError):
        carleson_constant([])


@settings(max_examples=100, deadline=None)
@given(separated_zeros(min_size=2, max_size=6))
def test_carleson_equals_pairwise_distance_table(zeros):
    distances = [[pseudo_hyperbolic(a, b) for b in zeros] for a in zeros]
    expected = min(
        math.prod(distances[n][k] for k in range(len(zeros)) if k != n) for n in range(len(zeros))
    )
    assert carleson_constant(zeros) == expected


@settings(max_examples=100, deadline=None)
@given(separated_zeros(min_size=2, max_size=6))
def test_carleson_matches_written_out_formula(zeros):
    # the written-out formula drops the unimodular factor, so only rounding separates the two
    assert carleson_constant(zeros) == pytest.approx(carleson_oracle(zeros), rel=1e-10, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(separated_zeros(min_size=2, max_size=8))
def test_carleson_never_drops_when_a_zero_is_removed(zeros):
    full = carleson_constant(zeros)
    for n in range(len(zeros)):
        assert carleson_constant(zeros[:n] + zeros[n + 1:]) >= full


#-----------------------------------------------------------------------
def test_singular_inner_exp():
    grid = BoundaryGrid(512)
    alpha = SingularInnerExp(1.0)
    values = alpha.boundary_values(grid)
    assert values[0] == 0
    np.testing.assert_allclose(np.abs(values[1:]), 1.0, atol=1e-12)
    assert inner_certificate(alpha, grid) < 1e-12
    with pytest.raises(EvaluationSingularityError):
        alpha(1.0)
    with pytest.raises(InputError):
        SingularInnerExp(0.0)

    z = halton_disc_points(40)
    combined = singular_exp_product(SingularInnerExp(0.5), SingularInnerExp(1.5))
    np.testing.assert_allclose(combined(z), SingularInnerExp(0.5)(z) * SingularInnerExp(1.5)(z), atol=1e-12)


#-----------------------------------------------------------------------
def test_outer_of_constant_modulus():
    grid = BoundaryGrid(256)
    F = outer_from_log_modulus(np.full(grid.size, 2.0), grid)
    assert F.geometric_mean == pytest.approx(2.0)
    np.testing.assert_allclose(F(halton_disc_points(20, 0.8)), 2.0, atol=1e-10)


def test_outer_recovers_zero_free_polynomial(grid):
    g = 1 + 0.5 * ChiFunction()
    F = outer_from_log_modulus(np.abs(g.boundary_values(grid)), grid)
    z = halton_disc_points(30, 0.8)
    np.testing.assert_allclose(F(z), g(z), atol=1e-8)
    np.testing.assert_allclose(np.abs(F.boundary_values(grid)), np.abs(g.boundary_values(grid)), atol=1e-10)
    assert F.geometric_mean == pytest.approx(1.0, abs=1e-10)


def test_piecewise_outer_has_prescribed_modulus():
    from fractions import Fraction
    from Operator_Theory.Arc_Sets import ArcSet

    grid = BoundaryGrid(1024)
    arcs = ArcSet.from_arcs([(Fraction(0), Fraction(1, 4))])
    F = outer_from_log_modulus(grid=grid, pieces=[(arcs, 3.0)], default=0.5)
    modulus = np.abs(F.boundary_values(grid))
    inside = arcs.to_mask(grid.size)
    np.testing.assert_allclose(modulus[inside], 3.0, rtol=1e-10)
    np.testing.assert_allclose(modulus[~inside], 0.5, rtol=1e-10)
    # geometric mean = 3^(1/4) 0.5^(3/4)
    assert F.geometric_mean == pytest.approx(3 ** 0.25 * 0.5 ** 0.75, rel=1e-10)
    assert abs(F(0.0)) == pytest.approx(F.geometric_mean, rel=1e-10)


def test_outer_is_zero_free_inside(grid):
    from fractions import Fraction
    from Operator_Theory.Arc_Sets import ArcSet

    arcs = ArcSet.from_arcs([(Fraction(1, 8), Fraction(3, 8)), (Fraction(5, 8), Fraction(2, 3))])
    F = outer_from_log_modulus(grid=grid, pieces=[(arcs, 3.0)], default=0.5)
    values = F(halton_disc_points(1000))
    assert np.all(np.isfinite(values))
    # log|F| is a Poisson average of log w, so |F| stays between the extreme moduli
    assert np.min(np.abs(values)) >= 0.5 * (1 - 1e-9)
    assert np.max(np.abs(values)) <= 3.0 * (1 + 1e-9)


def test_zero_modulus_is_rejected():
    with pytest.raises(ZeroModulusError):
        outer_from_log_modulus(np.zeros(64))


def test_inner_outer_factorization(grid):
    B = BlaschkeProduct([0.4, -0.2 + 0.3j])
    g = 1 + 0.5 * ChiFunction()
    f = B * g
    factors = inner_outer_factorize(f, grid)
    assert factors.inner_certificate(grid) < 1e-8
    z = halton_disc_points(20, 0.8)
    np.testing.assert_allclose(factors.outer(z), g(z), atol=1e-8)
    np.testing.assert_allclose(factors.inner(z), B(z), atol=1e-8)


def test_factorization_of_scaled_blaschke_factor(grid):
    factors = inner_outer_factorize(2 * BlaschkeProduct([0.5]), grid)
    z = halton_disc_points(50, 0.8)
    np.testing.assert_allclose(factors.outer(z), 2.0, atol=1e-10)
    np.testing.assert_allclose(factors.inner(z), eval_blaschke_factor(0.5, z), atol=1e-10)
    assert factors.outer.geometric_mean == pytest.approx(2.0)
    assert factors.clamped_cells == []


def test_arithmetic_builds_expected_values():
    z = np.array([0.1, 0.2j, -0.5])
    f = 2 * ChiFunction() + 1
    np.testing.assert_allclose(f(z), 2 * z + 1)
    np.testing.assert_allclose((ChiFunction() / ConstantFunction(2.0))(z), z / 2)
    np.testing.assert_allclose((-ChiFunction())(z), -z)


def test_halton_points_are_deterministic():
    a = halton_disc_points(100, 0.9)
    b = halton_disc_points(100, 0.9)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (100,)
    assert np.max(np.abs(a)) <= 0.9
    assert np.min(np.abs(a)) > 0
