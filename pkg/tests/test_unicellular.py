import numpy as np
import pytest

from MSL_Utils.Exceptions import InputError, UnsupportedEntryError
from Operator_Theory.Disc_Algebra import BlaschkeProduct, BoundaryGrid, SingularInnerExp
from Operator_Theory.Model_Space import diagonal_theta, example_theta
from Operator_Theory.Unicellular import (
    adjugate_data,
    brute_force_quasisimilar,
    common_zeros,
    corona_infimum_scan,
    corona_path,
    demo_unicellular,
    quasisimilarity_criterion,
)


@pytest.fixture(scope="module")
def demo_report():
    return demo_unicellular(1.0, 1.0, depth=20, grid=BoundaryGrid(1024))


#-----------------------------------------------------------------------
def test_demo_checks_pass(demo_report):
    assert set(demo_report.checks) == {"boundary_isometry", "determinant", "alpha_product", "corona_decay"}
    for name, check in demo_report.checks.items():
        assert check.passed, name


def test_demo_adjugate_decays_along_the_radius(demo_report):
    scan = demo_report.scan
    assert scan.points.size == 20
    assert scan.decays_below_threshold
    assert scan.running_infimum[-1] < 1e-3
    assert np.all(np.diff(scan.running_infimum) <= 0)
    assert len(scan.rows()) == 20


def test_demo_narrative_names_every_check(demo_report):
    checks = [entry["check"] for entry in demo_report.narrative]
    assert checks[:4] == ["boundary_isometry", "determinant", "alpha_product", "corona_decay"]
    assert "gcd_argument" in checks
    assert all(entry["evidence"] for entry in demo_report.narrative)


def test_blaschke_example_keeps_a_corona_floor():
    theta = example_theta(BlaschkeProduct([0.5j]), BlaschkeProduct([-0.3]))
    scan = corona_infimum_scan(theta, depth=20)
    assert not scan.decays_below_threshold
    assert scan.running_infimum[-1] > 0.4


def test_corona_path_and_validation():
    np.testing.assert_allclose(corona_path(3), [0.5, 0.75, 0.875])
    with pytest.raises(InputError):
        corona_path(0)
    theta = example_theta(BlaschkeProduct([0.5]), BlaschkeProduct([0.2]))
    with pytest.raises(InputError):
        corona_infimum_scan(theta, path=[])


#-----------------------------------------------------------------------
def test_common_zeros_is_a_multiset_intersection():
    assert common_zeros([[0.3, 0.3, 0.5], [0.3, 0.5, 0.5]]) == [0.3, 0.5]
    assert common_zeros([[0.3], [0.3 + 1e-12]]) == [0.3]
    assert common_zeros([[0.3], [0.4]]) == []
    assert common_zeros([]) == []


def test_adjugate_data_of_diagonal_theta():
    theta = diagonal_theta([BlaschkeProduct([0.3]), BlaschkeProduct([0.5])])
    data = adjugate_data(theta)
    assert data[0][1] is None and data[1][0] is None
    assert data[0][0][1] == [0.5]
    assert data[1][1][1] == [0.3]


def test_adjugate_data_rejects_transcendental_entries():
    with pytest.raises(UnsupportedEntryError):
        adjugate_data(example_theta(SingularInnerExp(1.0), SingularInnerExp(1.0)))


@pytest.mark.parametrize("blocks, vartheta, expected", [
    ([[0.3], [0.5]], BlaschkeProduct([0.3, 0.5]), True),
    ([[0.3], [0.3]], BlaschkeProduct([0.3, 0.3], simple=False), False),
])
def test_quasisimilarity_agrees_with_brute_force(grid, blocks, vartheta, expected):
    products = [BlaschkeProduct(zs) for zs in blocks]
    verdict = quasisimilarity_criterion(diagonal_theta(products), vartheta, grid)
    assert verdict.det_matches
    assert verdict.det_residual < 1e-10
    assert verdict.fitted_constant == pytest.approx(1.0)
    assert verdict.verdict is expected
    assert brute_force_quasisimilar(products, vartheta, grid=grid) is expected


def test_planted_common_factor_is_reported(grid):
    products = [BlaschkeProduct([0.3]), BlaschkeProduct([0.3])]
    verdict = quasisimilarity_criterion(diagonal_theta(products), BlaschkeProduct([0.3, 0.3], simple=False), grid)
    assert not verdict.gcd_trivial
    assert verdict.common_zeros == [0.3]


def test_determinant_mismatch_is_detected(grid):
    products = [BlaschkeProduct([0.3]), BlaschkeProduct([0.5])]
    verdict = quasisimilarity_criterion(diagonal_theta(products), BlaschkeProduct([0.3, -0.5]), grid)
    assert not verdict.det_matches
    assert not verdict.verdict
