#-----------------------------------------------------------------------
# Purpose: Shared fixtures and hypothesis strategies
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-10
#-----------------------------------------------------------------------

import numpy as np
import pytest
from hypothesis import strategies as st

from Operator_Theory.Disc_Algebra import BlaschkeProduct, BoundaryGrid
from Operator_Theory.Decomposition import worked_inner_pair


@pytest.fixture(autouse=True)
def isolated_usr_dir(tmp_path, monkeypatch):
    """Every test writes logs and results into its own usr directory."""
    monkeypatch.setenv("MSL_USR_DIR", str(tmp_path / "usr"))
    monkeypatch.delenv("MSL_DEFAULT_GRID", raising=False)
    return tmp_path / "usr"


@pytest.fixture(scope="session")
def grid():
    return BoundaryGrid(1024)


@pytest.fixture(scope="session")
def fine_grid():
    return BoundaryGrid(4096)


@pytest.fixture(scope="session")
def worked_pair(grid):
    return worked_inner_pair(grid)


def disc_points(max_radius=0.9):
    """Complex numbers with modulus at most max_radius."""
    return st.builds(
        lambda r, t: complex(r * np.cos(2 * np.pi * t), r * np.sin(2 * np.pi * t)),
        st.floats(0.0, max_radius),
        st.floats(0.0, 1.0, exclude_max=True),
    )


def separated_zeros(min_size=1, max_size=4, max_radius=0.9, gap=1e-2):
    """Lists of zeros inside the disc that are at least `gap` apart."""

    def far_apart(zeros):
        return all(abs(a - b) >= gap for i, a in enumerate(zeros) for b in zeros[i + 1:])

    return st.lists(disc_points(max_radius), min_size=min_size, max_size=max_size).filter(far_apart)


def blaschke_products(min_size=1, max_size=4, max_radius=0.9):
    return separated_zeros(min_size, max_size, max_radius).map(BlaschkeProduct)
