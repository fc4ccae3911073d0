#-----------------------------------------------------------------------
# Purpose: Invertible matrix Psi turning a bounded column with a boundary
#          lower bound into a column of inner functions
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-17
#-----------------------------------------------------------------------

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from MSL_Utils.Exceptions import (
    BoundViolationError,
    DegenerateColumnError,
    InputError,
    ResolutionError,
)
from Operator_Theory.Arc_Sets import ArcSet, refine_disjoint
from Operator_Theory.Disc_Algebra import (
    TOL_INNER,
    BoundaryGrid,
    DiscFunction,
    OuterFunction,
    ProductFunction,
    SumFunction,
    halton_disc_points,
    inner_outer_factorize,
    outer_from_log_modulus,
)
from Operator_Theory.Model_Space import MatrixFunction


BOUND_TOL = 1e-6


#-----------------------------------------------------------------------
@dataclass
class ColumnData:
    """A column phi_1..phi_N with its grid samples and c^2 = min sum |phi_n|^2."""

    functions: Tuple[DiscFunction, ...]
    grid: BoundaryGrid
    samples: np.ndarray
    sup_norms: np.ndarray
    c_squared: float
    exclude_cells: int = 1

    @property
    def size(self) -> int:
        return len(self.functions)

    @property
    def singular_mask(self) -> np.ndarray:
        points = []
        for f in self.functions:
            points.extend(p for p in f.singular_points() if p not in points)
        return self.grid.singular_mask(points, self.exclude_cells)


def column_data(functions: Sequence[DiscFunction], grid: Optional[BoundaryGrid] = None,
                tol: float = TOL_INNER, exclude_cells: int = 1) -> ColumnData:
    functions = tuple(functions)
    if not functions:
        raise InputError("Column must have at least one entry")
    grid = grid or BoundaryGrid()
    samples = np.array([f.boundary_values(grid) for f in functions])
    sup_norms = np.max(np.abs(samples), axis=1)
    for n, sup in enumerate(sup_norms):
        if sup > 1 + tol:
            raise InputError(f"Column entry {n + 1} has grid sup {sup:.6g} > 1")
    c_squared = float(np.min(np.sum(np.abs(samples) ** 2, axis=0)))
    if c_squared <= 0:
        raise InputError("Column has no positive boundary lower bound (c^2 = 0)")
    return ColumnData(functions, grid, samples, sup_norms, c_squared, exclude_cells)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class PsiParameters:
    deltas: Tuple[float, ...]
    delta: float
    a: float
    b: float

    @property
    def kappa_bound(self) -> float:
        N = len(self.deltas)
        return self.a ** (N - 1) - math.factorial(N) * self.b

    @property
    def row_bound(self) -> float:
        N = len(self.deltas)
        return self.delta - self.a - (N - 2) * self.b

    def check(self, col: ColumnData) -> Dict[str, bool]:
        """The five strict inequalities the construction needs."""
        N = len(self.deltas)
        return {
            "positive": min(self.deltas) > 0 and self.a > 0 and self.b > 0,
            "delta_below_sup": all(d < s for d, s in zip(self.deltas, col.sup_norms)),
            "delta_energy": sum(d * d for d in self.deltas) < col.c_squared,
            "kappa_margin": self.a ** (N - 1) > math.factorial(N) * self.b,
            "row_margin": self.delta > self.a + (N - 2) * self.b,
        }


def choose_parameters(col: ColumnData) -> PsiParameters:
    """
    delta_n = min(0.9 sup|phi_n|, c/sqrt(2N)), a = delta/2 and
    b = min(a^(N-1)/(2 N!), delta/(4 max(1, N-2)), delta/(2(N-1))),
    the last term only for N > 1.
    """
    N = col.size
    c = math.sqrt(col.c_squared)
    deltas = []
    for n, sup in enumerate(col.sup_norms):
        if sup <= TOL_INNER:
            raise DegenerateColumnError(f"Column entry {n + 1} vanishes on the grid; normalize the column first")
        deltas.append(float(min(0.9 * sup, c / math.sqrt(2 * N))))
    delta = min(deltas)
    a = delta / 2
    candidates = [a ** (N - 1) / (2 * math.factorial(N)), delta / (4 * max(1, N - 2))]
    if N > 1:
        candidates.append(delta / (2 * (N - 1)))
    return PsiParameters(tuple(deltas), delta, a, min(candidates))
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def _threshold_masks(col: ColumnData, params: PsiParameters) -> np.ndarray:
    return np.abs(col.samples) >= np.asarray(params.deltas)[:, None]


def build_tau_sets(col: ColumnData, params: PsiParameters) -> List[ArcSet]:
    """tau_n = {|phi_n| >= delta_n}, grid-thresholded and turned into exact arcs."""
    taus = []
    for n, mask in enumerate(_threshold_masks(col, params)):
        if not np.any(mask):
            raise ResolutionError(
                f"Threshold set of entry {n + 1} captures no grid cell at G = {col.grid.size}"
            )
        taus.append(ArcSet.from_cells(mask, col.grid.size))
    return taus


def level_crossing_cells(col: ColumnData, params: PsiParameters) -> int:
    """Cells next to a threshold crossing, counted cyclically over all entries."""
    masks = _threshold_masks(col, params)
    return int(np.sum(masks != np.roll(masks, -1, axis=1)))
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class PsiMatrix:
    params: PsiParameters
    column: ColumnData
    tau: List[ArcSet]
    sigma: List[ArcSet]
    kappa: List[List[OuterFunction]]
    eta: List[OuterFunction]
    theta: List[DiscFunction]
    matrix: MatrixFunction
    det_lower_bound: float = 0.0
    image_residual: float = 0.0
    sigma_cells: List[int] = field(default_factory=list)
    level_crossings: int = 0

    @property
    def size(self) -> int:
        return self.column.size

    def boundary_matrix(self, grid: BoundaryGrid) -> np.ndarray:
        return self.matrix.boundary_matrix(grid)

    def kappa_matrix(self, z) -> np.ndarray:
        """[kappa_nk(z)], shape z.shape + (N, N); shared entries are evaluated once."""
        z = np.asarray(z, dtype=complex)
        values: Dict[int, np.ndarray] = {}
        out = np.empty(z.shape + (self.size, self.size), dtype=complex)
        for n, row in enumerate(self.kappa):
            for k, f in enumerate(row):
                if id(f) not in values:
                    values[id(f)] = f(z)
                out[..., n, k] = values[id(f)]
        return out


def build_psi(col: ColumnData, params: Optional[PsiParameters] = None) -> PsiMatrix:
    params = params or choose_parameters(col)
    grid = col.grid
    N = col.size
    tau = build_tau_sets(col, params)
    sigma = refine_disjoint(tau)

    # kappa_nk for n != k only depends on k
    off_diagonal = [
        outer_from_log_modulus(grid=grid, pieces=[(sigma[k], 1.0)], default=params.b) for k in range(N)
    ]
    kappa = []
    for n in range(N):
        row = list(off_diagonal)
        row[n] = outer_from_log_modulus(grid=grid, pieces=[(sigma[n], 1.0)], default=params.a)
        kappa.append(row)

    eta, theta = [], []
    for n in range(N):
        row_sum = SumFunction([ProductFunction([kappa[n][k], col.functions[k]]) for k in range(N)])
        factorization = inner_outer_factorize(row_sum, grid)
        eta.append(factorization.outer)
        theta.append(factorization.inner)

    entries = [[ProductFunction([kappa[n][k]], [eta[n]]) for k in range(N)] for n in range(N)]
    psi = PsiMatrix(
        params=params, column=col, tau=tau, sigma=sigma, kappa=kappa, eta=eta, theta=theta,
        matrix=MatrixFunction(entries),
        sigma_cells=[int(np.sum(s.to_mask(grid.size))) for s in sigma],
        level_crossings=level_crossing_cells(col, params),
    )

    values = psi.boundary_matrix(grid)
    psi.det_lower_bound = float(np.min(np.abs(np.linalg.det(values))))
    image = np.einsum("gnk,kg->ng", values, col.samples)
    keep = ~col.singular_mask
    psi.image_residual = float(np.max(np.abs(np.abs(image[:, keep]) - 1)))

    if psi.level_crossings:
        logging.info(f"build_psi: {psi.level_crossings} grid cells sit next to a threshold crossing")
    if psi.det_lower_bound <= 0:
        logging.warning("build_psi: grid lower bound on |det Psi| is not positive")
    return psi
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class KappaBoundReport:
    kappa_min: float
    kappa_bound: float
    kappa_point: complex
    row_mins: List[float]
    row_bound: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (self.kappa_min >= self.kappa_bound - self.tolerance
                and all(m >= self.row_bound - self.tolerance for m in self.row_mins))


def verify_kappa_bounds(psi: PsiMatrix, params: Optional[PsiParameters] = None,
                        points: Optional[np.ndarray] = None, count: int = 500,
                        radius: float = 0.95, tol: float = BOUND_TOL) -> KappaBoundReport:
    """
    |det kappa(z)| >= a^(N-1) - N! b at interior points and
    |sum_k kappa_nk phi_k| >= delta - a - (N-2) b on the grid.
    """
    params = params or psi.params
    if points is None:
        points = halton_disc_points(count, radius)
    points = np.asarray(points, dtype=complex)

    det_values = np.abs(np.linalg.det(psi.kappa_matrix(points)))
    worst = int(np.argmin(det_values))
    report = KappaBoundReport(
        kappa_min=float(det_values[worst]),
        kappa_bound=params.kappa_bound,
        kappa_point=complex(points[worst]),
        row_mins=[],
        row_bound=params.row_bound,
        tolerance=tol,
    )
    if report.kappa_min < report.kappa_bound - tol:
        raise BoundViolationError(
            f"|kappa| = {report.kappa_min:.6g} below {report.kappa_bound:.6g} at z = {report.kappa_point}",
            point=report.kappa_point,
        )

    grid = psi.column.grid
    keep = ~psi.column.singular_mask
    kappa_b = np.array([[f.boundary_values(grid) for f in row] for row in psi.kappa])
    rows = np.abs(np.einsum("nkg,kg->ng", kappa_b, psi.column.samples))
    for n in range(psi.size):
        masked = np.where(keep, rows[n], np.inf)
        j = int(np.argmin(masked))
        report.row_mins.append(float(masked[j]))
        if masked[j] < report.row_bound - tol:
            raise BoundViolationError(
                f"Row {n + 1}: |sum kappa phi| = {masked[j]:.6g} below {report.row_bound:.6g}",
                point=complex(grid.points[j]),
            )
    return report
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class NormalizedColumn:
    pre_matrix: np.ndarray
    functions: Tuple[DiscFunction, ...]
    nonzero: int


def normalize_column(functions: Sequence[DiscFunction], grid: Optional[BoundaryGrid] = None,
                     tol: float = TOL_INNER) -> NormalizedColumn:
    """
    pre = (I + A2) A1: A1 moves the nonvanishing entries to the front in
    their original order, A2 copies the first entry into the remaining slots.
    """
    functions = tuple(functions)
    grid = grid or BoundaryGrid()
    N = len(functions)
    vanishing = [float(np.max(np.abs(f.boundary_values(grid)))) <= tol for f in functions]
    order = [n for n in range(N) if not vanishing[n]] + [n for n in range(N) if vanishing[n]]
    M = N - sum(vanishing)
    if M == 0:
        raise DegenerateColumnError("Every entry of the column vanishes on the grid")

    A1 = np.zeros((N, N))
    A1[np.arange(N), order] = 1.0
    A2 = np.zeros((N, N))
    A2[M:, 0] = 1.0
    pre = (np.eye(N) + A2) @ A1

    reduced = tuple(functions[order[i]] if i < M else functions[order[0]] for i in range(N))
    return NormalizedColumn(pre_matrix=pre, functions=reduced, nonzero=M)


@dataclass
class NormalizedPsi:
    psi: PsiMatrix
    pre_matrix: np.ndarray
    matrix: MatrixFunction

    @property
    def theta(self):
        return self.psi.theta


def build_psi_normalized(functions: Sequence[DiscFunction], grid: Optional[BoundaryGrid] = None,
                         tol: float = TOL_INNER, exclude_cells: int = 1) -> NormalizedPsi:
    """Psi (I + A2) A1 for a column that may contain vanishing entries."""
    grid = grid or BoundaryGrid()
    normalized = normalize_column(functions, grid, tol)
    psi = build_psi(column_data(normalized.functions, grid, tol, exclude_cells))
    pre = normalized.pre_matrix
    N = pre.shape[0]
    if np.array_equal(pre, np.eye(N)):
        return NormalizedPsi(psi, pre, psi.matrix)

    entries = []
    for n in range(N):
        row = []
        for k in range(N):
            used = [i for i in range(N) if pre[i, k] != 0]
            row.append(SumFunction([psi.matrix.entries[n][i] for i in used], [pre[i, k] for i in used]))
        entries.append(row)
    return NormalizedPsi(psi, pre, MatrixFunction(entries))
#-----------------------------------------------------------------------


if __name__ == "__main__":
    from Operator_Theory.Disc_Algebra import ChiFunction, ConstantFunction

    grid = BoundaryGrid(1024)
    column = column_data([ConstantFunction(2 ** -0.5), -(2 ** -0.5) * ChiFunction()], grid)
    params = choose_parameters(column)
    print("[INFO] parameters:", params)
    psi = build_psi(column, params)
    print("[INFO] sigma:", psi.sigma)
    print("[INFO] min |det Psi| on grid =", psi.det_lower_bound)
    print("[INFO] inner image residual =", psi.image_residual)
    print("[INFO] kappa bounds pass:", verify_kappa_bounds(psi, count=100).passed)
