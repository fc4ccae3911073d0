#-----------------------------------------------------------------------
# Purpose: Shift-type invariant subspaces spanning H(Theta), vector
#          decomposition, and assembly of finite-defect similarities
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-26
#-----------------------------------------------------------------------

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.fft
import scipy.linalg

from MSL_Utils.Exceptions import (
    AnnihilationError,
    IllConditionedError,
    InputError,
    LowerBoundViolationError,
    PreconditionError,
    RankDeficientError,
)
from Operator_Theory.Disc_Algebra import (
    TOL_INNER,
    BlaschkeProduct,
    BoundaryGrid,
    ChiFunction,
    ConstantFunction,
    ProductFunction,
)
from Operator_Theory.Model_Space import (
    MatrixFunction,
    MatrixInnerFunction,
    TruncatedHardySpace,
    compressed_shift,
    model_space,
    project_model,
    project_samples,
    shift_samples,
)
from Operator_Theory.Operator_Lab import (
    RANK_TOL,
    DefectReport,
    OperatorMatrix,
    SimilarityCertificate,
    _kernel_split,
    defects,
)
from Operator_Theory.Psi_Builder import NormalizedPsi, build_psi_normalized


LOWER_BOUND_TOL = 1e-4
INTERTWINING_TOL = 1e-6
MEMBERSHIP_TOL = 1e-8
DET_FLOOR = 1e-10


#-----------------------------------------------------------------------
@dataclass
class InnerPair:
    """
    Inner Theta (N x (N-M)) and *-inner Phi (M x N) with Phi Theta = 0,
    each property certified on the grid.
    """

    theta: MatrixInnerFunction
    phi: MatrixInnerFunction
    grid: BoundaryGrid
    theta_certificate: float
    phi_certificate: float
    annihilation: float
    row_residual: float
    tol: float = TOL_INNER

    @property
    def channels(self) -> int:
        return self.theta.shape[0]

    @property
    def first_row(self):
        return self.phi.entries[0]


def inner_pair(theta: MatrixInnerFunction, phi: MatrixInnerFunction, grid: Optional[BoundaryGrid] = None,
               tol: float = TOL_INNER, exclude_cells: int = 1) -> InnerPair:
    grid = grid or BoundaryGrid()
    N, L = theta.shape
    M, width = phi.shape
    if width != N or L != N - M:
        raise InputError(f"Theta is {N}x{L} and Phi is {M}x{width}; need N x (N-M) and M x N")

    keep = ~grid.singular_mask(theta.singular_points() + phi.singular_points(), exclude_cells)
    product = phi.boundary_matrix(grid) @ theta.boundary_matrix(grid)
    annihilation = float(np.max(np.linalg.norm(product[keep], ord=2, axis=(1, 2))))
    first_row = phi.boundary_matrix(grid)[:, 0, :]
    row_residual = float(np.max(np.abs(np.sum(np.abs(first_row[keep]) ** 2, axis=1) - 1)))

    pair = InnerPair(
        theta=theta, phi=phi, grid=grid,
        theta_certificate=theta.isometry_certificate(grid, exclude_cells),
        phi_certificate=phi.coisometry_certificate(grid, exclude_cells),
        annihilation=annihilation, row_residual=row_residual, tol=tol,
    )
    failed = [name for name, value in (
        ("Theta isometry", pair.theta_certificate),
        ("Phi co-isometry", pair.phi_certificate),
        ("Phi Theta = 0", pair.annihilation),
        ("first row of Phi", pair.row_residual),
    ) if value > tol]
    if failed:
        raise PreconditionError(f"Inner pair is not certified: {', '.join(failed)} exceed {tol:g}")
    return pair


def worked_inner_pair(grid: Optional[BoundaryGrid] = None) -> InnerPair:
    """Theta = [z; 1]/sqrt(2) and Phi = [1, -z]/sqrt(2)."""
    c = 2 ** -0.5
    theta = MatrixInnerFunction([[ProductFunction([ConstantFunction(c), ChiFunction()])], [ConstantFunction(c)]])
    phi = MatrixInnerFunction([[ConstantFunction(c), ProductFunction([ConstantFunction(-c), ChiFunction()])]])
    return inner_pair(theta, phi, grid)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class ShiftContext:
    """Data shared by the subspaces of one build."""

    pair: InnerPair
    psi: NormalizedPsi
    space: TruncatedHardySpace

    @cached_property
    def psi_boundary(self) -> np.ndarray:
        return self.psi.matrix.boundary_matrix(self.space.grid)

    @cached_property
    def det_lower_bound(self) -> float:
        return float(np.min(np.abs(np.linalg.det(self.psi_boundary))))


@dataclass
class ShiftTypeSubspace:
    index: int
    context: ShiftContext
    lower_bound: float = float("nan")
    intertwining_residual: float = float("nan")
    structure_residual: float = float("nan")
    lower_rows: List[float] = field(default_factory=list)

    @property
    def space(self) -> TruncatedHardySpace:
        return self.context.space

    def apply(self, h_samples: np.ndarray) -> np.ndarray:
        """Y_n h = P_H(Psi^T h e_n) on samples, h of shape (..., G)."""
        row = self.context.psi_boundary[:, self.index, :]          # (G, N)
        v = np.swapaxes(row, 0, 1) * np.asarray(h_samples)[..., None, :]
        return project_samples(self.context.pair.theta, self.space.grid, v)

    @cached_property
    def full_columns(self) -> np.ndarray:
        """Y_n z^m for m < K, shape (K, N, G)."""
        G = self.space.grid.size
        powers = np.exp(2j * np.pi * np.outer(np.arange(self.space.degree), np.arange(G)) / G)
        return self.apply(powers)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Window matrix of Y_n, shape (N K, K)."""
        return self.space.flatten(self.space.window(self.full_columns)).T

    @cached_property
    def shifted_image(self) -> np.ndarray:
        """Window of T_Theta Y_n z^m, shape (N K, K)."""
        image = shift_samples(self.context.pair.theta, self.space.grid, self.full_columns)
        return self.space.flatten(self.space.window(image)).T

    @cached_property
    def basis(self) -> np.ndarray:
        return scipy.linalg.orth(self.matrix)


def _shift_matrix(K: int) -> np.ndarray:
    return np.eye(K, k=-1)


def build_shift_subspaces(pair: InnerPair, degree: int, seed: int = 0, test_count: int = 200,
                          tol: float = LOWER_BOUND_TOL, exclude_cells: int = 1) -> List[ShiftTypeSubspace]:
    """
    Y_n h = P_H(Psi^T h e_n) for the Psi built from the first row of Phi.
    Certifies the intertwining on inputs of degree < K-1, the structure of
    Phi Psi^T e_n and ||Y_n h|| >= ||h|| on random polynomials of degree <= K/2.
    """
    grid = pair.grid
    space = TruncatedHardySpace(pair.channels, degree, grid)
    psi = build_psi_normalized(pair.first_row, grid, pair.tol, exclude_cells)
    context = ShiftContext(pair, psi, space)

    keep = ~grid.singular_mask(pair.phi.singular_points(), exclude_cells)
    structure = pair.phi.boundary_matrix(grid) @ np.swapaxes(context.psi_boundary, 1, 2)   # (G, M, N)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(pair.channels)]

    subspaces = []
    for n in range(pair.channels):
        subspace = ShiftTypeSubspace(n, context)
        theta_n = psi.theta[n].boundary_values(grid)
        subspace.structure_residual = float(np.max(np.abs(structure[keep, 0, n] - theta_n[keep])))
        subspace.lower_rows = [float(np.max(np.abs(structure[keep, k, n]))) for k in range(1, structure.shape[1])]

        # columns m and m+1 of the window against the model shift
        gap = subspace.shifted_image[:, :-1] - subspace.matrix[:, 1:]
        subspace.intertwining_residual = float(np.linalg.norm(gap, 2))

        rng = rngs[n]
        top = degree // 2 + 1
        h = rng.standard_normal((test_count, top)) + 1j * rng.standard_normal((test_count, top))
        h_samples = grid.size * scipy.fft.ifft(np.pad(h, ((0, 0), (0, grid.size - top))), axis=-1)
        image = subspace.apply(h_samples)
        ratios = np.linalg.norm(image, axis=(1, 2)) / np.sqrt(grid.size) / np.linalg.norm(h, axis=1)
        subspace.lower_bound = float(np.min(ratios))

        if subspace.lower_bound < 1 - tol:
            raise LowerBoundViolationError(
                f"Subspace {n + 1}: ||Y h|| / ||h|| = {subspace.lower_bound:.6f} < 1 - {tol:g}; "
                f"retry with truncation degree {2 * degree}"
            )
        if subspace.intertwining_residual > INTERTWINING_TOL:
            logging.warning(
                f"build_shift_subspaces: intertwining residual {subspace.intertwining_residual:.2e} "
                f"for subspace {n + 1}"
            )
        subspaces.append(subspace)
    return subspaces
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class DecompositionReport:
    components: List[np.ndarray]
    coefficients: List[np.ndarray]
    residual: float
    method: str
    constructive_residual: float
    lstsq_residual: float
    full_residual: float
    degree: int
    in_model: bool
    membership_residual: float
    table: List[Dict[str, float]] = field(default_factory=list)

    @property
    def component_norms(self) -> List[float]:
        return [float(np.linalg.norm(c)) for c in self.components]


def decompose_vector(x, subspaces: Sequence[ShiftTypeSubspace], rank_tol: float = RANK_TOL) -> DecompositionReport:
    """
    x = x_1 + ... + x_N with x_n in the range of Y_n. The constructive
    route samples (Psi^T)^-1 x on the grid; the fallback is least squares
    over the stacked window matrices. The smaller residual wins.
    """
    if not subspaces:
        raise InputError("decompose_vector needs at least one subspace")
    context = subspaces[0].context
    space = context.space
    x = np.asarray(x, dtype=complex)
    if x.shape != (space.channels, space.degree):
        raise InputError(f"Vector has shape {x.shape}, expected {(space.channels, space.degree)}")
    if context.det_lower_bound < DET_FLOOR:
        raise IllConditionedError(f"min |det Psi| = {context.det_lower_bound:.3e} on the grid")

    scale = max(1.0, float(np.linalg.norm(x)))
    membership = float(np.linalg.norm(project_model(x, context.pair.theta, space) - x))
    in_model = membership <= MEMBERSHIP_TOL * scale
    if not in_model:
        logging.warning(f"decompose_vector: x is {membership:.2e} away from the model space")

    # constructive route
    samples = space.to_samples(x)                                    # (N, G)
    transposed = np.swapaxes(context.psi_boundary, 1, 2)            # (G, N, N)
    w = np.linalg.solve(transposed, samples.T[..., None])[..., 0].T  # (N, G)
    h_constructive = space.window(w)
    parts_constructive = [
        space.window(np.tensordot(h_constructive[n], s.full_columns, axes=1)) for n, s in enumerate(subspaces)
    ]
    constructive = float(np.linalg.norm(x - sum(parts_constructive)))

    # least squares over the window
    stacked = np.hstack([s.matrix for s in subspaces])
    c = np.linalg.lstsq(stacked, space.flatten(x), rcond=rank_tol)[0]
    K = space.degree
    h_lstsq = [c[n * K:(n + 1) * K] for n in range(len(subspaces))]
    parts_lstsq = [space.unflatten(s.matrix @ h) for s, h in zip(subspaces, h_lstsq)]
    lstsq = float(np.linalg.norm(x - sum(parts_lstsq)))

    # full-resolution residual over the whole grid
    full = np.hstack([s.full_columns.reshape(K, -1).T for s in subspaces])
    target = samples.reshape(-1)
    c_full = np.linalg.lstsq(full, target, rcond=rank_tol)[0]
    full_residual = float(np.linalg.norm(full @ c_full - target) / np.sqrt(space.grid.size))

    if constructive <= lstsq:
        method, residual, parts, coeffs = "constructive", constructive, parts_constructive, list(h_constructive)
    else:
        method, residual, parts, coeffs = "lstsq", lstsq, parts_lstsq, h_lstsq
    return DecompositionReport(
        components=parts, coefficients=coeffs, residual=residual, method=method,
        constructive_residual=constructive, lstsq_residual=lstsq, full_residual=full_residual,
        degree=K, in_model=in_model, membership_residual=membership,
    )


def convergence_table(pair: InnerPair, x, degrees: Sequence[int], seed: int = 0,
                      rank_tol: float = RANK_TOL) -> List[Dict[str, float]]:
    """Decomposition residuals for the same x at growing truncation degrees."""
    x = np.asarray(x, dtype=complex)
    rows = []
    for K in degrees:
        if K < x.shape[1]:
            raise InputError(f"Truncation degree {K} is below the degree of x")
        padded = np.pad(x, ((0, 0), (0, K - x.shape[1])))
        report = decompose_vector(padded, build_shift_subspaces(pair, K, seed), rank_tol)
        rows.append({
            "degree": K,
            "residual": report.residual,
            "constructive_residual": report.constructive_residual,
            "lstsq_residual": report.lstsq_residual,
            "full_residual": report.full_residual,
        })
    return rows


def model_basis_vector(theta: MatrixFunction, space: TruncatedHardySpace, index: int = 0,
                       tol: float = 1e-8) -> np.ndarray:
    """Gram-Schmidt over P_H e_j in channel-major order; returns the index-th vector."""
    found: List[np.ndarray] = []
    for j in range(space.dimension):
        unit = np.zeros(space.dimension, dtype=complex)
        unit[j] = 1.0
        v = space.flatten(project_model(space.unflatten(unit), theta, space))
        for q in found:
            v = v - np.vdot(q, v) * q
        norm = float(np.linalg.norm(v))
        if norm > tol:
            found.append(v / norm)
            if len(found) == index + 1:
                return space.unflatten(found[-1])
    raise InputError(f"Truncated model space has fewer than {index + 1} basis vectors")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class AssemblyResult:
    R: OperatorMatrix
    defects: DefectReport
    certificate: SimilarityCertificate
    kernel_dimension: int
    rank: int
    subspace_count: int

    @property
    def accepted(self) -> bool:
        return self.certificate.residual <= INTERTWINING_TOL and self.certificate.sigma_min >= RANK_TOL


def assemble_similarity(Y_blocks: Sequence[np.ndarray], T=None, S_blocks: Optional[Sequence[np.ndarray]] = None,
                        TY_blocks: Optional[Sequence[np.ndarray]] = None, truncated: bool = False,
                        rank_tol: float = RANK_TOL) -> AssemblyResult:
    """
    Y = [Y_1 ... Y_N], Q = orthonormal basis of (ker Y)^perp, R = Q* S Q and
    Z = Y Q. The certified residual is ||(Y S - T Y) P0 Q||, where P0 drops
    the last coordinate of every block in the truncated shift case.
    """
    Y_blocks = [np.asarray(Y, dtype=complex) for Y in Y_blocks]
    if not Y_blocks:
        raise InputError("assemble_similarity needs at least one block")
    if S_blocks is None:
        S_blocks = [_shift_matrix(Y.shape[1]) for Y in Y_blocks]
    S_blocks = [np.asarray(S, dtype=complex) for S in S_blocks]
    Y = np.hstack(Y_blocks)
    S = scipy.linalg.block_diag(*S_blocks)
    if TY_blocks is not None:
        TY = np.hstack([np.asarray(B, dtype=complex) for B in TY_blocks])
    elif T is not None:
        TY = getattr(T, "matrix", np.asarray(T, dtype=complex)) @ Y
    else:
        raise InputError("assemble_similarity needs T or the blocks T Y_n")

    kernel, Q = _kernel_split(Y, rank_tol)
    rank = Q.shape[1]
    if not truncated and rank < Y.shape[0]:
        raise RankDeficientError(f"Combined range has dimension {rank} < {Y.shape[0]}")
    if kernel.shape[1]:
        logging.info(f"assemble_similarity: kernel of dimension {kernel.shape[1]} removed")

    keep = np.ones(S.shape[0])
    if truncated:
        ends = np.cumsum([S_n.shape[0] for S_n in S_blocks]) - 1
        keep[ends] = 0.0
    R = OperatorMatrix(np.conj(Q.T) @ S @ Q)
    Z = Y @ Q
    residual = float(np.linalg.norm((Y @ S - TY) @ (keep[:, None] * Q), 2))
    s = np.linalg.svd(Z, compute_uv=False)
    sigma_min = float(s[-1]) if s.size else 0.0
    certificate = SimilarityCertificate(
        Z, residual, sigma_min, float(s[0] / sigma_min) if sigma_min > 0 else float("inf"), INTERTWINING_TOL,
    )
    return AssemblyResult(R, defects(R), certificate, kernel.shape[1], rank, len(Y_blocks))


def assemble_from_subspaces(subspaces: Sequence[ShiftTypeSubspace], rank_tol: float = RANK_TOL) -> AssemblyResult:
    return assemble_similarity(
        [s.matrix for s in subspaces],
        TY_blocks=[s.shifted_image for s in subspaces],
        truncated=True, rank_tol=rank_tol,
    )


@dataclass
class C0AssemblyResult:
    assembly: AssemblyResult
    annihilation_residual: float
    M: int
    N: int
    lower_bounds: List[float] = field(default_factory=list)


def assemble_c0_similarity(thetas: Sequence[BlaschkeProduct], Y_blocks: Sequence[np.ndarray], T,
                           rank_tol: float = RANK_TOL, grid: Optional[BoundaryGrid] = None) -> C0AssemblyResult:
    """Same stacking over the finite models H(theta_n); R is annihilated by prod theta_n."""
    if len(thetas) != len(Y_blocks):
        raise InputError("assemble_c0_similarity needs one intertwiner per inner function")
    lower_bounds = []
    for n, (theta, Y_n) in enumerate(zip(thetas, Y_blocks), start=1):
        Y_n = np.asarray(Y_n, dtype=complex)
        if Y_n.ndim != 2 or Y_n.shape[1] != theta.degree:
            raise InputError(f"Intertwiner {n} must have {theta.degree} columns, got shape {Y_n.shape}")
        s = np.linalg.svd(Y_n, compute_uv=False)
        lower = float(s[-1]) if Y_n.shape[0] >= Y_n.shape[1] else 0.0
        if lower < rank_tol * max(1.0, float(s[0])):
            raise LowerBoundViolationError(f"Intertwiner {n} is not bounded below (sigma_min = {lower:.3e})")
        lower_bounds.append(lower)

    S_blocks = [compressed_shift(model_space(theta, grid)).matrix for theta in thetas]
    assembly = assemble_similarity(Y_blocks, T, S_blocks, rank_tol=rank_tol)
    product = BlaschkeProduct([lam for theta in thetas for lam in theta.zeros], simple=False)
    annihilation = float(np.linalg.norm(product.at_matrix(assembly.R.matrix), 2))
    if annihilation > RANK_TOL:
        raise AnnihilationError(f"||(prod theta_n)(R)|| = {annihilation:.3e}")
    return C0AssemblyResult(assembly, annihilation, assembly.defects.d_T_star, len(thetas), lower_bounds)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class UniquenessVerdict:
    unique: bool
    dimension_sum: int
    total_dimension: int
    min_angles: Dict[str, float]
    direct_sum_residual: Optional[float] = None


def unique_representation_check(subspaces, T=None, tol: float = RANK_TOL) -> UniquenessVerdict:
    """
    dim(M_1 + ... + M_N) = sum dim M_n decides uniqueness of the
    representation. With T given and a unique representation, T is
    compared with the block diagonal of its restrictions.
    """
    bases = [scipy.linalg.orth(getattr(s, "matrix", s)) for s in subspaces]
    angles = {}
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            angles[f"{i + 1}-{j + 1}"] = float(np.min(scipy.linalg.subspace_angles(bases[i], bases[j])))
    stacked = np.hstack(bases)
    s = np.linalg.svd(stacked, compute_uv=False)
    dim_sum = int(np.sum(s > tol * max(1.0, s[0])))
    total = sum(b.shape[1] for b in bases)
    verdict = UniquenessVerdict(dim_sum == total, dim_sum, total, angles)

    if verdict.unique and T is not None:
        T = getattr(T, "matrix", np.asarray(T, dtype=complex))
        restrictions = [np.linalg.pinv(B) @ T @ B for B in bases]
        verdict.direct_sum_residual = float(
            np.linalg.norm(stacked @ scipy.linalg.block_diag(*restrictions) - T @ stacked, 2)
        )
    return verdict
#-----------------------------------------------------------------------


if __name__ == "__main__":
    pair = worked_inner_pair(BoundaryGrid(1024))
    subspaces = build_shift_subspaces(pair, 64)
    for s in subspaces:
        print(f"[INFO] Y_{s.index + 1}: lower bound {s.lower_bound:.6f}, intertwining {s.intertwining_residual:.2e}")
    x = model_basis_vector(pair.theta, subspaces[0].space, 0)
    report = decompose_vector(x, subspaces)
    print(f"[INFO] residual {report.residual:.2e} via {report.method}")
