#-----------------------------------------------------------------------
# Purpose: Matrix-level operator theory: Blaschke calculus, defects,
#          multiplicity, intertwiners, Jordan models, triangulation and
#          the finite-defect similarity pipeline
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-21
#-----------------------------------------------------------------------

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from MSL_Utils.Exceptions import (
    AnnihilationError,
    CarlesonViolationError,
    InputError,
    NonDiagonalizableError,
    NotAContractionError,
    PreconditionError,
    UnsolvableLiftError,
)
from Operator_Theory.Disc_Algebra import (
    BlaschkeProduct,
    BoundaryGrid,
    DiscFunction,
    ProductFunction,
    carleson_constant,
)
from Operator_Theory.Model_Space import DiagonalTheta, diagonal_theta


RANK_TOL = 1e-8
CONTRACTION_TOL = 1e-8
ANNIHILATION_TOL = 1e-6
CLUSTER_TOL = 1e-6
LIFT_TOL = 1e-6
CARLESON_FLOOR = 1e-8


#-----------------------------------------------------------------------
def numerical_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    """Singular values above tol * max(1, ||M||)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _kernel_split(M: np.ndarray, tol: float = RANK_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the numerical kernel of M and of its complement."""
    n = M.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    V = np.conj(vh.T)
    return V[:, rank:], V[:, :rank]
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class OperatorMatrix:
    """Dense square matrix acting on C^d."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError(f"Operator matrix must be square, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise InputError("Operator matrix has non-finite entries")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def norm(self) -> float:
        if self.dimension == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def is_contraction(self) -> bool:
        return self.norm <= 1 + CONTRACTION_TOL


def as_operator(T) -> OperatorMatrix:
    return T if isinstance(T, OperatorMatrix) else OperatorMatrix(T)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class SimilarityCertificate:
    """X with X source = target X, checked numerically."""

    X: np.ndarray
    residual: float
    sigma_min: float
    condition: float
    residual_tol: float = RANK_TOL

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.X, 2)) if self.X.size else 0.0

    @property
    def accepted(self) -> bool:
        return self.residual <= self.residual_tol * self.norm and self.sigma_min >= RANK_TOL


def certify_similarity(X, source, target, residual_tol: float = RANK_TOL) -> SimilarityCertificate:
    X = np.asarray(X, dtype=complex)
    source = as_operator(source).matrix
    target = as_operator(target).matrix
    if X.shape != (target.shape[0], source.shape[0]):
        raise InputError(f"Intertwiner shape {X.shape} does not match {target.shape[0]}x{source.shape[0]}")
    residual = float(np.linalg.norm(X @ source - target @ X, 2)) if X.size else 0.0
    s = np.linalg.svd(X, compute_uv=False) if X.size else np.zeros(0)
    sigma_min = float(s[-1]) if s.size and X.shape[0] == X.shape[1] else 0.0
    condition = float(s[0] / s[-1]) if sigma_min > 0 else float("inf")
    return SimilarityCertificate(X, residual, sigma_min, condition, residual_tol)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def apply_blaschke(T, B: DiscFunction, tol: float = CONTRACTION_TOL) -> OperatorMatrix:
    """B(T) through the Moebius factors (|l|/l)(l I - T)(I - conj(l) T)^-1."""
    T = as_operator(T)
    if T.norm > 1 + tol:
        raise NotAContractionError(f"||T|| = {T.norm:.12g} exceeds 1")
    return OperatorMatrix(B.at_matrix(T.matrix))


def eigenspace_dims(T, points: Sequence[complex], tol: float = RANK_TOL) -> Dict[complex, int]:
    """k(l) = d - rank(T - l I) for every candidate point."""
    T = as_operator(T)
    identity = np.eye(T.dimension)
    scale = max(1.0, T.norm)
    dims = {}
    for lam in points:
        lam = complex(lam)
        s = np.linalg.svd(T.matrix - lam * identity, compute_uv=False)
        dims[lam] = T.dimension - int(np.sum(s > tol * scale))
    return dims
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class EigenCluster:
    centre: complex
    members: List[complex]
    weyr: List[int]

    @property
    def blocks(self) -> int:
        return self.weyr[0] if self.weyr else 0


@dataclass
class MultiplicityReport:
    mu: int
    clusters: List[EigenCluster]


def _cluster_eigenvalues(values: np.ndarray, tol: float) -> List[List[complex]]:
    clusters: List[List[complex]] = []
    for v in values:
        for group in clusters:
            if abs(v - np.mean(group)) < tol:
                group.append(complex(v))
                break
        else:
            clusters.append([complex(v)])
    return clusters


def multiplicity(T, tol: float = RANK_TOL, cluster_tol: float = CLUSTER_TOL) -> MultiplicityReport:
    """
    mu_T = max over eigenvalue clusters of the number of Jordan blocks,
    read off the Weyr characteristic rank((T - c I)^(j-1)) - rank((T - c I)^j)
    at the cluster mean c.
    """
    T = as_operator(T)
    d = T.dimension
    if d == 0:
        return MultiplicityReport(0, [])
    scale = max(1.0, T.norm)
    values = np.linalg.eigvals(T.matrix)
    clusters = []
    for group in _cluster_eigenvalues(values, cluster_tol):
        spread = max(abs(v - w) for v in group for w in group)
        if spread > 1e-10 * scale:
            logging.warning(
                f"multiplicity: eigenvalues near {np.mean(group):.6g} spread by {spread:.2e}; "
                f"rank decisions may be unstable"
            )
        centre = complex(np.mean(group))
        shifted = T.matrix - centre * np.eye(d)
        power = np.eye(d, dtype=complex)
        previous = d
        weyr = []
        while sum(weyr) < len(group):
            power = power @ shifted
            s = np.linalg.svd(power, compute_uv=False)
            rank = int(np.sum(s > tol * scale ** (len(weyr) + 1)))
            step = previous - rank
            if step <= 0:
                break
            weyr.append(step)
            previous = rank
        clusters.append(EigenCluster(centre, group, weyr))
    return MultiplicityReport(max(c.blocks for c in clusters), clusters)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class DefectReport:
    d_T: int
    d_T_star: int
    singular_values: np.ndarray
    singular_values_star: np.ndarray
    cut: float

    @property
    def is_unitary(self) -> bool:
        return self.d_T == 0 and self.d_T_star == 0


def defects(T, cut: float = RANK_TOL) -> DefectReport:
    """Ranks of I - T*T and I - TT* with an absolute singular value cut."""
    T = as_operator(T)
    if not T.is_contraction:
        raise NotAContractionError(f"||T|| = {T.norm:.12g} exceeds 1")
    M = T.matrix
    identity = np.eye(T.dimension)
    s = np.linalg.svd(identity - np.conj(M.T) @ M, compute_uv=False)
    s_star = np.linalg.svd(identity - M @ np.conj(M.T), compute_uv=False)
    return DefectReport(int(np.sum(s > cut)), int(np.sum(s_star > cut)), s, s_star, cut)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class IntertwinerSpace:
    basis: List[np.ndarray]
    shape: Tuple[int, int]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def intertwiner_space(T, R, tol: float = RANK_TOL) -> IntertwinerSpace:
    """Orthonormal basis of {X : X T = R X}, X of size dim R x dim T."""
    T, R = as_operator(T).matrix, as_operator(R).matrix
    d, e = T.shape[0], R.shape[0]
    L = np.kron(T.T, np.eye(e)) - np.kron(np.eye(d), R)
    null = scipy.linalg.null_space(L, rcond=tol)
    basis = [null[:, i].reshape((e, d), order="F") for i in range(null.shape[1])]
    return IntertwinerSpace(basis, (e, d))


def find_similarity(T, R, seed: int = 0, draws: int = 64,
                    tol: float = RANK_TOL) -> Optional[SimilarityCertificate]:
    """
    Random search in the intertwiner space for a well conditioned element.
    Keeps the draw with the largest smallest singular value.
    """
    T, R = as_operator(T), as_operator(R)
    if T.dimension != R.dimension:
        return None
    space = intertwiner_space(T, R, tol)
    if space.dimension == 0:
        return None
    rng = np.random.default_rng(seed)
    stack = np.array(space.basis)
    best, best_sigma = None, -1.0
    for _ in range(draws):
        c = rng.standard_normal(space.dimension) + 1j * rng.standard_normal(space.dimension)
        X = np.tensordot(c, stack, axes=1)
        X = X / np.linalg.norm(X, 2)
        sigma = float(np.linalg.svd(X, compute_uv=False)[-1])
        if sigma > best_sigma:
            best, best_sigma = X, sigma
    if best_sigma < tol:
        return None
    return certify_similarity(best, T, R)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class JordanModelResult:
    theta: DiagonalTheta
    zero_sets: List[List[complex]]
    eigenspace_dims: Dict[complex, int]
    model: np.ndarray
    certificate: SimilarityCertificate
    annihilation_residual: float

    @property
    def blocks(self) -> List[BlaschkeProduct]:
        return self.theta.blocks

    @property
    def intertwiner(self) -> np.ndarray:
        return self.certificate.X


def jordan_model(T, zeros: Sequence[complex], tol: float = RANK_TOL,
                 grid: Optional[BoundaryGrid] = None) -> JordanModelResult:
    """
    T annihilated by the simple-zero Carleson product with zeros Lambda is
    similar to T_Theta, Theta = diag(B_1, ..., B_M), where B_n vanishes on
    {l : k(l) >= n} and M = max k(l). Returns X with X T = T_Theta X.
    """
    T = as_operator(T)
    zeros = [complex(z) for z in zeros]
    separation = carleson_constant(zeros)
    if separation < CARLESON_FLOOR:
        raise CarlesonViolationError(
            f"Carleson constant {separation:.3e} of the zero set is below {CARLESON_FLOOR:g}"
        )
    B = BlaschkeProduct(zeros)
    residual = float(np.linalg.norm(apply_blaschke(T, B).matrix, 2))
    if residual > ANNIHILATION_TOL:
        raise AnnihilationError(f"||B(T)|| = {residual:.3e} exceeds {ANNIHILATION_TOL:g}")

    dims = eigenspace_dims(T, zeros, tol)
    if sum(dims.values()) < T.dimension:
        raise NonDiagonalizableError(
            f"Eigenspaces over the zero set span {sum(dims.values())} of {T.dimension} dimensions"
        )

    M = max(dims.values())
    zero_sets = [[lam for lam in zeros if dims[lam] >= n] for n in range(1, M + 1)]
    theta = diagonal_theta([BlaschkeProduct(zs) for zs in zero_sets], require_nested=True)
    model = theta.model_operator(grid).matrix

    # Eigenbases of T and of the block model in one shared ordering
    offsets = np.cumsum([0] + [len(zs) for zs in zero_sets])
    block_vectors = []
    for n, zs in enumerate(zero_sets):
        block = model[offsets[n]:offsets[n + 1], offsets[n]:offsets[n + 1]]
        vectors = {}
        for lam in zs:
            kernel, _ = _kernel_split(block - lam * np.eye(len(zs)), tol)
            vectors[lam] = kernel[:, 0]
        block_vectors.append(vectors)

    V_cols, W_cols = [], []
    for lam in zeros:
        k = dims[lam]
        if k == 0:
            continue
        kernel, _ = _kernel_split(T.matrix - lam * np.eye(T.dimension), tol)
        for n in range(k):
            V_cols.append(kernel[:, n])
            w = np.zeros(model.shape[0], dtype=complex)
            w[offsets[n]:offsets[n + 1]] = block_vectors[n][lam]
            W_cols.append(w)
    V = np.column_stack(V_cols)
    W = np.column_stack(W_cols)
    X = W @ scipy.linalg.inv(V)

    certificate = certify_similarity(X, T, model)
    logging.info(f"jordan_model: M = {M}, residual {certificate.residual:.2e}, sigma_min {certificate.sigma_min:.2e}")
    return JordanModelResult(theta, zero_sets, dims, model, certificate, residual)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class TriangulationResult:
    basis: np.ndarray
    block_sizes: List[int]
    conjugated: np.ndarray
    residuals: List[float]
    lower_residual: float

    @property
    def offsets(self) -> np.ndarray:
        return np.cumsum([0] + self.block_sizes)

    def block(self, i: int, j: int) -> np.ndarray:
        o = self.offsets
        return self.conjugated[o[i]:o[i + 1], o[j]:o[j + 1]]

    @property
    def diagonal_blocks(self) -> List[np.ndarray]:
        return [self.block(n, n) for n in range(len(self.block_sizes))]

    def reassemble(self) -> np.ndarray:
        return self.basis @ self.conjugated @ np.conj(self.basis.T)


def triangulate(T, factors: Sequence[DiscFunction], tol: float = RANK_TOL) -> TriangulationResult:
    """
    H_1 = ker theta_1(T), then the same step on the compression of T to
    the orthogonal complement, and so on. In the stacked orthonormal basis
    T is block upper triangular with theta_n(T_n) = 0.
    """
    T = as_operator(T)
    factors = list(factors)
    if not factors:
        raise InputError("triangulate needs at least one factor")
    annihilation = float(np.linalg.norm(ProductFunction(factors).at_matrix(T.matrix), 2))
    if annihilation > ANNIHILATION_TOL:
        raise AnnihilationError(f"||(prod theta_n)(T)|| = {annihilation:.3e} exceeds {ANNIHILATION_TOL:g}")

    remaining = np.eye(T.dimension, dtype=complex)
    pieces, sizes = [], []
    for theta in factors:
        if remaining.shape[1] == 0:
            sizes.append(0)
            continue
        compression = np.conj(remaining.T) @ T.matrix @ remaining
        kernel, complement = _kernel_split(theta.at_matrix(compression), tol)
        pieces.append(remaining @ kernel)
        sizes.append(kernel.shape[1])
        remaining = remaining @ complement
    if remaining.shape[1]:
        raise AnnihilationError(f"{remaining.shape[1]} dimensions are left after the last factor")

    U = np.hstack(pieces)
    C = np.conj(U.T) @ T.matrix @ U
    offsets = np.cumsum([0] + sizes)
    lower = 0.0
    for i in range(len(sizes)):
        for j in range(i):
            block = C[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]]
            if block.size:
                lower = max(lower, float(np.linalg.norm(block, 2)))
            C[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = 0
    if lower > tol:
        logging.warning(f"triangulate: zeroed lower blocks of norm {lower:.2e}")

    residuals = []
    for n, theta in enumerate(factors):
        block = C[offsets[n]:offsets[n + 1], offsets[n]:offsets[n + 1]]
        residuals.append(float(np.linalg.norm(theta.at_matrix(block), 2)) if block.size else 0.0)
    return TriangulationResult(U, sizes, C, residuals, lower)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class LiftResult:
    Z: np.ndarray
    residual: float
    method: str


def takahashi_lift(T1, A, T2, Y2, S, tol: float = LIFT_TOL) -> LiftResult:
    """
    Z with Z S - T1 Z = A Y2, so that [[Y1, Z], [0, Y2]] intertwines
    diag(S1, S) with [[T1, A], [0, T2]] whenever Y1 S1 = T1 Y1.
    """
    T1, T2 = as_operator(T1).matrix, as_operator(T2).matrix
    S = getattr(S, "matrix", S)
    S, A, Y2 = (np.asarray(M, dtype=complex) for M in (S, A, Y2))
    if A.shape != (T1.shape[0], T2.shape[0]) or Y2.shape != (T2.shape[0], S.shape[0]):
        raise InputError("takahashi_lift: inconsistent block shapes")
    gap = float(np.linalg.norm(Y2 @ S - T2 @ Y2, 2)) if Y2.size else 0.0
    if gap > RANK_TOL * max(1.0, float(np.linalg.norm(Y2, 2)) if Y2.size else 1.0):
        raise PreconditionError(f"Y2 does not intertwine the model with T2 (residual {gap:.2e})")

    rhs = A @ Y2
    Z, method = None, "sylvester"
    try:
        with np.errstate(all="ignore"):
            Z = scipy.linalg.solve_sylvester(-T1, S, rhs)
        if not np.all(np.isfinite(Z)):
            Z = None
    except (np.linalg.LinAlgError, ValueError):
        Z = None
    if Z is not None:
        residual = float(np.linalg.norm(Z @ S - T1 @ Z - rhs))
        if residual > 1e-10 * max(1.0, float(np.linalg.norm(rhs))):
            Z = None

    if Z is None:
        # Minimum-norm least squares on vec(Z S - T1 Z) = vec(A Y2)
        method = "lstsq"
        m, k = T1.shape[0], S.shape[0]
        L = np.kron(S.T, np.eye(m)) - np.kron(np.eye(k), T1)
        solution = np.linalg.lstsq(L, rhs.reshape(-1, order="F"), rcond=None)[0]
        Z = solution.reshape((m, k), order="F")

    residual = float(np.linalg.norm(Z @ S - T1 @ Z - rhs))
    bound = tol * float(np.linalg.norm(A, 2) * np.linalg.norm(Y2, 2)) if A.size and Y2.size else 0.0
    if residual > bound and residual > 0:
        raise UnsolvableLiftError(
            f"Lift residual {residual:.3e} exceeds {bound:.3e} for the finite model", residual=residual
        )
    return LiftResult(Z, residual, method)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class FiniteDefectResult:
    R: OperatorMatrix
    defects: DefectReport
    certificate: SimilarityCertificate
    block_sizes: List[int]
    residuals: Dict[str, float] = field(default_factory=dict)


def similar_to_finite_defect(T, factors: Sequence[BlaschkeProduct], tol: float = RANK_TOL,
                             grid: Optional[BoundaryGrid] = None) -> FiniteDefectResult:
    """
    Triangulate along the factors, replace each diagonal block by its
    Jordan model, chain the lifts from the bottom block upwards and
    compress the block model to the orthogonal complement of ker Y.
    """
    T = as_operator(T)
    if not T.is_contraction:
        raise NotAContractionError(f"||T|| = {T.norm:.12g} exceeds 1")
    tri = triangulate(T, factors, tol)
    residuals = {"triangulation_lower": tri.lower_residual}
    for n, r in enumerate(tri.residuals):
        residuals[f"annihilation_block_{n + 1}"] = r

    live = [n for n, size in enumerate(tri.block_sizes) if size > 0]
    models, intertwiners = [], []
    for n in live:
        block = tri.block(n, n)
        dims = eigenspace_dims(block, factors[n].zeros, tol)
        jm = jordan_model(block, [lam for lam, k in dims.items() if k > 0], tol, grid)
        models.append(jm.model)
        intertwiners.append(scipy.linalg.inv(jm.intertwiner))
        residuals[f"jordan_block_{n + 1}"] = jm.certificate.residual

    # Bottom-up chain of lifts over the live blocks
    Y, S = intertwiners[-1], models[-1]
    for pos in range(len(live) - 2, -1, -1):
        n = live[pos]
        rows = slice(tri.offsets[n], tri.offsets[n + 1])
        cols = slice(tri.offsets[live[pos + 1]], tri.offsets[-1])
        T1 = tri.conjugated[rows, rows]
        A = tri.conjugated[rows, cols]
        T2 = tri.conjugated[cols, cols]
        lift = takahashi_lift(T1, A, T2, Y, S)
        residuals[f"lift_block_{n + 1}"] = lift.residual
        Y1 = intertwiners[pos]
        Y = np.block([[Y1, lift.Z], [np.zeros((Y.shape[0], Y1.shape[1])), Y]])
        S = scipy.linalg.block_diag(models[pos], S)

    kernel, complement = _kernel_split(Y, tol)
    if kernel.shape[1]:
        logging.warning(f"similar_to_finite_defect: intertwiner has a {kernel.shape[1]}-dimensional kernel")
    R = OperatorMatrix(np.conj(complement.T) @ S @ complement)
    W = tri.basis @ Y @ complement
    certificate = certify_similarity(W, R, T, residual_tol=LIFT_TOL)
    return FiniteDefectResult(R, defects(R), certificate, tri.block_sizes, residuals)
#-----------------------------------------------------------------------


if __name__ == "__main__":
    T = np.array([[0.3, 0.2], [0.0, -0.4]])
    result = similar_to_finite_defect(T, [BlaschkeProduct([0.3]), BlaschkeProduct([-0.4])])
    print("[INFO] block sizes:", result.block_sizes)
    print("[INFO] certificate residual:", result.certificate.residual, "accepted:", result.certificate.accepted)
    print("[INFO] defects:", result.defects.d_T, result.defects.d_T_star)
