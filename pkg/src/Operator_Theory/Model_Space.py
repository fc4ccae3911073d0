#-----------------------------------------------------------------------
# Purpose: Model spaces of finite Blaschke products, compressed shifts,
#          matrix inner functions and the truncated Hardy space window
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-14
#-----------------------------------------------------------------------

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.fft
import scipy.linalg

from MSL_Utils.Exceptions import ConfigError, InputError
from Operator_Theory.Disc_Algebra import (
    BlaschkeProduct,
    BoundaryGrid,
    ChiFunction,
    ConstantFunction,
    DiscFunction,
    ProductFunction,
    SumFunction,
    eval_blaschke_factor,
)


GRAM_TOL = 1e-8
CLOSE_ZERO_TOL = 1e-10
SERIES_RADIUS = 1e-4


#-----------------------------------------------------------------------
class MatrixFunction:
    """N x M matrix of disc functions with cached boundary samples."""

    def __init__(self, entries: Sequence[Sequence[DiscFunction]]):
        rows = [list(row) for row in entries]
        if not rows or not rows[0]:
            raise InputError("Matrix function needs at least one entry")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InputError("Matrix function rows have different lengths")
        self.entries: List[List[DiscFunction]] = rows
        self._boundary_cache: Dict[int, np.ndarray] = {}

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        N, M = self.shape
        out = np.empty(z.shape + (N, M), dtype=complex)
        for i in range(N):
            for j in range(M):
                out[..., i, j] = self.entries[i][j](z)
        return out

    def boundary_matrix(self, grid: BoundaryGrid) -> np.ndarray:
        """Samples on the grid, shape (G, N, M)."""
        cached = self._boundary_cache.get(grid.size)
        if cached is None:
            N, M = self.shape
            cached = np.empty((grid.size, N, M), dtype=complex)
            for i in range(N):
                for j in range(M):
                    cached[:, i, j] = self.entries[i][j].boundary_values(grid)
            cached.setflags(write=False)
            self._boundary_cache[grid.size] = cached
        return cached

    def singular_points(self):
        points = []
        for row in self.entries:
            for f in row:
                for p in f.singular_points():
                    if p not in points:
                        points.append(p)
        return tuple(points)

    def transpose(self) -> "MatrixFunction":
        N, M = self.shape
        return MatrixFunction([[self.entries[i][j] for i in range(N)] for j in range(M)])

    def to_descriptor(self):
        return [[f.to_descriptor() for f in row] for row in self.entries]
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class MatrixInnerFunction(MatrixFunction):
    """
    Matrix function expected to be an isometry a.e. on the circle.
    The certificate is measured, not assumed.
    """

    def isometry_certificate(self, grid: BoundaryGrid, exclude_cells: int = 1) -> float:
        """max ||Theta* Theta - I|| over grid points away from singularities."""
        values = self.boundary_matrix(grid)
        gram = np.conj(np.swapaxes(values, 1, 2)) @ values
        deviation = gram - np.eye(self.shape[1])
        return self._masked_max(deviation, grid, exclude_cells)

    def coisometry_certificate(self, grid: BoundaryGrid, exclude_cells: int = 1) -> float:
        """max ||Phi Phi* - I||, the check for *-inner functions."""
        values = self.boundary_matrix(grid)
        gram = values @ np.conj(np.swapaxes(values, 1, 2))
        deviation = gram - np.eye(self.shape[0])
        return self._masked_max(deviation, grid, exclude_cells)

    def _masked_max(self, deviation, grid, exclude_cells):
        keep = ~grid.singular_mask(self.singular_points(), exclude_cells)
        if not np.any(keep):
            return 0.0
        norms = np.linalg.norm(deviation[keep], ord=2, axis=(1, 2))
        return float(np.max(norms))
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class FiniteModelSpace:
    """
    H(B) for a finite Blaschke product with the Takenaka-Malmquist basis
    e_n(z) = sqrt(1-|l_n|^2)/(1 - conj(l_n) z) * prod_{k<n} b_{l_k}(z),
    ordered as the zeros of B are listed.
    """

    blaschke: BlaschkeProduct
    gram_residual: float = float("nan")

    @property
    def zeros(self):
        return self.blaschke.zeros

    @property
    def dimension(self) -> int:
        return len(self.blaschke.zeros)

    def basis_values(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty((self.dimension, z.size), dtype=complex)
        prefix = np.ones(z.size, dtype=complex)
        for n, lam in enumerate(self.zeros):
            out[n] = np.sqrt(1 - abs(lam) ** 2) / (1 - np.conj(lam) * z) * prefix
            prefix = prefix * eval_blaschke_factor(lam, z)
        return out


def model_space(B: BlaschkeProduct, grid: Optional[BoundaryGrid] = None) -> FiniteModelSpace:
    if B.degree == 0:
        raise InputError("Model space of a constant Blaschke product is trivial")
    zeros = B.zeros
    for i in range(len(zeros)):
        for j in range(i + 1, len(zeros)):
            gap = abs(zeros[i] - zeros[j])
            if 0 < gap < CLOSE_ZERO_TOL:
                logging.warning(
                    f"model_space: zeros {zeros[i]} and {zeros[j]} are {gap:.1e} apart; "
                    f"the basis is ill-conditioned"
                )

    grid = grid or BoundaryGrid()
    quadrature = BoundaryGrid(4 * grid.size)
    space = FiniteModelSpace(blaschke=B)
    values = space.basis_values(quadrature.points)
    gram = values @ np.conj(values.T) / quadrature.size
    space.gram_residual = float(np.max(np.abs(gram - np.eye(space.dimension))))
    if space.gram_residual > GRAM_TOL:
        logging.warning(f"model_space: Gram residual {space.gram_residual:.2e} exceeds {GRAM_TOL:g}")
    return space
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass
class CompressedShiftOperator:
    space: object
    matrix: np.ndarray
    annihilation_residual: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _shift_matrix(zeros: Sequence[complex]) -> np.ndarray:
    """
    <z e_k, e_j> in closed form: lambda_j on the diagonal, zero above it and
    conj(prod_{i=k}^{j-1} u_i) sqrt(1-|l_j|^2) sqrt(1-|l_k|^2) prod_{i=k+1}^{j-1} (-conj(l_i))
    below it, where u_l = -|l|/l (u_0 = 1) is the unimodular constant of b_l.
    """
    d = len(zeros)
    lam = np.asarray(zeros, dtype=complex)
    unit = np.array([1.0 if l == 0 else -abs(l) / l for l in lam], dtype=complex)
    weight = np.sqrt(1 - np.abs(lam) ** 2)
    T = np.zeros((d, d), dtype=complex)
    for k in range(d):
        T[k, k] = lam[k]
        unit_prod = 1.0 + 0j
        middle = 1.0 + 0j
        for j in range(k + 1, d):
            unit_prod *= unit[j - 1]
            if j - 1 > k:
                middle *= -np.conj(lam[j - 1])
            T[j, k] = np.conj(unit_prod) * weight[j] * weight[k] * middle
    return T


def compressed_shift(space: FiniteModelSpace) -> CompressedShiftOperator:
    T = _shift_matrix(space.zeros)
    residual = float(np.linalg.norm(space.blaschke.at_matrix(T), 2))
    return CompressedShiftOperator(space=space, matrix=T, annihilation_residual=residual)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class DiagonalTheta(MatrixInnerFunction):
    """diag(B_1, ..., B_M) with T_Theta = T_{B_1} (+) ... (+) T_{B_M}."""

    def __init__(self, blocks: Sequence[BlaschkeProduct]):
        blocks = list(blocks)
        zero = ConstantFunction(0.0)
        entries = [[blocks[i] if i == j else zero for j in range(len(blocks))] for i in range(len(blocks))]
        super().__init__(entries)
        self.blocks = blocks

    def model_operator(self, grid: Optional[BoundaryGrid] = None) -> CompressedShiftOperator:
        shifts = [compressed_shift(model_space(B, grid)) for B in self.blocks]
        matrix = scipy.linalg.block_diag(*[s.matrix for s in shifts])
        residual = max(s.annihilation_residual for s in shifts)
        return CompressedShiftOperator(space=self, matrix=matrix, annihilation_residual=residual)

    @property
    def block_sizes(self):
        return [B.degree for B in self.blocks]


def diagonal_theta(blocks: Sequence[BlaschkeProduct], require_nested: bool = False) -> DiagonalTheta:
    if not blocks:
        raise InputError("diagonal_theta needs at least one block")
    if require_nested:
        for n in range(1, len(blocks)):
            outer, inner = blocks[n - 1].zeros, blocks[n].zeros
            missing = [lam for lam in inner if not any(abs(lam - mu) <= 1e-12 for mu in outer)]
            if missing:
                raise InputError(f"Zero set of block {n + 1} is not contained in block {n}: {missing}")
    return DiagonalTheta(blocks)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def taylor_coefficients(f: DiscFunction, count: int = 3, radius: float = 0.5, points: int = 64) -> np.ndarray:
    """First Taylor coefficients at 0 from a Cauchy FFT on a circle inside the disc."""
    nodes = radius * np.exp(2j * np.pi * np.arange(points) / points)
    coeffs = scipy.fft.fft(f(nodes)) / points
    return coeffs[:count] / radius ** np.arange(count)


class _RemovableQuotient(DiscFunction):
    """
    ((1 - s z) f(z) - (1 + s z) f(0)) / z with the removable point at 0
    replaced by one series step when |z| < SERIES_RADIUS.
    """

    kind = "removable_quotient"

    def __init__(self, f: DiscFunction, sign: int):
        super().__init__()
        self.f = f
        self.sign = sign
        self.taylor = taylor_coefficients(f)

    def _quotient(self, z, values):
        s = self.sign
        t0 = self.taylor[0]
        return ((1 - s * z) * values - (1 + s * z) * t0) / z

    def _evaluate(self, z):
        s = self.sign
        t0, t1, t2 = self.taylor
        out = np.empty(z.shape, dtype=complex)
        small = np.abs(z) < SERIES_RADIUS
        out[small] = (t1 - 2 * s * t0) + (t2 - s * t1) * z[small]
        if np.any(~small):
            zz = z[~small]
            out[~small] = self._quotient(zz, self.f._evaluate(zz))
        return out

    def _boundary(self, grid):
        return self._quotient(grid.points, self.f.boundary_values(grid))

    def singular_points(self):
        return self.f.singular_points()

    def to_descriptor(self):
        return {"kind": "removable_quotient", "sign": self.sign, "function": self.f.to_descriptor()}


def example_theta(theta1: DiscFunction, theta2: DiscFunction) -> MatrixInnerFunction:
    """
    The 2x2 inner function built from two scalar inner functions with
    det = -theta1 * theta2. c = 1/sqrt(1 + |theta1(0)|^2), taken real.
    """
    t0 = complex(theta1(0.0))
    c = 1.0 / np.sqrt(1.0 + abs(t0) ** 2)
    one, chi = ConstantFunction(1.0), ChiFunction()
    one_plus = SumFunction([one, chi])
    one_minus = SumFunction([one, chi], [1.0, -1.0])

    entry11 = ProductFunction([ConstantFunction(c / 2), theta2, _RemovableQuotient(theta1, +1)])
    entry12 = ProductFunction([ConstantFunction(c / 2), _RemovableQuotient(theta1, -1)])
    entry21 = ProductFunction([
        ConstantFunction(c / 2), theta2,
        SumFunction([one, chi, ProductFunction([ConstantFunction(np.conj(t0)), one_minus, theta1])]),
    ])
    entry22 = ProductFunction([
        ConstantFunction(c / 2),
        SumFunction([one, chi, ProductFunction([ConstantFunction(np.conj(t0)), one_plus, theta1])], [1.0, -1.0, 1.0]),
    ])
    theta = MatrixInnerFunction([[entry11, entry12], [entry21, entry22]])
    theta.factors = (theta1, theta2)
    theta.normalizer = c
    return theta
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def _det_adj_stack(A: np.ndarray):
    """Determinant and adjugate of a stack of square matrices (..., n, n)."""
    n = A.shape[-1]
    det = np.linalg.det(A)
    adj = np.empty_like(A)
    if n == 1:
        adj[..., 0, 0] = 1.0
        return det, adj
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = A[..., rows != j, :][..., :, rows != i]
            adj[..., i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return det, adj


@dataclass
class DetAdjugate:
    """Pointwise determinant and adjugate samplers of a square matrix function."""

    theta: MatrixFunction

    def det(self, z):
        return _det_adj_stack(self.theta(z))[0]

    def adj(self, z):
        return _det_adj_stack(self.theta(z))[1]

    def at(self, z):
        return _det_adj_stack(self.theta(z))

    def boundary(self, grid: BoundaryGrid):
        return _det_adj_stack(np.array(self.theta.boundary_matrix(grid)))

    def residual(self, z) -> float:
        """max ||Theta adj(Theta) - det I|| over the given points."""
        values = self.theta(np.atleast_1d(z))
        det, adj = _det_adj_stack(values)
        n = values.shape[-1]
        gap = values @ adj - det[..., None, None] * np.eye(n)
        return float(np.max(np.linalg.norm(gap, ord=2, axis=(-2, -1))))


def det_and_adjugate(theta: MatrixFunction) -> DetAdjugate:
    N, M = theta.shape
    if N != M:
        raise InputError(f"det_and_adjugate needs a square matrix function, got {N}x{M}")
    return DetAdjugate(theta)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class TruncatedHardySpace:
    """
    Window onto H^2_N: N channels of polynomial coefficients of degree < K.
    Functions are carried internally as G samples per channel; the analytic
    projection keeps DFT indices [0, G/2).
    """

    channels: int
    degree: int
    grid: BoundaryGrid = field(default_factory=BoundaryGrid)

    def __post_init__(self):
        if self.channels < 1:
            raise ConfigError("Truncated Hardy space needs at least one channel")
        if self.degree < 8:
            raise ConfigError(f"Truncation degree must be at least 8, got {self.degree}")
        if self.degree > self.grid.size // 2:
            raise ConfigError(f"Truncation degree {self.degree} exceeds half the grid size {self.grid.size}")

    @property
    def dimension(self) -> int:
        return self.channels * self.degree

    def to_samples(self, coefficients) -> np.ndarray:
        """(..., N, K) coefficients -> (..., N, G) samples."""
        c = np.asarray(coefficients, dtype=complex)
        pad = [(0, 0)] * (c.ndim - 1) + [(0, self.grid.size - c.shape[-1])]
        return self.grid.size * scipy.fft.ifft(np.pad(c, pad), axis=-1)

    def coefficients(self, samples) -> np.ndarray:
        """All G DFT coefficients of samples."""
        return scipy.fft.fft(np.asarray(samples, dtype=complex), axis=-1) / self.grid.size

    def window(self, samples) -> np.ndarray:
        return self.coefficients(samples)[..., :self.degree]

    def flatten(self, coefficients) -> np.ndarray:
        c = np.asarray(coefficients)
        return c.reshape(c.shape[:-2] + (self.dimension,))

    def unflatten(self, vector) -> np.ndarray:
        v = np.asarray(vector)
        return v.reshape(v.shape[:-1] + (self.channels, self.degree))


def analytic_part(samples: np.ndarray) -> np.ndarray:
    """P_+ on grid samples: keep DFT indices [0, G/2)."""
    G = samples.shape[-1]
    coeffs = scipy.fft.fft(samples, axis=-1)
    coeffs[..., G // 2:] = 0
    return scipy.fft.ifft(coeffs, axis=-1)


def project_samples(theta: MatrixFunction, grid: BoundaryGrid, samples: np.ndarray) -> np.ndarray:
    """v - Theta P_+(Theta* v) on samples of shape (..., N, G)."""
    values = theta.boundary_matrix(grid)
    pulled = np.einsum("gnm,...ng->...mg", np.conj(values), samples)
    return samples - np.einsum("gnm,...mg->...ng", values, analytic_part(pulled))


def shift_samples(theta: MatrixFunction, grid: BoundaryGrid, samples: np.ndarray) -> np.ndarray:
    """Model operator on samples: P_H(z v)."""
    return project_samples(theta, grid, grid.points * samples)


def project_model(x, theta: MatrixFunction, space: TruncatedHardySpace) -> np.ndarray:
    """
    Projection onto H(Theta) of a window vector x of shape (N, K), read back
    on the window. Warns when the projected function leaks past degree K.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (space.channels, space.degree):
        raise InputError(f"Vector has shape {x.shape}, expected {(space.channels, space.degree)}")
    if theta.shape[0] != space.channels:
        raise InputError(f"Theta has {theta.shape[0]} rows, space has {space.channels} channels")

    projected = space.coefficients(project_samples(theta, space.grid, space.to_samples(x)))
    tail = float(np.linalg.norm(projected[:, space.degree:]))
    scale = float(np.linalg.norm(x))
    if scale > 0 and tail > 1e-6 * scale:
        logging.warning(
            f"project_model: energy {tail:.2e} beyond degree {space.degree} "
            f"(relative {tail / scale:.2e}); increase the truncation degree"
        )
    return projected[:, :space.degree]


def projection_matrix(theta: MatrixFunction, space: TruncatedHardySpace) -> np.ndarray:
    """Window matrix of the model-space projection, columns in channel-major order."""
    units = np.eye(space.dimension, dtype=complex).reshape(space.dimension, space.channels, space.degree)
    projected = project_samples(theta, space.grid, space.to_samples(units))
    return space.flatten(space.window(projected)).T
#-----------------------------------------------------------------------


if __name__ == "__main__":
    B = BlaschkeProduct([0.0, 0.5, -0.3j])
    shift = compressed_shift(model_space(B))
    print("[INFO] compressed shift:\n", np.round(shift.matrix, 4))
    print("[INFO] ||B(T_B)|| =", shift.annihilation_residual)
    theta = example_theta(BlaschkeProduct([0.5]), BlaschkeProduct([0.5]))
    print("[INFO] example isometry certificate =", theta.isometry_certificate(BoundaryGrid(1024)))
