#-----------------------------------------------------------------------
# Purpose: Scalar function algebra on the unit disc and circle
#          (Blaschke products, singular inner exponentials, outer
#          functions from boundary modulus, Carleson constants)
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-12
#-----------------------------------------------------------------------

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.linalg
from numpy.polynomial import polynomial as P

from MSL_Utils.Exceptions import (
    ConfigError,
    DuplicateZeroError,
    EvaluationSingularityError,
    InputError,
    ResolventError,
    UnsupportedEntryError,
    ZeroModulusError,
)
from Operator_Theory.Arc_Sets import ArcSet


LOG_CLAMP = 1e-12          # log w is replaced by log(max(w, LOG_CLAMP))
TOL_INNER = 1e-6
RESOLVENT_COND_LIMIT = 1e12
HERGLOTZ_CHUNK = 256


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class BoundaryGrid:
    """Points exp(2*pi*i*j/G), j = 0..G-1, on the unit circle."""

    size: int = 4096

    def __post_init__(self):
        G = self.size
        if not isinstance(G, (int, np.integer)) or G < 16 or (G & (G - 1)) != 0:
            raise ConfigError(f"Grid size must be a power of two >= 16, got {G}")

    @cached_property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.size) / self.size)

    def cell_of(self, point) -> int:
        """Index of the grid point nearest to a boundary point."""
        angle = np.angle(complex(point)) / (2 * np.pi)
        return int(np.round(angle * self.size)) % self.size

    def singular_mask(self, singular_points: Sequence[complex], exclude_cells: int = 1) -> np.ndarray:
        """
        Grid points within `exclude_cells` cells of a declared boundary
        singularity. exclude_cells = 1 removes 3 cells per singularity.
        """
        mask = np.zeros(self.size, dtype=bool)
        for point in singular_points:
            centre = self.cell_of(point)
            for offset in range(-exclude_cells, exclude_cells + 1):
                mask[(centre + offset) % self.size] = True
        return mask
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def eval_blaschke_factor(lam, z):
    """
    b_lam(z) = |lam|/lam * (lam - z)/(1 - conj(lam) z), and b_0(z) = z.
    Vectorized in z.
    """
    lam = complex(lam)
    if abs(lam) >= 1:
        raise InputError(f"Blaschke zero {lam} is not inside the unit disc")
    z = np.asarray(z, dtype=complex)
    if lam == 0:
        out = z.copy()
    else:
        out = (abs(lam) / lam) * (lam - z) / (1 - np.conj(lam) * z)
    return out[()] if out.ndim == 0 else out


def pseudo_hyperbolic(lam, mu) -> float:
    """Pseudohyperbolic distance |b_mu(lam)|."""
    return float(abs(eval_blaschke_factor(mu, lam)))


def _check_distinct(zeros: Sequence[complex]):
    seen = set()
    for lam in zeros:
        if lam in seen:
            raise DuplicateZeroError(f"Zero {lam} is repeated in a simple-zero list")
        seen.add(lam)


#-----------------------------------------------------------------------
def carleson_constant(zeros: Sequence[complex]) -> float:
    """
    inf_n prod_{k != n} |b_{lam_k}(lam_n)|, multiplied in index order.
    A single zero gives the empty product 1.
    """
    zeros = [complex(z) for z in zeros]
    if not zeros:
        raise InputError("Carleson constant of an empty zero list is undefined")
    for lam in zeros:
        if abs(lam) >= 1:
            raise InputError(f"Zero {lam} is not inside the unit disc")
    _check_distinct(zeros)

    best = 1.0
    for n, lam_n in enumerate(zeros):
        product = 1.0
        for k, lam_k in enumerate(zeros):
            if k != n:
                product *= abs(eval_blaschke_factor(lam_k, lam_n))
        best = min(best, product)
    return best
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class DiscFunction(ABC):
    """
    Bounded analytic function on the disc with boundary samples.

    Subclasses implement _evaluate on arrays. Boundary samples are cached
    per grid size; apart from that cache instances never change.
    """

    kind = "abstract"

    def __init__(self):
        self._boundary_cache: Dict[int, np.ndarray] = {}

    #-------------------------------------------------------------------
    @abstractmethod
    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def to_descriptor(self) -> dict:
        ...

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1 + 1e-12):
            raise InputError("Disc functions are only evaluated on the closed unit disc")
        out = np.asarray(self._evaluate(z), dtype=complex)
        return out[()] if out.ndim == 0 else out

    #-------------------------------------------------------------------
    def boundary_values(self, grid: BoundaryGrid) -> np.ndarray:
        cached = self._boundary_cache.get(grid.size)
        if cached is None:
            cached = np.asarray(self._boundary(grid), dtype=complex)
            cached.setflags(write=False)
            self._boundary_cache[grid.size] = cached
        return cached

    def _boundary(self, grid: BoundaryGrid) -> np.ndarray:
        return self._evaluate(grid.points)

    def singular_points(self) -> Tuple[complex, ...]:
        return ()

    @property
    def is_inner(self) -> bool:
        return False

    def at_matrix(self, T: np.ndarray) -> np.ndarray:
        raise UnsupportedEntryError(f"No matrix functional calculus for {self.kind} functions")

    #-------------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            other = ConstantFunction(other)
        return ProductFunction([self, other])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            other = ConstantFunction(other)
        return ProductFunction([self], [other])

    def __add__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            other = ConstantFunction(other)
        return SumFunction([self, other])

    __radd__ = __add__

    def __neg__(self):
        return ProductFunction([ConstantFunction(-1.0), self])

    def __sub__(self, other):
        return self + (-1.0) * other
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class ConstantFunction(DiscFunction):
    kind = "const"

    def __init__(self, value):
        super().__init__()
        self.value = complex(value)

    def _evaluate(self, z):
        return np.full(z.shape, self.value, dtype=complex)

    @property
    def is_inner(self):
        return abs(abs(self.value) - 1) <= 1e-12

    def at_matrix(self, T):
        return self.value * np.eye(T.shape[0], dtype=complex)

    def to_descriptor(self):
        return {"kind": "const", "value": [self.value.real, self.value.imag]}


class ChiFunction(DiscFunction):
    """The identity function chi(z) = z."""
    kind = "chi"

    def _evaluate(self, z):
        return z.copy()

    @property
    def is_inner(self):
        return True

    def at_matrix(self, T):
        return np.array(T, dtype=complex)

    def to_descriptor(self):
        return {"kind": "chi"}
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class BlaschkeProduct(DiscFunction):
    """
    constant * prod_k b_{lam_k}. With simple=True every zero must be
    distinct; simple=False allows repeated zeros (general products).
    """

    kind = "blaschke"

    def __init__(self, zeros: Sequence[complex], constant: complex = 1.0, simple: bool = True):
        super().__init__()
        self.zeros: Tuple[complex, ...] = tuple(complex(z) for z in zeros)
        self.constant = complex(constant)
        self.simple = bool(simple)

        for lam in self.zeros:
            if not np.isfinite(lam) or abs(lam) >= 1:
                raise InputError(f"Blaschke zero {lam} is not inside the open unit disc")
        if abs(abs(self.constant) - 1) > 1e-10:
            raise InputError(f"Blaschke constant {self.constant} is not unimodular")
        if self.simple:
            _check_distinct(self.zeros)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def is_inner(self):
        return True

    def _evaluate(self, z):
        out = np.full(z.shape, self.constant, dtype=complex)
        for lam in self.zeros:
            out = out * eval_blaschke_factor(lam, z)
        return out

    #-------------------------------------------------------------------
    def at_matrix(self, T: np.ndarray) -> np.ndarray:
        """
        B(T) = constant * prod_k (|lam|/lam)(lam I - T)(I - conj(lam) T)^{-1},
        with the factor T for lam = 0.
        """
        T = np.asarray(T, dtype=complex)
        d = T.shape[0]
        identity = np.eye(d, dtype=complex)
        result = self.constant * identity
        for lam in self.zeros:
            if lam == 0:
                factor = T
            else:
                resolvent_base = identity - np.conj(lam) * T
                cond = np.linalg.cond(resolvent_base)
                if not np.isfinite(cond) or cond > RESOLVENT_COND_LIMIT:
                    raise ResolventError(
                        f"I - conj({lam}) T is numerically singular (cond = {cond:.3e}); "
                        f"the operator is probably not a contraction"
                    )
                factor = (abs(lam) / lam) * scipy.linalg.solve(resolvent_base, lam * identity - T)
            result = result @ factor
        return result

    def to_descriptor(self):
        return {
            "kind": "blaschke",
            "zeros": [[lam.real, lam.imag] for lam in self.zeros],
            "constant": [self.constant.real, self.constant.imag],
            "simple": self.simple,
        }

    def __repr__(self):
        return f"BlaschkeProduct(zeros={list(self.zeros)}, constant={self.constant})"
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class SingularInnerExp(DiscFunction):
    """alpha_a(z) = exp(a (z + 1)/(z - 1)), inner, singular at z = 1."""

    kind = "singular_exp"

    def __init__(self, a: float):
        super().__init__()
        a = float(a)
        if not np.isfinite(a) or a <= 0:
            raise InputError(f"Singular inner exponent must be positive, got {a}")
        self.a = a

    @property
    def is_inner(self):
        return True

    def singular_points(self):
        return (1.0 + 0.0j,)

    def _evaluate(self, z):
        if np.any(z == 1):
            raise EvaluationSingularityError(f"alpha_{self.a} is singular at z = 1")
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.a * (z + 1) / (z - 1))

    def _boundary(self, grid):
        # radial limit 0 at the singular point
        out = np.empty(grid.size, dtype=complex)
        out[0] = 0.0
        out[1:] = self._evaluate(grid.points[1:])
        return out

    def to_descriptor(self):
        return {"kind": "singular_exp", "a": self.a}

    def __repr__(self):
        return f"SingularInnerExp(a={self.a})"


def singular_exp_product(first: SingularInnerExp, second: SingularInnerExp) -> SingularInnerExp:
    """alpha_a * alpha_b = alpha_(a+b)."""
    return SingularInnerExp(first.a + second.a)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class OuterFunction(DiscFunction):
    """
    Outer function with |O| = w on the grid it was built from.

    Boundary values come from the analytic completion of u = log w:
    c = fft(u)/G, h_0 = c_0, h_m = 2 c_m (0 < m < G/2), h_{G/2} = c_{G/2},
    log O = sum_m h_m z^m. Inside the disc the discrete Herglotz sum
    (1/G) sum_j (zeta_j + z)/(zeta_j - z) u_j is used.
    """

    kind = "outer"

    def __init__(self, log_modulus: np.ndarray, source: Optional[dict] = None):
        super().__init__()
        u = np.array(log_modulus, dtype=float)
        if u.ndim != 1:
            raise InputError("Log-modulus samples must be a 1-D array")
        self.grid = BoundaryGrid(int(u.size))
        self.log_modulus = u
        self.log_modulus.setflags(write=False)
        self._source = source

        G = u.size
        c = scipy.fft.fft(u) / G
        h = np.zeros(G // 2 + 1, dtype=complex)
        h[0] = c[0].real
        h[1:G // 2] = 2 * c[1:G // 2]
        h[G // 2] = c[G // 2].real
        self.coefficients = h
        self._log_on_grid = G * scipy.fft.ifft(np.concatenate([h, np.zeros(G - h.size)]))

    #-------------------------------------------------------------------
    @property
    def geometric_mean(self) -> float:
        return float(np.exp(self.coefficients[0].real))

    def _boundary(self, grid):
        if grid.size == self.grid.size:
            return np.exp(self._log_on_grid)
        return np.exp(P.polyval(grid.points, self.coefficients))

    def _evaluate(self, z):
        flat = z.ravel()
        out = np.empty(flat.shape, dtype=complex)
        on_circle = np.abs(flat) >= 1 - 1e-12
        if np.any(on_circle):
            out[on_circle] = np.exp(P.polyval(flat[on_circle], self.coefficients))
        inside = np.flatnonzero(~on_circle)
        zeta = self.grid.points
        u = self.log_modulus
        for start in range(0, inside.size, HERGLOTZ_CHUNK):
            idx = inside[start:start + HERGLOTZ_CHUNK]
            zc = flat[idx][:, None]
            kernel = (zeta[None, :] + zc) / (zeta[None, :] - zc)
            out[idx] = np.exp(kernel @ u / u.size)
        return out.reshape(z.shape)

    def to_descriptor(self):
        if self._source is not None:
            return dict(self._source)
        return {"kind": "outer", "log_modulus": self.log_modulus.tolist()}
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def outer_from_log_modulus(modulus=None, grid: Optional[BoundaryGrid] = None,
                           pieces: Optional[Sequence[Tuple[ArcSet, float]]] = None,
                           default: float = 1.0) -> OuterFunction:
    """
    Outer function with boundary modulus w. w is either a sample array on
    the grid or a list of (ArcSet, value) pieces with `default` elsewhere;
    later pieces override earlier ones.
    """
    source = None
    if pieces is not None:
        if grid is None:
            raise InputError("Piecewise modulus needs a boundary grid")
        w = np.full(grid.size, float(default))
        for arcs, value in pieces:
            w[arcs.to_mask(grid.size)] = float(value)
        source = {
            "kind": "outer",
            "grid": grid.size,
            "default": float(default),
            "pieces": [{"arcs": arcs.to_descriptor(), "value": float(value)} for arcs, value in pieces],
        }
    elif modulus is not None:
        w = np.asarray(modulus, dtype=float)
        if grid is not None and w.size != grid.size:
            raise InputError(f"Modulus has {w.size} samples, grid has {grid.size}")
    else:
        raise InputError("outer_from_log_modulus needs samples or pieces")

    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise InputError("Boundary modulus must be finite and nonnegative")
    if np.all(w <= LOG_CLAMP):
        raise ZeroModulusError("Boundary modulus vanishes on the whole grid")

    u = np.log(np.maximum(w, LOG_CLAMP))
    return OuterFunction(u, source=source)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
class ProductFunction(DiscFunction):
    """prod(factors) / prod(divisors), evaluated pointwise."""

    kind = "product"

    def __init__(self, factors: Sequence[DiscFunction], divisors: Sequence[DiscFunction] = ()):
        super().__init__()
        self.factors = tuple(factors)
        self.divisors = tuple(divisors)
        if not self.factors and not self.divisors:
            raise InputError("Empty product")

    def _evaluate(self, z):
        out = np.ones(z.shape, dtype=complex)
        for f in self.factors:
            out = out * f._evaluate(z)
        for g in self.divisors:
            out = out / g._evaluate(z)
        return out

    def _boundary(self, grid):
        out = np.ones(grid.size, dtype=complex)
        for f in self.factors:
            out = out * f.boundary_values(grid)
        with np.errstate(divide="ignore", invalid="ignore"):
            for g in self.divisors:
                out = out / g.boundary_values(grid)
        return out

    def singular_points(self):
        points = []
        for f in self.factors + self.divisors:
            for p in f.singular_points():
                if p not in points:
                    points.append(p)
        return tuple(points)

    @property
    def is_inner(self):
        return not self.divisors and all(f.is_inner for f in self.factors)

    def at_matrix(self, T):
        if self.divisors:
            raise UnsupportedEntryError("Matrix functional calculus of quotients is not supported")
        out = np.eye(np.asarray(T).shape[0], dtype=complex)
        for f in self.factors:
            out = out @ f.at_matrix(T)
        return out

    def to_descriptor(self):
        return {
            "kind": "product",
            "factors": [f.to_descriptor() for f in self.factors],
            "divisors": [g.to_descriptor() for g in self.divisors],
        }


class SumFunction(DiscFunction):
    """sum_i coefficient_i * term_i."""

    kind = "sum"

    def __init__(self, terms: Sequence[DiscFunction], coefficients: Optional[Sequence[complex]] = None):
        super().__init__()
        self.terms = tuple(terms)
        if coefficients is None:
            coefficients = [1.0] * len(self.terms)
        self.coefficients = tuple(complex(c) for c in coefficients)
        if len(self.coefficients) != len(self.terms):
            raise InputError("Sum needs one coefficient per term")

    def _evaluate(self, z):
        out = np.zeros(z.shape, dtype=complex)
        for c, f in zip(self.coefficients, self.terms):
            out = out + c * f._evaluate(z)
        return out

    def _boundary(self, grid):
        out = np.zeros(grid.size, dtype=complex)
        for c, f in zip(self.coefficients, self.terms):
            out = out + c * f.boundary_values(grid)
        return out

    def singular_points(self):
        points = []
        for f in self.terms:
            for p in f.singular_points():
                if p not in points:
                    points.append(p)
        return tuple(points)

    def at_matrix(self, T):
        out = np.zeros((np.asarray(T).shape[0],) * 2, dtype=complex)
        for c, f in zip(self.coefficients, self.terms):
            out = out + c * f.at_matrix(T)
        return out

    def to_descriptor(self):
        return {
            "kind": "sum",
            "terms": [f.to_descriptor() for f in self.terms],
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
        }
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def inner_certificate(f: DiscFunction, grid: BoundaryGrid, exclude_cells: int = 1,
                      extra_mask: Optional[np.ndarray] = None) -> float:
    """max | |f(zeta_j)| - 1 | over grid points away from singularities."""
    values = f.boundary_values(grid)
    keep = ~grid.singular_mask(f.singular_points(), exclude_cells)
    if extra_mask is not None:
        keep &= ~extra_mask
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(np.abs(values[keep]) - 1)))


@dataclass
class Factorization:
    inner: DiscFunction
    outer: OuterFunction
    clamped_cells: List[int] = field(default_factory=list)

    def inner_certificate(self, grid: BoundaryGrid, exclude_cells: int = 1) -> float:
        mask = np.zeros(grid.size, dtype=bool)
        if grid.size == self.outer.grid.size:
            mask[self.clamped_cells] = True
        return inner_certificate(self.inner, grid, exclude_cells, extra_mask=mask)


def inner_outer_factorize(f: DiscFunction, grid: BoundaryGrid) -> Factorization:
    """
    outer = outer function of |f| on the grid, inner = f / outer.
    Cells where |f| falls under the clamp are reported and left out of the
    inner certificate.
    """
    modulus = np.abs(f.boundary_values(grid))
    clamped = np.flatnonzero(modulus < LOG_CLAMP)
    if clamped.size == grid.size:
        raise ZeroModulusError("Function vanishes at every grid point")
    if clamped.size:
        logging.warning(
            f"inner_outer_factorize: |f| < {LOG_CLAMP:g} at {clamped.size} grid points; "
            f"inner part certified only off those points"
        )
    outer = outer_from_log_modulus(modulus, grid)
    inner = ProductFunction([f], [outer])
    return Factorization(inner=inner, outer=outer, clamped_cells=clamped.tolist())
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def halton_disc_points(count: int, radius: float = 0.95) -> np.ndarray:
    """
    Deterministic interior sample points: unscrambled Halton points mapped
    to the disc of the given radius (area-uniform).
    """
    from scipy.stats import qmc

    sampler = qmc.Halton(d=2, scramble=False)
    sampler.fast_forward(1)  # skip the origin
    u = sampler.random(count)
    r = radius * np.sqrt(u[:, 0])
    return r * np.exp(2j * np.pi * u[:, 1])
#-----------------------------------------------------------------------


if __name__ == "__main__":
    grid = BoundaryGrid(1024)
    B = BlaschkeProduct([0.0, 0.5])
    print("[INFO] b_0.5(0) =", eval_blaschke_factor(0.5, 0.0))
    print("[INFO] Carleson constant of {0, 0.5} =", carleson_constant([0.0, 0.5]))
    print("[INFO] inner certificate of B =", inner_certificate(B, grid))
    fac = inner_outer_factorize(2 * BlaschkeProduct([0.5]), grid)
    print("[INFO] outer part at 0 =", fac.outer(0.0))
