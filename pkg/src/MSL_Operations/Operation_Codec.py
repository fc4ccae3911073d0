#-----------------------------------------------------------------------
# Purpose: JSON descriptors <-> disc functions, matrix functions,
#          operators and vectors
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-06
#-----------------------------------------------------------------------

import json
from pathlib import Path
from typing import Any, List

import numpy as np

from MSL_Utils.Exceptions import DescriptorError, InputError
from MSL_Utils.Utils import utils
from Operator_Theory.Arc_Sets import ArcSet
from Operator_Theory.Disc_Algebra import (
    BlaschkeProduct,
    BoundaryGrid,
    ChiFunction,
    ConstantFunction,
    DiscFunction,
    OuterFunction,
    ProductFunction,
    SingularInnerExp,
    SumFunction,
    outer_from_log_modulus,
)
from Operator_Theory.Model_Space import MatrixFunction, MatrixInnerFunction


#-----------------------------------------------------------------------
def load_json(path) -> Any:
    """Read a JSON file; parser errors become DescriptorError with file:line:col."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DescriptorError(e.msg, path=str(path), line=e.lineno, column=e.colno) from e


def _complex(value, what: str) -> complex:
    try:
        return utils.pair_to_complex(value)
    except (TypeError, ValueError) as e:
        raise DescriptorError(f"Bad complex number for {what}: {value!r}") from e


def _require(data: dict, key: str, kind: str):
    if key not in data:
        raise DescriptorError(f"Descriptor of kind '{kind}' is missing '{key}'")
    return data[key]
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def function_from_descriptor(data: Any, grid: BoundaryGrid = None) -> DiscFunction:
    """
    Kinds: blaschke, singular_exp, outer, product, sum, chi, const.
    A bare number or [re, im] pair is read as a constant.
    """
    if isinstance(data, (int, float)) or (isinstance(data, list) and len(data) == 2
                                          and all(isinstance(v, (int, float)) for v in data)):
        return ConstantFunction(_complex(data, "constant"))
    if not isinstance(data, dict):
        raise DescriptorError(f"Function descriptor must be an object, got {type(data).__name__}")

    kind = data.get("kind")
    if kind == "blaschke":
        zeros = [_complex(z, "zero") for z in _require(data, "zeros", kind)]
        return BlaschkeProduct(zeros, _complex(data.get("constant", 1.0), "constant"),
                               simple=bool(data.get("simple", True)))
    if kind == "singular_exp":
        return SingularInnerExp(float(_require(data, "a", kind)))
    if kind == "chi":
        return ChiFunction()
    if kind == "const":
        return ConstantFunction(_complex(_require(data, "value", kind), "value"))
    if kind == "outer":
        return _outer_from_descriptor(data, grid)
    if kind == "product":
        factors = [function_from_descriptor(f, grid) for f in data.get("factors", [])]
        divisors = [function_from_descriptor(f, grid) for f in data.get("divisors", [])]
        return ProductFunction(factors, divisors)
    if kind == "sum":
        terms = [function_from_descriptor(f, grid) for f in _require(data, "terms", kind)]
        coefficients = data.get("coefficients")
        if coefficients is not None:
            coefficients = [_complex(c, "coefficient") for c in coefficients]
        return SumFunction(terms, coefficients)
    raise DescriptorError(f"Unknown function kind {kind!r}")


def _outer_from_descriptor(data: dict, grid: BoundaryGrid) -> OuterFunction:
    if "log_modulus" in data:
        return OuterFunction(np.asarray(data["log_modulus"], dtype=float))
    if "pieces" in data:
        outer_grid = BoundaryGrid(int(data.get("grid", grid.size if grid else 4096)))
        pieces = []
        for piece in data["pieces"]:
            if not isinstance(piece, dict) or "arcs" not in piece or "value" not in piece:
                raise DescriptorError("Outer piece must have 'arcs' and 'value'")
            pieces.append((ArcSet.from_descriptor(piece["arcs"]), float(piece["value"])))
        return outer_from_log_modulus(grid=outer_grid, pieces=pieces, default=float(data.get("default", 1.0)))
    if "modulus" in data:
        return outer_from_log_modulus(np.asarray(data["modulus"], dtype=float))
    raise DescriptorError("Outer descriptor needs 'pieces', 'modulus' or 'log_modulus'")


def functions_from_descriptor(data: Any, grid: BoundaryGrid = None) -> List[DiscFunction]:
    if not isinstance(data, list):
        raise DescriptorError("Expected a list of function descriptors")
    return [function_from_descriptor(f, grid) for f in data]


def blaschke_from_descriptor(data: Any) -> BlaschkeProduct:
    """A Blaschke descriptor or a bare list of zeros."""
    if isinstance(data, list):
        return BlaschkeProduct([_complex(z, "zero") for z in data])
    f = function_from_descriptor(data)
    if not isinstance(f, BlaschkeProduct):
        raise DescriptorError(f"Expected a Blaschke product, got kind {f.kind!r}")
    return f


def zeros_from_descriptor(data: Any) -> List[complex]:
    if isinstance(data, dict):
        data = _require(data, "zeros", data.get("kind", "blaschke"))
    if not isinstance(data, list):
        raise DescriptorError("Expected a list of zeros")
    return [_complex(z, "zero") for z in data]
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def matrix_function_from_descriptor(data: Any, grid: BoundaryGrid = None, inner: bool = True) -> MatrixFunction:
    """A list of rows of function descriptors."""
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise DescriptorError("Matrix function must be a nonempty list of rows")
    entries = [[function_from_descriptor(f, grid) for f in row] for row in data]
    return MatrixInnerFunction(entries) if inner else MatrixFunction(entries)


def matrix_from_descriptor(data: Any) -> np.ndarray:
    """
    Dense complex matrix: {"dim": d, "entries": row-major list of d*d
    [re, im] pairs}, or a list of rows.
    """
    if isinstance(data, dict) and "entries" in data:
        entries = data["entries"]
        d = int(data.get("dim", round(len(entries) ** 0.5)))
        if not isinstance(entries, list) or len(entries) != d * d:
            raise DescriptorError(f"Operator of dimension {d} needs {d * d} entries")
        data = [entries[i * d:(i + 1) * d] for i in range(d)]
    elif isinstance(data, dict):
        data = data.get("matrix", data.get("operator"))
    if not isinstance(data, list) or not data:
        raise DescriptorError("Operator must be a nonempty list of rows")
    try:
        return np.array([[utils.pair_to_complex(v) for v in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as e:
        raise DescriptorError(f"Bad matrix entry: {e}") from e


def vector_from_descriptor(data: Any, channels: int) -> np.ndarray:
    """Channel-major coefficient arrays: one list of [re, im] pairs per channel."""
    if isinstance(data, dict):
        data = data.get("coefficients")
    if not isinstance(data, list) or len(data) != channels:
        raise DescriptorError(f"Vector must list coefficients for {channels} channels")
    rows = []
    for row in data:
        if not isinstance(row, list):
            raise DescriptorError("Each channel must be a list of coefficients")
        rows.append([_complex(v, "coefficient") for v in row])
    width = max(len(r) for r in rows)
    return np.array([r + [0j] * (width - len(r)) for r in rows], dtype=complex)


def matrix_to_descriptor(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": int(M.shape[0]), "entries": [utils.complex_to_pair(v) for v in M.reshape(-1)]}
#-----------------------------------------------------------------------
