#-----------------------------------------------------------------------
# Purpose: Command handlers: read descriptors, run the numerical core and
#          fill a ReportEnvelope
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-08
#-----------------------------------------------------------------------

import logging
from typing import Callable, Dict, Tuple

import numpy as np

from MSL_Operations.Operation_Codec import (
    blaschke_from_descriptor,
    function_from_descriptor,
    functions_from_descriptor,
    load_json,
    matrix_from_descriptor,
    matrix_function_from_descriptor,
    matrix_to_descriptor,
    vector_from_descriptor,
    zeros_from_descriptor,
)
from MSL_Operations.Operation_Report import ReportEnvelope
from MSL_Operations.Operation_Setting import RunConfig
from MSL_Utils.Exceptions import CommandLineError, DescriptorError, InputError
from Operator_Theory.Disc_Algebra import (
    BoundaryGrid,
    OuterFunction,
    SingularInnerExp,
    carleson_constant,
    halton_disc_points,
    inner_certificate,
    pseudo_hyperbolic,
)
from Operator_Theory.Model_Space import (
    GRAM_TOL,
    TruncatedHardySpace,
    compressed_shift,
    det_and_adjugate,
    diagonal_theta,
    example_theta,
    model_space,
    project_model,
)
from Operator_Theory.Psi_Builder import build_psi_normalized, verify_kappa_bounds
from Operator_Theory.Operator_Lab import (
    ANNIHILATION_TOL,
    LIFT_TOL,
    apply_blaschke,
    as_operator,
    defects,
    intertwiner_space,
    jordan_model,
    multiplicity,
    similar_to_finite_defect,
    triangulate,
)
from Operator_Theory.Decomposition import (
    INTERTWINING_TOL,
    LOWER_BOUND_TOL,
    MEMBERSHIP_TOL,
    assemble_c0_similarity,
    assemble_from_subspaces,
    build_shift_subspaces,
    convergence_table,
    decompose_vector,
    inner_pair,
    model_basis_vector,
    unique_representation_check,
    worked_inner_pair,
)
from Operator_Theory.Unicellular import demo_unicellular

DECOMPOSE_TOL = 1e-6


#-----------------------------------------------------------------------
def _required(args, name: str):
    value = getattr(args, name, None)
    if value is None:
        raise CommandLineError(f"--{name.replace('_', '-')} is required for this command")
    return value


def _grid(config: RunConfig) -> BoundaryGrid:
    return BoundaryGrid(config.grid)


def _operator(args):
    return as_operator(matrix_from_descriptor(load_json(_required(args, "operator"))))


def _blaschke_list(path) -> list:
    data = load_json(path)
    if not isinstance(data, list):
        raise DescriptorError(f"{path}: expected a list of Blaschke descriptors")
    return [blaschke_from_descriptor(d) for d in data]


def _interior_points(args, config: RunConfig) -> np.ndarray:
    if getattr(args, "points", None):
        data = load_json(args.points)
        if not isinstance(data, list):
            raise DescriptorError(f"{args.points}: expected a list of points")
        return np.array([complex(*p) if isinstance(p, list) else complex(p) for p in data])
    return halton_disc_points(config.interior_points, config.interior_radius)


def _pair(args, config: RunConfig):
    grid = _grid(config)
    if getattr(args, "theta", None) is None and getattr(args, "phi", None) is None:
        print("[INFO] No --theta/--phi given, using Theta = [z; 1]/sqrt(2), Phi = [1, -z]/sqrt(2)")
        return worked_inner_pair(grid)
    theta = matrix_function_from_descriptor(load_json(_required(args, "theta")), grid)
    phi = matrix_function_from_descriptor(load_json(_required(args, "phi")), grid)
    return inner_pair(theta, phi, grid, config.tol_inner, config.exclude_cells)
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# blaschke / outer
def cmd_blaschke_eval(args, config: RunConfig, report: ReportEnvelope):
    B = blaschke_from_descriptor(load_json(_required(args, "zeros")))
    grid = _grid(config)
    points = _interior_points(args, config)
    values = B(points)

    report.certify("boundary_modulus", inner_certificate(B, grid, config.exclude_cells), config.tol_inner)
    report.certify_lower("interior_contraction", 1.0 - float(np.max(np.abs(values))), -1e-12)
    report.verdicts["degree"] = B.degree
    report.tables["values"] = [
        {"z": complex(z), "value": complex(v), "modulus": float(abs(v))} for z, v in zip(points, values)
    ]
    print(f"[INFO] Evaluated a degree {B.degree} Blaschke product at {points.size} points")


def cmd_blaschke_carleson(args, config: RunConfig, report: ReportEnvelope):
    zeros = zeros_from_descriptor(load_json(_required(args, "zeros")))
    constant = carleson_constant(zeros)
    separation = min(
        (pseudo_hyperbolic(zeros[i], zeros[j]) for i in range(len(zeros)) for j in range(i + 1, len(zeros))),
        default=1.0,
    )
    report.residuals["carleson_constant"] = constant
    report.residuals["separation"] = separation
    report.verdicts["carleson"] = constant > 0
    report.tables["zeros"] = [{"zero": z, "modulus": abs(z)} for z in zeros]
    print(f"[INFO] Carleson constant of {len(zeros)} zeros: {constant:.6g}")


def cmd_outer_build(args, config: RunConfig, report: ReportEnvelope):
    grid = _grid(config)
    F = function_from_descriptor(load_json(_required(args, "modulus")), grid)
    if not isinstance(F, OuterFunction):
        raise DescriptorError("outer build expects a descriptor of kind 'outer'")

    # F(0) is the geometric mean of the modulus
    mean_gap = abs(abs(complex(F(0.0))) - F.geometric_mean) / F.geometric_mean
    target = np.exp(F.log_modulus)
    modulus_gap = float(np.max(np.abs(np.abs(F.boundary_values(F.grid)) - target)))
    report.certify("geometric_mean", mean_gap, config.tol_algebra)
    report.certify("boundary_modulus", modulus_gap, config.tol_inner * max(1.0, float(np.max(target))))
    report.residuals["geometric_mean"] = F.geometric_mean

    points = _interior_points(args, config)
    report.tables["values"] = [{"z": complex(z), "value": complex(v)} for z, v in zip(points, F(points))]
    report.data["outer"] = F.to_descriptor()
    print(f"[INFO] Outer function on {F.grid.size} samples, geometric mean {F.geometric_mean:.6g}")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# psi
def cmd_psi_build(args, config: RunConfig, report: ReportEnvelope):
    grid = _grid(config)
    functions = functions_from_descriptor(load_json(_required(args, "column")), grid)
    normalized = build_psi_normalized(functions, grid, config.tol_inner, config.exclude_cells)
    psi = normalized.psi
    bounds = verify_kappa_bounds(
        psi, points=halton_disc_points(config.interior_points, config.interior_radius), tol=config.tol_inner,
    )

    params = psi.params
    report.certify_lower("kappa_determinant", bounds.kappa_min, bounds.kappa_bound - config.tol_inner)
    for n, value in enumerate(bounds.row_mins):
        report.certify_lower(f"row_lower_bound_{n + 1}", value, bounds.row_bound - config.tol_inner)
    report.certify("inner_image", psi.image_residual, config.tol_inner)
    report.certify_lower("psi_invertible", psi.det_lower_bound, config.tol_algebra)
    report.verdicts["parameters"] = {"deltas": list(params.deltas), "delta": params.delta, "a": params.a, "b": params.b}
    report.verdicts["parameter_checks"] = params.check(psi.column)
    report.verdicts["level_crossings"] = psi.level_crossings
    report.tables["sigma"] = [
        {"row": n + 1, "cells": cells, "arcs": psi.sigma[n].to_descriptor()} for n, cells in enumerate(psi.sigma_cells)
    ]
    report.data["pre_matrix"] = normalized.pre_matrix
    report.data["psi"] = normalized.matrix.to_descriptor()
    report.data["theta"] = [f.to_descriptor() for f in normalized.theta]
    print(f"[INFO] Psi built for a column of {psi.size}, min |det Psi| = {psi.det_lower_bound:.4g}")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# model / theta
def cmd_model_shift(args, config: RunConfig, report: ReportEnvelope):
    B = blaschke_from_descriptor(load_json(_required(args, "zeros")))
    space = model_space(B, _grid(config))
    shift = compressed_shift(space)
    defect = defects(shift.matrix, config.rank_tol)

    report.certify("gram", space.gram_residual, GRAM_TOL)
    report.certify("annihilation", shift.annihilation_residual, ANNIHILATION_TOL)
    report.certify("contraction", shift.norm - 1.0, config.tol_algebra)
    report.verdicts["dimension"] = space.dimension
    report.verdicts["defects"] = {"d_T": defect.d_T, "d_T_star": defect.d_T_star}
    report.data["operator"] = matrix_to_descriptor(shift.matrix)
    print(f"[INFO] Compressed shift of dimension {space.dimension}, norm {shift.norm:.6g}")


def cmd_model_project(args, config: RunConfig, report: ReportEnvelope):
    grid = _grid(config)
    theta = matrix_function_from_descriptor(load_json(_required(args, "theta")), grid)
    space = TruncatedHardySpace(theta.shape[0], config.trunc, grid)
    x = _window_vector(load_json(_required(args, "x")), space)
    projected = project_model(x, theta, space)
    again = project_model(projected, theta, space)

    scale = max(1.0, float(np.linalg.norm(x)))
    report.certify("idempotence", float(np.linalg.norm(again - projected)), 1e-6 * scale)
    report.residuals["distance_to_model"] = float(np.linalg.norm(x - projected))
    report.data["projection"] = projected
    print(f"[INFO] Projected onto H(Theta), distance {report.residuals['distance_to_model']:.4g}")


def _window_vector(data, space: TruncatedHardySpace) -> np.ndarray:
    x = vector_from_descriptor(data, space.channels)
    if x.shape[1] > space.degree:
        raise InputError(f"Vector has degree {x.shape[1]}, above the truncation degree {space.degree}")
    return np.pad(x, ((0, 0), (0, space.degree - x.shape[1])))


def cmd_theta_example(args, config: RunConfig, report: ReportEnvelope):
    grid = _grid(config)
    if getattr(args, "theta1", None):
        theta1 = function_from_descriptor(load_json(args.theta1), grid)
        theta2 = function_from_descriptor(load_json(_required(args, "theta2")), grid)
    else:
        theta1, theta2 = SingularInnerExp(args.a1), SingularInnerExp(args.a2)
    for name, f in (("theta1", theta1), ("theta2", theta2)):
        report.certify(f"{name}_inner", inner_certificate(f, grid, config.exclude_cells), config.tol_inner)

    theta = example_theta(theta1, theta2)
    points = halton_disc_points(config.interior_points, config.interior_radius)
    det = det_and_adjugate(theta).det(points)
    det_gap = float(np.max(np.abs(det + theta1(points) * theta2(points))))
    report.certify("boundary_isometry", theta.isometry_certificate(grid, config.exclude_cells), config.tol_inner)
    report.certify("determinant", det_gap, config.tol_inner)
    report.verdicts["normalizer"] = theta.normalizer
    report.data["theta"] = theta.to_descriptor()
    print(f"[INFO] Example Theta built, normalizer c = {theta.normalizer:.6g}")


def cmd_theta_diag(args, config: RunConfig, report: ReportEnvelope):
    blocks = _blaschke_list(_required(args, "blocks"))
    theta = diagonal_theta(blocks, require_nested=bool(getattr(args, "nested", False)))
    model = theta.model_operator(_grid(config))
    report.certify("annihilation", model.annihilation_residual, ANNIHILATION_TOL)
    report.certify("boundary_isometry", theta.isometry_certificate(_grid(config), config.exclude_cells), config.tol_inner)
    report.verdicts["block_sizes"] = theta.block_sizes
    report.verdicts["multiplicity"] = multiplicity(model.matrix, config.rank_tol).mu
    report.data["operator"] = matrix_to_descriptor(model.matrix)
    print(f"[INFO] Diagonal Theta with blocks {theta.block_sizes}")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# op
def cmd_op_apply(args, config: RunConfig, report: ReportEnvelope):
    T = _operator(args)
    B = blaschke_from_descriptor(load_json(_required(args, "blaschke")))
    result = apply_blaschke(T, B)
    report.residuals["norm"] = result.norm
    report.verdicts["annihilates"] = result.norm <= ANNIHILATION_TOL
    report.data["operator"] = matrix_to_descriptor(result.matrix)
    print(f"[INFO] ||B(T)|| = {result.norm:.6g}")


def cmd_op_defects(args, config: RunConfig, report: ReportEnvelope):
    result = defects(_operator(args), config.rank_tol)
    report.verdicts["d_T"] = result.d_T
    report.verdicts["d_T_star"] = result.d_T_star
    report.verdicts["unitary"] = result.is_unitary
    report.tables["singular_values"] = [
        {"index": i + 1, "defect": float(s), "defect_star": float(t)}
        for i, (s, t) in enumerate(zip(result.singular_values, result.singular_values_star))
    ]
    print(f"[INFO] Defect indices d_T = {result.d_T}, d_T* = {result.d_T_star}")


def cmd_op_multiplicity(args, config: RunConfig, report: ReportEnvelope):
    result = multiplicity(_operator(args), config.rank_tol)
    report.verdicts["mu"] = result.mu
    report.tables["clusters"] = [
        {"centre": c.centre, "size": len(c.members), "weyr": c.weyr, "blocks": c.blocks} for c in result.clusters
    ]
    print(f"[INFO] Multiplicity mu_T = {result.mu}")


def cmd_op_triangulate(args, config: RunConfig, report: ReportEnvelope):
    T = _operator(args)
    factors = _blaschke_list(_required(args, "factors"))
    result = triangulate(T, factors, config.rank_tol)
    for n, r in enumerate(result.residuals):
        report.certify(f"annihilation_block_{n + 1}", r, ANNIHILATION_TOL)
    report.certify("reassembly", float(np.linalg.norm(result.reassemble() - T.matrix, 2)), 1e-8 * max(1.0, T.norm))
    report.residuals["lower_blocks"] = result.lower_residual
    report.verdicts["block_sizes"] = result.block_sizes
    report.data["basis"] = result.basis
    report.data["conjugated"] = result.conjugated
    print(f"[INFO] Triangulated into blocks {result.block_sizes}")


def cmd_op_jordan_model(args, config: RunConfig, report: ReportEnvelope):
    T = _operator(args)
    zeros = zeros_from_descriptor(load_json(_required(args, "zeros")))
    result = jordan_model(T, zeros, config.rank_tol, _grid(config))
    cert = result.certificate
    report.certify("intertwining", cert.residual, LIFT_TOL * max(1.0, cert.norm))
    report.certify_lower("invertible", cert.sigma_min, config.rank_tol)
    report.residuals["annihilation"] = result.annihilation_residual
    report.residuals["condition"] = cert.condition
    report.verdicts["zero_sets"] = result.zero_sets
    report.tables["eigenspaces"] = [{"zero": lam, "dimension": k} for lam, k in result.eigenspace_dims.items()]
    report.data["model"] = matrix_to_descriptor(result.model)
    report.data["intertwiner"] = matrix_to_descriptor(result.intertwiner)
    print(f"[INFO] Jordan model with {len(result.zero_sets)} blocks, condition {cert.condition:.4g}")


def cmd_op_similar_fd(args, config: RunConfig, report: ReportEnvelope):
    T = _operator(args)
    factors = _blaschke_list(_required(args, "factors"))
    result = similar_to_finite_defect(T, factors, config.rank_tol, _grid(config))
    cert = result.certificate
    report.certify("intertwining", cert.residual, LIFT_TOL * max(1.0, cert.norm))
    report.certify_lower("invertible", cert.sigma_min, config.rank_tol)
    report.residuals.update(result.residuals)
    report.residuals["condition"] = cert.condition
    report.verdicts["d_R"] = result.defects.d_T
    report.verdicts["d_R_star"] = result.defects.d_T_star
    report.verdicts["block_sizes"] = result.block_sizes
    report.data["R"] = matrix_to_descriptor(result.R.matrix)
    report.data["intertwiner"] = cert.X
    print(f"[INFO] Finite-defect model: d_R = {result.defects.d_T}, d_R* = {result.defects.d_T_star}")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# decompose
def _subspace_rows(subspaces):
    return [
        {
            "subspace": s.index + 1,
            "lower_bound": s.lower_bound,
            "intertwining_residual": s.intertwining_residual,
            "structure_residual": s.structure_residual,
            "lower_rows": max(s.lower_rows, default=0.0),
        }
        for s in subspaces
    ]


def _build(args, config: RunConfig, report: ReportEnvelope):
    pair = _pair(args, config)
    subspaces = build_shift_subspaces(pair, config.trunc, config.seed, tol=LOWER_BOUND_TOL,
                                      exclude_cells=config.exclude_cells)
    report.certify("theta_isometry", pair.theta_certificate, config.tol_inner)
    report.certify("phi_coisometry", pair.phi_certificate, config.tol_inner)
    report.certify("phi_theta", pair.annihilation, config.tol_inner)
    for s in subspaces:
        report.certify_lower(f"lower_bound_{s.index + 1}", s.lower_bound, 1 - LOWER_BOUND_TOL)
        report.certify(f"intertwining_{s.index + 1}", s.intertwining_residual, INTERTWINING_TOL, gating=False)
    report.tables["subspaces"] = _subspace_rows(subspaces)
    return pair, subspaces


def cmd_decompose_build(args, config: RunConfig, report: ReportEnvelope):
    _, subspaces = _build(args, config, report)
    print(f"[INFO] Built {len(subspaces)} shift-type subspaces at truncation degree {config.trunc}")


def cmd_decompose_vector(args, config: RunConfig, report: ReportEnvelope):
    pair, subspaces = _build(args, config, report)
    space = subspaces[0].space
    if getattr(args, "x", None):
        x = _window_vector(load_json(args.x), space)
    else:
        print("[INFO] No --x given, decomposing the first basis vector of the model space")
        x = model_basis_vector(pair.theta, space, 0)
    result = decompose_vector(x, subspaces, config.rank_tol)

    report.certify("decomposition", result.residual, DECOMPOSE_TOL * max(1.0, float(np.linalg.norm(x))))
    report.certify("model_membership", result.membership_residual, MEMBERSHIP_TOL * max(1.0, float(np.linalg.norm(x))),
                   gating=False)
    report.residuals.update({
        "constructive": result.constructive_residual,
        "lstsq": result.lstsq_residual,
        "full_resolution": result.full_residual,
    })
    report.verdicts["method"] = result.method
    report.verdicts["component_norms"] = result.component_norms
    report.data["components"] = result.components

    degrees = getattr(args, "degrees", None)
    if degrees:
        support = np.flatnonzero(np.any(np.abs(x) > 1e-12 * max(1.0, float(np.linalg.norm(x))), axis=0))
        width = int(support[-1]) + 1 if support.size else 1
        if width > min(degrees):
            raise InputError(f"x has degree {width}, above the smallest convergence degree {min(degrees)}")
        report.tables["convergence"] = convergence_table(pair, x[:, :width], degrees, config.seed, config.rank_tol)
    print(f"[INFO] Decomposition residual {result.residual:.3e} via {result.method}")


def cmd_decompose_assemble(args, config: RunConfig, report: ReportEnvelope):
    _, subspaces = _build(args, config, report)
    result = assemble_from_subspaces(subspaces, config.rank_tol)
    cert = result.certificate
    report.certify("intertwining", cert.residual, INTERTWINING_TOL)
    report.certify_lower("injective", cert.sigma_min, config.rank_tol)
    report.residuals["condition"] = cert.condition
    report.verdicts["kernel_dimension"] = result.kernel_dimension
    report.verdicts["rank"] = result.rank
    # reported only; the truncated shift blurs the defect count
    report.verdicts["d_R"] = result.defects.d_T
    report.verdicts["d_R_star"] = result.defects.d_T_star

    uniqueness = unique_representation_check(subspaces, tol=config.rank_tol)
    report.verdicts["unique_representation"] = uniqueness.unique
    report.tables["angles"] = [{"pair": k, "min_angle": v} for k, v in uniqueness.min_angles.items()]
    print(f"[INFO] Assembled R of dimension {result.rank} from {result.subspace_count} subspaces")


def cmd_decompose_c0(args, config: RunConfig, report: ReportEnvelope):
    grid = _grid(config)
    thetas = _blaschke_list(_required(args, "blocks"))
    T = _operator(args)
    if getattr(args, "intertwiners", None):
        Y_blocks = [matrix_from_descriptor(d) if isinstance(d, dict) else np.array(
            [[complex(*v) if isinstance(v, list) else complex(v) for v in row] for row in d])
            for d in load_json(args.intertwiners)]
    else:
        Y_blocks = _random_intertwiners(thetas, T, config, grid)

    result = assemble_c0_similarity(thetas, Y_blocks, T, config.rank_tol, grid)
    cert = result.assembly.certificate
    report.certify("intertwining", cert.residual, INTERTWINING_TOL * max(1.0, cert.norm))
    report.certify_lower("injective", cert.sigma_min, config.rank_tol)
    report.certify("annihilation", result.annihilation_residual, config.tol_algebra)
    for n, lower in enumerate(result.lower_bounds, start=1):
        report.residuals[f"intertwiner_{n}_sigma_min"] = lower
    report.verdicts["M"] = result.M
    report.verdicts["N"] = result.N
    report.verdicts["M_le_N"] = result.M <= result.N
    report.data["R"] = matrix_to_descriptor(result.assembly.R.matrix)
    print(f"[INFO] C0 assembly: d_R* = {result.M} with {result.N} inner functions")


def _random_intertwiners(thetas, T, config: RunConfig, grid: BoundaryGrid):
    """Y_n = random element of {Y : Y S_n = T Y}, one seeded stream per block."""
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(len(thetas))]
    blocks = []
    for theta, rng in zip(thetas, rngs):
        S = compressed_shift(model_space(theta, grid)).matrix
        space = intertwiner_space(S, T, config.rank_tol)
        if space.dimension == 0:
            raise InputError(f"No nonzero Y with Y S = T Y for the block with zeros {list(theta.zeros)}")
        c = rng.standard_normal(space.dimension) + 1j * rng.standard_normal(space.dimension)
        blocks.append(np.tensordot(c, np.array(space.basis), axes=1))
    return blocks
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# demo
def cmd_demo_unicellular(args, config: RunConfig, report: ReportEnvelope):
    result = demo_unicellular(args.a1, args.a2, args.path_depth, _grid(config), config.exclude_cells)
    for name, check in result.checks.items():
        report.certify(name, check.value, check.tolerance, passed=check.passed)
    report.verdicts["a1"] = result.a1
    report.verdicts["a2"] = result.a2
    report.verdicts["decays_below_threshold"] = result.scan.decays_below_threshold
    report.tables["corona_scan"] = result.scan.rows()
    report.data["narrative"] = result.narrative
    print(f"[INFO] Corona scan running infimum {result.scan.running_infimum[-1]:.3e} at depth {args.path_depth}")
#-----------------------------------------------------------------------


COMMANDS: Dict[Tuple[str, str], Callable] = {
    ("blaschke", "eval"): cmd_blaschke_eval,
    ("blaschke", "carleson"): cmd_blaschke_carleson,
    ("outer", "build"): cmd_outer_build,
    ("psi", "build"): cmd_psi_build,
    ("model", "shift"): cmd_model_shift,
    ("model", "project"): cmd_model_project,
    ("theta", "example"): cmd_theta_example,
    ("theta", "diag"): cmd_theta_diag,
    ("op", "apply"): cmd_op_apply,
    ("op", "defects"): cmd_op_defects,
    ("op", "multiplicity"): cmd_op_multiplicity,
    ("op", "triangulate"): cmd_op_triangulate,
    ("op", "jordan-model"): cmd_op_jordan_model,
    ("op", "similar-fd"): cmd_op_similar_fd,
    ("decompose", "build"): cmd_decompose_build,
    ("decompose", "vector"): cmd_decompose_vector,
    ("decompose", "assemble"): cmd_decompose_assemble,
    ("decompose", "c0"): cmd_decompose_c0,
    ("demo", "unicellular"): cmd_demo_unicellular,
}


def run_command(group: str, action: str, args, config: RunConfig) -> ReportEnvelope:
    handler = COMMANDS.get((group, action))
    if handler is None:
        raise CommandLineError(f"Unknown command '{group} {action}'")
    report = ReportEnvelope(command=f"{group}-{action}", config=config.echo())
    logging.info(f"Running {group} {action} with grid {config.grid}, trunc {config.trunc}, seed {config.seed}")
    handler(args, config, report)
    return report
