#-----------------------------------------------------------------------------------------
# Purpose: Command-line entry point of MSL-Lab
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-09
#-----------------------------------------------------------------------------------------

import sys
import argparse
import logging
import traceback
from typing import List, Optional

from MSL_Utils.Utils import utils
from MSL_Utils.Exceptions import CertificateError, CommandLineError, InputError, MSLError
from MSL_Operations.Operation_Setting import load_run_config
from MSL_Operations.Operation_Commands import run_command
from MSL_Operations.Operation_Report import write_report

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERTIFICATE = 2


#-----------------------------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting with status 2."""

    def error(self, message):
        raise CommandLineError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid", type=int, help="Boundary grid size G (power of two)")
    common.add_argument("--trunc", type=int, help="Truncation degree K")
    common.add_argument("--tol", type=float, help="Inner-function tolerance")
    common.add_argument("--rank-tol", type=float, help="Singular value cut for rank decisions")
    common.add_argument("--seed", type=int, help="Base seed of all random stages")
    common.add_argument("--out", help="Report path; default is usr/MSL-Lab/Results/<command>_<timestamp>.json")
    common.add_argument("--xlsx", action="store_true", default=None, help="Also write tables as an xlsx workbook")
    common.add_argument("-v", "--verbose", action="store_true", help="Log at INFO level")
    return common


# (group, action, [(flag, kwargs), ...])
COMMAND_OPTIONS = [
    ("blaschke", "eval", [("--zeros", {}), ("--points", {})]),
    ("blaschke", "carleson", [("--zeros", {})]),
    ("outer", "build", [("--modulus", {}), ("--points", {})]),
    ("psi", "build", [("--column", {})]),
    ("model", "shift", [("--zeros", {})]),
    ("model", "project", [("--theta", {}), ("--x", {})]),
    ("theta", "example", [("--theta1", {}), ("--theta2", {}),
                          ("--a1", {"type": float, "default": 1.0}), ("--a2", {"type": float, "default": 1.0})]),
    ("theta", "diag", [("--blocks", {}), ("--nested", {"action": "store_true"})]),
    ("op", "apply", [("--operator", {}), ("--blaschke", {})]),
    ("op", "defects", [("--operator", {})]),
    ("op", "multiplicity", [("--operator", {})]),
    ("op", "triangulate", [("--operator", {}), ("--factors", {})]),
    ("op", "jordan-model", [("--operator", {}), ("--zeros", {})]),
    ("op", "similar-fd", [("--operator", {}), ("--factors", {})]),
    ("decompose", "build", [("--theta", {}), ("--phi", {})]),
    ("decompose", "vector", [("--theta", {}), ("--phi", {}), ("--x", {}),
                             ("--degrees", {"type": int, "nargs": "+"})]),
    ("decompose", "assemble", [("--theta", {}), ("--phi", {})]),
    ("decompose", "c0", [("--blocks", {}), ("--operator", {}), ("--intertwiners", {})]),
    ("demo", "unicellular", [("--a1", {"type": float, "default": 1.0}), ("--a2", {"type": float, "default": 1.0}),
                             ("--path-depth", {"type": int, "default": 20})]),
]


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="msl", description="Desk-scale constructive operator theory on the unit disc")
    groups = parser.add_subparsers(dest="group", parser_class=_Parser)
    actions = {}
    for group, action, options in COMMAND_OPTIONS:
        if group not in actions:
            actions[group] = groups.add_parser(group).add_subparsers(dest="action", parser_class=_Parser)
        sub = actions[group].add_parser(action, parents=[common])
        for flag, kwargs in options:
            sub.add_argument(flag, **kwargs)
    return parser
#-----------------------------------------------------------------------------------------


#-----------------------------------------------------------------------------------------
def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if not args.group or not getattr(args, "action", None):
            raise CommandLineError("usage: msl <group> <action> [options]")
        utils.setup_logging(args.verbose)

        config = load_run_config({
            "grid": args.grid,
            "trunc": args.trunc,
            "tol_inner": args.tol,
            "rank_tol": args.rank_tol,
            "seed": args.seed,
            "out": args.out,
            "write_xlsx": args.xlsx,
        })
        report = run_command(args.group, args.action, args, config)
        paths = write_report(report, config.out, config.results_dir, config.write_xlsx)
        for path in paths:
            print(f"[INFO] Written {path}")

        failed = report.failed_gates
        if failed:
            print(f"[WARN] Certificates failed: {', '.join(failed)}")
            return EXIT_CERTIFICATE
        return EXIT_OK

    except InputError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        logging.error(str(e))
        return EXIT_INPUT
    except CertificateError as e:
        print(f"[ERROR] Certificate failed: {e}", file=sys.stderr)
        logging.error(str(e))
        return EXIT_CERTIFICATE
    except MSLError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        logging.error(traceback.format_exc())
        return e.exit_code


if __name__ == '__main__':
    sys.exit(dispatch())
#-----------------------------------------------------------------------------------------
