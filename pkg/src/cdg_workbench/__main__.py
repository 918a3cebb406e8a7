"""
Main entry point for the workbench command line.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from cdg_workbench.logger import TRACE_LEVEL

# Global logger for this module, configured in main or _configure_logging
logger = logging.getLogger(__name__)

EXIT_ASSERTION = 1
EXIT_USAGE = 2

COMMAND_HELP = {
    "validate": "Parse and validate an algebra, module or morphism document",
    "cohomology": "Cohomology of a module whose predifferential squares to zero",
    "gr": "Associated graded pieces of the t-adic or K-filtration",
    "acyclic": "n-acyclicity through both filtrations",
    "hom": "Hom complex between two modules",
    "gamma": "Emit the generator Γ_i",
    "gn": "Emit the generator G_n",
    "mi": "The complex (M)_i and the duality isomorphisms",
    "tria": "Triangle Ker t[1] → (M)_i → quotient with comparison objects",
    "lq": "Left derived functors of Coker t",
    "rk": "Right derived functors of Ker t",
    "semider": "Semiderived membership verdict",
    "resolve": "Staged n-semifree resolution",
    "cocell": "Staged cocell resolution",
    "rnfree": "Windowed R_n-free (or cofree) resolution",
    "fibration": "Fibration predicate for a morphism document",
    "gluing": "Gluing bimodule for n = 1",
    "profile": "Filtration profiles and semiorthogonal membership",
    "fuzz": "Property battery over random modules",
}


def _setup_arg_parser() -> argparse.ArgumentParser:
    """Sets up and returns the main argument parser."""
    parser = argparse.ArgumentParser(
        description="Exact verification workbench for curved dg deformations"
    )
    parser.add_argument("command", choices=sorted(COMMAND_HELP), help="Command to run")
    parser.add_argument("path", nargs="?", help="Input document (algebra, module or morphism)")
    parser.add_argument("--target", help="Second module document (hom)")
    parser.add_argument("--i", type=int, help="Generator or functor index")
    parser.add_argument(
        "--kind", choices=["t-adic", "K"], default="t-adic", help="Filtration (default: t-adic)"
    )
    parser.add_argument("--cutoff", type=int, default=4, help="Largest derived index (default: 4)")
    parser.add_argument("--catalog", help="Use a catalog algebra instead of a document")
    parser.add_argument("--order", type=int, default=1, help="Order n of a catalog algebra")
    parser.add_argument("--margin", type=int, help="Extra stages used for window stability")
    parser.add_argument(
        "--strict", action="store_true", help="Fail on window degrees that are not stable"
    )
    parser.add_argument(
        "--cofree", action="store_true", help="rnfree: resolve on the cofree side"
    )
    parser.add_argument(
        "--field", default="fp:32003", help="Coefficient field: q or fp:P (default: fp:32003)"
    )
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument("--count", type=int, default=100, help="Fuzz instances (default: 100)")
    parser.add_argument("--window", default="-4:4", help="Degree window d0:d1 (default: -4:4)")
    parser.add_argument("--stages", type=int, default=3, help="Resolution stages (default: 3)")
    parser.add_argument(
        "--format", choices=["human", "json"], default="human", help="Report format"
    )
    parser.add_argument("--out", help="Write the report to this path instead of stdout")
    parser.add_argument(
        "--log-file",
        default="logs/workbench.log",
        help="Path to log file (default: logs/workbench.log)",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level (default: INFO).",
    )
    return parser


def _configure_logging(log_file: str, log_level_str: str) -> None:
    """Configures logging for the application."""
    log_dir = os.path.dirname(log_file)
    if log_dir and not os.path.exists(log_dir):
        os.makedirs(log_dir)

    level = log_level_str.upper()
    log_level_val = TRACE_LEVEL if level == "TRACE" else getattr(logging, level, logging.INFO)

    logging.basicConfig(
        filename=log_file,
        level=log_level_val,
        format="%(asctime)s - %(levelname)s - %(message)s",
        filemode="a",
    )
    logger.debug("Logging configured.")


def _emit(text: str, out: Optional[str]) -> None:
    if not out:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out_dir = os.path.dirname(out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one workbench command and return its exit code."""
    parser = _setup_arg_parser()
    args = parser.parse_args(argv)

    _configure_logging(args.log_file, args.log_level)

    # Import here, after logging is configured
    from cdg_workbench.errors import EquivalenceViolation, WorkbenchError
    from cdg_workbench.workbench_cli import WorkbenchConfig, run

    try:
        config = WorkbenchConfig.from_args(args)
        report = run(args.command, config, args)
    except EquivalenceViolation as exc:
        logger.error("internal equivalence violated: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSERTION
    except WorkbenchError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _emit(report.render(config.output_format), config.out)
    return report.exit_code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception:
        os.makedirs("logs", exist_ok=True)
        logging.basicConfig(  # Fallback basicConfig
            filename="logs/workbench_unhandled_error.log",
            level="ERROR",
            format="%(asctime)s - %(levelname)s - %(message)s",
            filemode="a",
            force=True,
        )
        logger.exception("Unhandled exception in workbench main execution")
        raise
