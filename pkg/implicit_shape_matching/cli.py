"""
Command-line interface.

Subcommands
-----------
simulate
    Runs a scene and exports the trajectory as CSV.
check-derivatives
    Compares every analytic derivative with finite differences.
energy-report
    Prints energies and derivative summaries of the initial state.

Exit codes: 0 success, 1 malformed input, 2 solver failure, 3 failed check.
"""
import argparse
import logging
import sys
from logging import getLogger
from pathlib import Path
from typing import List
from typing import NoReturn
from typing import Optional
from typing import Union

from .data.access import PkgDataAccess
from .errors import InvertedOrDegenerate
from .errors import SceneError
from .errors import ShapeMatchingError
from .errors import StepFailure
from .integrator.config import SCHEMES
from .kinematics import covariance_asym
from .kinematics import polar_decompose
from .model import ShapeMatchingModel
from .scene import Scene
from .scene import random_scene
from .scene import read_scene
from .verification import REPORT_HEADER
from .verification import check_scene
from .verification import write_report

LOG = getLogger(__name__)

LOG_FORMAT = "[%(asctime)s %(levelname)s] %(message)s (%(name)s)"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors as malformed input."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="shape-matching",
        description="Implicit shape matching simulations and derivative checks.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress (-v) or numerical detail (-vv) to stderr",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="simulate a scene")
    simulate.add_argument("--scene", required=True, help="scene file or bundled name")
    simulate.add_argument("--out", required=True, type=Path, help="trajectory CSV")
    simulate.add_argument("--steps", type=int, default=100)
    simulate.add_argument("--stride", type=int, default=1)
    simulate.add_argument("--scheme", choices=SCHEMES, default=None)
    simulate.add_argument("--gauss-newton", action="store_true", default=False)

    check = commands.add_parser("check-derivatives", help="verify derivatives")
    source = check.add_mutually_exclusive_group(required=True)
    source.add_argument("--scene", help="scene file or bundled name")
    source.add_argument(
        "--random",
        nargs=3,
        type=int,
        metavar=("N", "DIM", "SEED"),
        help="procedural scene of N particles in DIM dimensions",
    )
    check.add_argument("--out", type=Path, default=None, help="report file")

    report = commands.add_parser("energy-report", help="report energies")
    report.add_argument("--scene", required=True, help="scene file or bundled name")
    report.add_argument("--gauss-newton", action="store_true", default=False)
    return parser


def resolve_scene(source: str) -> Scene:
    """Reads a scene file, or a bundled scene if no such file exists."""
    path = Path(source)
    if path.is_file():
        return read_scene(path)
    if source in PkgDataAccess.list_scenes():
        return PkgDataAccess.load_scene(source)
    raise SceneError("--scene", f"no scene file or bundled scene named '{source}'")


def _fail(code: int, err: Union[str, BaseException]) -> int:
    print(f"shape-matching: error: {err}", file=sys.stderr)
    return code


# Subcommands -----------------------------------------------------------------
def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        scene = resolve_scene(args.scene)
        model = ShapeMatchingModel(
            scene, scheme=args.scheme, gauss_newton=args.gauss_newton
        )
    except (SceneError, OSError) as err:
        return _fail(EXIT_INPUT, err)
    try:
        model.simulate(args.steps, args.stride)
    except StepFailure as err:
        return _fail(EXIT_SOLVER, err)
    except ValueError as err:
        return _fail(EXIT_INPUT, err)
    try:
        model.export(args.out)
    except OSError as err:
        return _fail(EXIT_INPUT, err)
    print(model.summary())
    return EXIT_OK


def cmd_check_derivatives(args: argparse.Namespace) -> int:
    try:
        if args.random is not None:
            n, dim, seed = args.random
            scene = random_scene(n, dim, seed)
        else:
            scene = resolve_scene(args.scene)
    except (ValueError, OSError) as err:
        return _fail(EXIT_INPUT, err)
    try:
        polar_decompose(covariance_asym(scene.initial, scene.shape))
    except InvertedOrDegenerate as err:
        return _fail(EXIT_INPUT, f"initial state of '{scene.name}': {err}")
    results = check_scene(scene)
    if args.out is None:
        print(REPORT_HEADER)
        for result in results:
            print(result.line())
    else:
        try:
            write_report(results, args.out)
        except OSError as err:
            return _fail(EXIT_INPUT, err)
    failed = [result.name for result in results if result.failed]
    if failed:
        LOG.warning("Failed checks: %s", ", ".join(failed))
        return EXIT_CHECK
    return EXIT_OK


def cmd_energy_report(args: argparse.Namespace) -> int:
    try:
        model = ShapeMatchingModel(
            resolve_scene(args.scene), gauss_newton=args.gauss_newton
        )
    except (SceneError, OSError) as err:
        return _fail(EXIT_INPUT, err)
    try:
        report = model.energy_report()
    except ShapeMatchingError as err:
        return _fail(EXIT_SOLVER, err)
    for key, value in report.items():
        print(f"{key}={value!r}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "check-derivatives": cmd_check_derivatives,
    "energy-report": cmd_energy_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the 'shape-matching' command.

    Parameters
    ----------
    argv : Optional[List[str]]
        Arguments without the program name, `sys.argv[1:]` if None.

    Returns
    -------
    int
        The exit code.

    """
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(format=LOG_FORMAT, level=level)
    return COMMANDS[args.command](args)
