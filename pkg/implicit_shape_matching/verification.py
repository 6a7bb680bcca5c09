"""
Finite-difference verification of every analytic derivative.

Each check compares an analytic derivative with a central difference of the
quantity it differentiates and yields one `CheckResult`. Checks of the
rotation branch are skipped when gamma = 1, where the energy does not depend
on the rotation.
"""
from dataclasses import dataclass
from logging import getLogger
from pathlib import Path
from typing import Callable
from typing import List
from typing import Union

import numpy as np

from .energy.damping import damping_energy
from .energy.damping import damping_force
from .energy.damping import damping_position_hessian
from .energy.damping import damping_velocity_hessian
from .energy.params import EnergyParams
from .energy.potential import energy
from .energy.potential import gradient
from .energy.potential import hessian
from .energy.total import total_force
from .energy.total import total_position_hessian
from .errors import ShapeMatchingError
from .kinematics.algebra import cross
from .kinematics.polar import polar_decompose
from .kinematics.shape import KinematicState
from .kinematics.shape import RestShape
from .kinematics.shape import covariance_asym
from .oracle.compare import DEFAULT_ABS_FLOOR
from .oracle.compare import compare
from .oracle.difference import FdConfig
from .oracle.difference import fd_gradient
from .oracle.difference import fd_jacobian
from .rotation.first import GFactor
from .rotation.first import omega_first
from .rotation.second import omega_rate
from .scene import Scene

LOG = getLogger(__name__)

REPORT_HEADER = "name,max_error,tolerance,status"

FIRST_ORDER_FLOOR = 1e-7
SECOND_ORDER_FLOOR = 1e-6

FIRST_ORDER_STEP = FdConfig(step=1e-5)
SECOND_ORDER_STEP = FdConfig(step=1e-4)

TOLERANCES = {
    "gradient": 1e-6,
    "hessian": 1e-5,
    "hessian_symmetry": 1e-8,
    "omega_first": 1e-6,
    "omega_second": 1e-5,
    "omega_exchange": 1e-8,
    "g_closed_form": 1e-13,
    "damping_force": 1e-7,
    "damping_velocity_hessian": 1e-6,
    "damping_position_hessian": 1e-4,
    "total_position_hessian": 1e-4,
}


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one derivative check.

    Attributes
    ----------
    name : str
        Check name.
    max_error : float
        Largest error found, NaN for skipped checks.
    tolerance : float
        Accepted error.
    status : str
        'pass', 'fail' or 'skipped'.
    """

    name: str
    max_error: float
    tolerance: float
    status: str

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def line(self) -> str:
        return f"{self.name},{self.max_error!r},{self.tolerance!r},{self.status}"


class _Problem:
    """Flat-coordinate views of one configuration."""

    def __init__(
        self, state: KinematicState, shape: RestShape, params: EnergyParams
    ) -> None:
        self.state = state
        self.shape = shape
        self.params = params
        self.x = state.positions.reshape(-1)
        self.v = state.velocities.reshape(-1)

    def at(self, x: np.ndarray) -> KinematicState:
        return KinematicState(
            x.reshape(self.state.positions.shape), self.state.velocities
        )

    def moving(self, v: np.ndarray) -> KinematicState:
        return KinematicState(
            self.state.positions, v.reshape(self.state.velocities.shape)
        )

    def unit(self, l: int, s: int) -> np.ndarray:
        direction = np.zeros_like(self.state.positions)
        direction[l, s] = 1.0
        return direction


def _judge(
    name: str,
    analytic: np.ndarray,
    numeric: np.ndarray,
    floor_ratio: float,
    floor_min: float = DEFAULT_ABS_FLOOR,
) -> CheckResult:
    scale = max(float(np.max(np.abs(analytic))), float(np.max(np.abs(numeric))))
    floor = max(floor_ratio * scale, floor_min)
    tolerance = TOLERANCES[name]
    report = compare(analytic, numeric, tolerance, abs_floor=floor)
    return CheckResult(
        name, report.max_error, tolerance, "pass" if report.passed else "fail"
    )


# Energy ----------------------------------------------------------------------
def check_gradient(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = gradient(problem.state, shape, params).gradient.reshape(-1)
    numeric = fd_gradient(
        lambda x: energy(problem.at(x), shape, params), problem.x, FIRST_ORDER_STEP
    )
    return _judge("gradient", analytic, numeric, FIRST_ORDER_FLOOR)


def check_hessian(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = hessian(problem.state, shape, params).matrix
    numeric = fd_jacobian(
        lambda x: gradient(problem.at(x), shape, params).gradient.reshape(-1),
        problem.x,
        SECOND_ORDER_STEP,
    )
    return _judge("hessian", analytic, numeric, SECOND_ORDER_FLOOR)


def check_hessian_symmetry(problem: _Problem) -> CheckResult:
    asymmetry = hessian(problem.state, problem.shape, problem.params).asymmetry()
    tolerance = TOLERANCES["hessian_symmetry"]
    status = "pass" if asymmetry <= tolerance else "fail"
    return CheckResult("hessian_symmetry", asymmetry, tolerance, status)


# Rotation --------------------------------------------------------------------
def check_omega_first(problem: _Problem) -> CheckResult:
    shape = problem.shape
    d, n = shape.dim, shape.n_particles
    polar = polar_decompose(covariance_asym(problem.state, shape))
    omega = omega_first(shape, polar)
    analytic = np.einsum("ijpq,qr->prij", omega.matrices, polar.r_mat).reshape(
        d * d, n * d
    )
    numeric = fd_jacobian(
        lambda x: polar_decompose(covariance_asym(problem.at(x), shape)).r_mat,
        problem.x,
        FIRST_ORDER_STEP,
    )
    return _judge("omega_first", analytic, numeric, FIRST_ORDER_FLOOR)


def _second_table(problem: _Problem) -> np.ndarray:
    """w_{ls,ij} for all index pairs, axes (l, s, i, j[, k])."""
    shape = problem.shape
    polar = polar_decompose(covariance_asym(problem.state, shape))
    factor = GFactor(polar)
    omega = omega_first(shape, polar, factor)
    n, d = shape.n_particles, shape.dim
    rows = [
        omega_rate(shape, polar, omega, problem.unit(l, s), factor)
        for l in range(n)
        for s in range(d)
    ]
    return np.stack(rows).reshape((n, d) + omega.vectors.shape)


def check_omega_second(problem: _Problem) -> CheckResult:
    shape = problem.shape
    table = _second_table(problem)
    n, d = shape.n_particles, shape.dim
    analytic = np.moveaxis(table.reshape((n * d,) + table.shape[2:]), 0, -1)
    analytic = analytic.reshape(-1, n * d)

    def first(x: np.ndarray) -> np.ndarray:
        polar = polar_decompose(covariance_asym(problem.at(x), shape))
        return omega_first(shape, polar).vectors

    numeric = fd_jacobian(first, problem.x, FIRST_ORDER_STEP)
    return _judge("omega_second", analytic, numeric, SECOND_ORDER_FLOOR)


def check_omega_exchange(problem: _Problem) -> CheckResult:
    shape = problem.shape
    d = shape.dim
    table = _second_table(problem)
    polar = polar_decompose(covariance_asym(problem.state, shape))
    vectors = omega_first(shape, polar).vectors
    swapped = np.swapaxes(np.swapaxes(table, 0, 2), 1, 3)
    if d == 3:
        expected = cross(vectors[:, :, None, None, :], vectors[None, None], d)
    else:
        expected = np.zeros_like(table)
    residual = table - swapped - expected
    scale = max(float(np.max(np.abs(table))), np.finfo(float).tiny)
    error = float(np.max(np.abs(residual))) / scale
    tolerance = TOLERANCES["omega_exchange"]
    return CheckResult(
        "omega_exchange", error, tolerance, "pass" if error <= tolerance else "fail"
    )


def check_g_closed_form(problem: _Problem) -> CheckResult:
    shape = problem.shape
    polar = polar_decompose(covariance_asym(problem.state, shape))
    factor = GFactor(polar)
    omega = omega_first(shape, polar, factor)
    rhs = omega.vectors * polar.trace
    closed = factor.solve(rhs, closed_form=True)
    generic = factor.solve(rhs, closed_form=False)
    return _judge(
        "g_closed_form", closed, generic, 0.0, np.finfo(float).tiny
    )


# Damping ---------------------------------------------------------------------
def check_damping_force(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = damping_force(problem.state, shape, params).reshape(-1)
    numeric = fd_gradient(
        lambda v: damping_energy(problem.moving(v), shape, params)[2],
        problem.v,
        FIRST_ORDER_STEP,
    )
    return _judge("damping_force", analytic, numeric, FIRST_ORDER_FLOOR)


def check_damping_velocity_hessian(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = damping_velocity_hessian(problem.state, shape, params).matrix
    numeric = fd_jacobian(
        lambda v: damping_force(problem.moving(v), shape, params),
        problem.v,
        FIRST_ORDER_STEP,
    )
    return _judge(
        "damping_velocity_hessian", analytic, numeric, SECOND_ORDER_FLOOR
    )


def check_damping_position_hessian(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = damping_position_hessian(problem.state, shape, params).matrix
    numeric = fd_jacobian(
        lambda x: damping_force(problem.at(x), shape, params),
        problem.x,
        FIRST_ORDER_STEP,
    )
    return _judge(
        "damping_position_hessian", analytic, numeric, SECOND_ORDER_FLOOR
    )


def check_total_position_hessian(problem: _Problem) -> CheckResult:
    shape, params = problem.shape, problem.params
    analytic = total_position_hessian(problem.state, shape, params).matrix
    numeric = fd_jacobian(
        lambda x: total_force(problem.at(x), shape, params),
        problem.x,
        FIRST_ORDER_STEP,
    )
    return _judge(
        "total_position_hessian", analytic, numeric, SECOND_ORDER_FLOOR
    )


Check = Callable[[_Problem], CheckResult]

ENERGY_CHECKS = (check_gradient, check_hessian, check_hessian_symmetry)
ROTATION_CHECKS = (
    check_omega_first,
    check_omega_second,
    check_omega_exchange,
    check_damping_position_hessian,
)
DAMPING_CHECKS = (check_damping_force, check_damping_velocity_hessian)
COUPLED_CHECKS = (check_total_position_hessian,)


def _skipped(check: Check) -> CheckResult:
    name = check.__name__[len("check_") :]
    return CheckResult(name, float("nan"), TOLERANCES[name], "skipped")


def _run(check: Check, problem: _Problem) -> CheckResult:
    name = check.__name__[len("check_") :]
    try:
        result = check(problem)
    except ShapeMatchingError as err:
        LOG.warning("Check '%s' could not be evaluated: %s", name, err)
        return CheckResult(name, float("inf"), TOLERANCES[name], "fail")
    log = LOG.warning if result.failed else LOG.info
    log(
        "Check %s: %s (error %.3e, tolerance %.1e)",
        name,
        result.status,
        result.max_error,
        result.tolerance,
    )
    return result


def run_checks(
    state: KinematicState, shape: RestShape, params: EnergyParams
) -> List[CheckResult]:
    """
    Runs every derivative check on one configuration.

    Parameters
    ----------
    state : KinematicState
        Positions and velocities to check at.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.

    Returns
    -------
    List[CheckResult]
        One result per check, in a fixed order. Rotation checks are skipped
        for gamma = 1 and the closed-form G check outside 2D.

    """
    state.check_against(shape)
    problem = _Problem(state, shape, params)
    results = [_run(check, problem) for check in ENERGY_CHECKS]
    for check in ROTATION_CHECKS:
        if params.is_linear:
            results.append(_skipped(check))
        else:
            results.append(_run(check, problem))
    if shape.dim == 2 and not params.is_linear:
        results.append(_run(check_g_closed_form, problem))
    else:
        results.append(_skipped(check_g_closed_form))
    results.extend(_run(check, problem) for check in DAMPING_CHECKS + COUPLED_CHECKS)
    return results


def check_scene(scene: Scene) -> List[CheckResult]:
    """Runs every derivative check on the initial state of a scene."""
    LOG.info("Checking derivatives of scene '%s' ...", scene.name)
    return run_checks(scene.initial, scene.shape, scene.params)


def write_report(results: List[CheckResult], file_path: Union[str, Path]) -> None:
    """Writes one CSV line per check below the header."""
    lines = [REPORT_HEADER] + [result.line() for result in results]
    Path(file_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
