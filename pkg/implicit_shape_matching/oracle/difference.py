"""
Finite-difference differentiation of flat-vector functions.

The oracle only evaluates the functions it is handed. It never imports the
analytic derivative code, so a comparison against it is independent of the
paths it checks.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Callable
from typing import NamedTuple

import numpy as np

from ..errors import OracleEvalFailure
from ..errors import ShapeMatchingError

LOG = getLogger(__name__)

ScalarFunction = Callable[[np.ndarray], float]
VectorFunction = Callable[[np.ndarray], np.ndarray]

# Coordinate reported when the unperturbed evaluation fails.
BASE_POINT = -1

_EVAL_ERRORS = (ShapeMatchingError, ArithmeticError, ValueError)


@dataclass(frozen=True)
class FdConfig:
    """
    Finite-difference settings.

    Attributes
    ----------
    step : float
        Base step h, scaled by max(1, |x|_inf) at the evaluation point, by
        default 1e-5.
    scheme : str
        'central' (error O(h^2), default) or 'forward' (error O(h)).
    richardson : bool
        Apply one level of Richardson extrapolation with steps h and h/2.
    """

    step: float = 1e-5
    scheme: str = "central"
    richardson: bool = False

    def __post_init__(self) -> None:
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"Step must be positive and finite, got {self.step}.")
        if self.scheme not in ("central", "forward"):
            raise ValueError(
                f"Unknown scheme '{self.scheme}', expected 'central' or 'forward'."
            )

    @property
    def order(self) -> int:
        return 2 if self.scheme == "central" else 1

    def scaled_step(self, x: np.ndarray) -> float:
        scale = float(np.max(np.abs(x))) if x.size else 0.0
        return self.step * max(1.0, scale)


class FdHessian(NamedTuple):
    """Symmetrized finite-difference Hessian and the asymmetry it removed."""

    matrix: np.ndarray
    asymmetry: float


def _evaluate(f: Callable, x: np.ndarray, coordinate: int) -> np.ndarray:
    try:
        value = np.asarray(f(x), dtype=np.float64)
    except OracleEvalFailure:
        raise
    except _EVAL_ERRORS as err:
        raise OracleEvalFailure(coordinate, err) from err
    if not np.all(np.isfinite(value)):
        raise OracleEvalFailure(
            coordinate, FloatingPointError("non-finite function value")
        )
    return value


def _difference(f: Callable, x: np.ndarray, h: float, scheme: str) -> np.ndarray:
    base = None if scheme == "central" else _evaluate(f, x, BASE_POINT)
    columns = []
    for k in range(x.size):
        shifted = x.copy()
        shifted[k] = x[k] + h
        upper = _evaluate(f, shifted, k)
        if scheme == "central":
            shifted[k] = x[k] - h
            lower = _evaluate(f, shifted, k)
            columns.append((upper - lower) / (2.0 * h))
        else:
            columns.append((upper - base) / h)
    return np.stack(columns, axis=-1)


def _derivative(f: Callable, x: np.ndarray, cfg: FdConfig) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    h = cfg.scaled_step(x)
    coarse = _difference(f, x, h, cfg.scheme)
    if not cfg.richardson:
        return coarse
    fine = _difference(f, x, 0.5 * h, cfg.scheme)
    weight = 2.0**cfg.order
    return (weight * fine - coarse) / (weight - 1.0)


def fd_gradient(
    f: ScalarFunction, x: np.ndarray, cfg: FdConfig = FdConfig()
) -> np.ndarray:
    """
    Finite-difference gradient

    Parameters
    ----------
    f : Callable[[np.ndarray], float]
        Scalar function of flat coordinates.
    x : np.ndarray
        Evaluation point.
    cfg : FdConfig
        Step and scheme.

    Returns
    -------
    np.ndarray
        Gradient with the size of `x`.

    Raises
    ------
    OracleEvalFailure
        If an evaluation fails or returns a non-finite value; the exception
        names the perturbed coordinate.

    """
    return _derivative(f, x, cfg).reshape(-1)


def fd_jacobian(
    f: VectorFunction, x: np.ndarray, cfg: FdConfig = FdConfig()
) -> np.ndarray:
    """
    Finite-difference Jacobian

    Column k holds the derivative of the flattened output of `f` with respect
    to coordinate k.

    """
    return _derivative(f, x, cfg).reshape(-1, np.size(x))


def fd_hessian(
    f: ScalarFunction, x: np.ndarray, cfg: FdConfig = FdConfig()
) -> FdHessian:
    """
    Finite-difference Hessian

    Differentiates the finite-difference gradient (inner step from `cfg`) a
    second time with the larger outer step h^(2/3) max(1, |x|_inf), which
    balances the truncation error of the outer difference against the noise
    of the inner one. The result is symmetrized.

    Parameters
    ----------
    f : Callable[[np.ndarray], float]
        Scalar function of flat coordinates.
    x : np.ndarray
        Evaluation point.
    cfg : FdConfig
        Inner step and scheme.

    Returns
    -------
    FdHessian
        The symmetrized matrix and the Frobenius norm of its antisymmetric
        part before symmetrization.

    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    outer = FdConfig(
        step=cfg.step ** (2.0 / 3.0), scheme=cfg.scheme, richardson=cfg.richardson
    )
    raw = fd_jacobian(lambda y: fd_gradient(f, y, cfg), x, outer)
    asymmetry = 0.5 * float(np.linalg.norm(raw - raw.T))
    LOG.debug("Finite-difference Hessian asymmetry %.3e.", asymmetry)
    return FdHessian(0.5 * (raw + raw.T), asymmetry)
