from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike

from ..errors import ShapeMismatch

DEFAULT_ABS_FLOOR = 1e-9


@dataclass(frozen=True)
class ComparisonReport:
    """
    Outcome of an analytic versus numeric comparison.

    Attributes
    ----------
    max_error : float
        Largest per-entry error.
    index : Tuple[int, ...]
        Index of the entry with the largest error (empty for empty arrays).
    tolerance : float
        The relative tolerance the error was checked against.
    passed : bool
        max_error <= tolerance.
    """

    max_error: float
    index: Tuple[int, ...]
    tolerance: float
    passed: bool


def entry_errors(
    analytic: np.ndarray, numeric: np.ndarray, abs_floor: float
) -> np.ndarray:
    """max(|a - n| - abs_floor, 0) / max(|a|, |n|, abs_floor) per entry."""
    excess = np.maximum(np.abs(analytic - numeric) - abs_floor, 0.0)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), abs_floor)
    return excess / scale


def compare(
    analytic: ArrayLike,
    numeric: ArrayLike,
    rel_tol: float,
    abs_floor: float = DEFAULT_ABS_FLOOR,
) -> ComparisonReport:
    """
    Compares an analytic derivative with its numeric estimate.

    Parameters
    ----------
    analytic : ArrayLike
        Analytic values.
    numeric : ArrayLike
        Numeric values of the same shape.
    rel_tol : float
        Largest accepted per-entry error.
    abs_floor : float, default 1e-9
        Absolute differences up to this value are not counted, and it bounds
        the denominator from below.

    Returns
    -------
    ComparisonReport
        Largest error, its index and the pass flag.

    Raises
    ------
    ShapeMismatch
        If the shapes differ.

    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        raise ShapeMismatch(
            f"Cannot compare arrays of shapes {analytic.shape} and {numeric.shape}."
        )
    if abs_floor <= 0.0:
        raise ValueError(f"abs_floor must be positive, got {abs_floor}.")
    if analytic.size == 0:
        return ComparisonReport(0.0, (), rel_tol, True)
    errors = entry_errors(analytic, numeric, abs_floor)
    errors = np.where(np.isnan(errors), np.inf, errors)
    flat = int(np.argmax(errors))
    max_error = float(errors.reshape(-1)[flat])
    index = tuple(int(k) for k in np.unravel_index(flat, analytic.shape))
    return ComparisonReport(max_error, index, rel_tol, max_error <= rel_tol)
