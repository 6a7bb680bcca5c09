"""Dense factorization helpers shared by the G solves and the Newton solver."""
from logging import getLogger
from typing import NamedTuple

import numpy as np
from scipy.linalg import lu_factor
from scipy.linalg import lu_solve

LOG = getLogger(__name__)


class Factorization(NamedTuple):
    """LU factors of a square matrix with a cheap condition estimate."""

    lu: np.ndarray
    piv: np.ndarray
    condition: float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve((self.lu, self.piv), rhs)


def pivot_condition(lu: np.ndarray) -> float:
    """
    Condition estimate from LU pivots

    Ratio of the largest to the smallest magnitude on the diagonal of the
    upper factor. Returns infinity for a zero or non-finite pivot.

    Parameters
    ----------
    lu : np.ndarray
        Combined LU factors as returned by `scipy.linalg.lu_factor`.

    Returns
    -------
    float
        The pivot ratio, at least 1.

    """
    diag = np.abs(np.diag(lu))
    if diag.size == 0:
        return 1.0
    smallest = diag.min()
    if not np.all(np.isfinite(diag)) or smallest == 0.0:
        return float("inf")
    return float(diag.max() / smallest)


def factorize(matrix: np.ndarray) -> Factorization:
    """
    LU factorization with pivot condition estimate

    Parameters
    ----------
    matrix : np.ndarray
        Square matrix.

    Returns
    -------
    Factorization
        Factors and condition estimate. A singular matrix yields an infinite
        condition; callers decide how to react.

    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        return Factorization(matrix.copy(), np.arange(matrix.shape[0]), float("inf"))
    with np.errstate(divide="ignore", invalid="ignore"):
        lu, piv = lu_factor(matrix, check_finite=False)
    return Factorization(lu, piv, pivot_condition(lu))


def shifted_factorize(
    matrix: np.ndarray,
    condition_limit: float,
    shift_start: float = 1e-8,
    max_shifts: int = 12,
) -> Factorization:
    """
    Factorization with diagonal-shift fallback

    Factorizes `matrix` directly. Only if that fails (non-finite or vanishing
    pivots, or a pivot ratio above `condition_limit`) a diagonal shift
    tau * I is added, starting at tau = shift_start * max|matrix| and growing
    by a factor of 10 until the factorization succeeds.

    Parameters
    ----------
    matrix : np.ndarray
        Square matrix.
    condition_limit : float
        Largest acceptable pivot ratio.
    shift_start : float, default 1e-8
        Relative size of the first shift.
    max_shifts : int, default 12
        Maximum number of shift increases.

    Returns
    -------
    Factorization
        Factors of the (possibly shifted) matrix.

    """
    factors = factorize(matrix)
    if factors.condition <= condition_limit:
        return factors

    scale = float(np.max(np.abs(matrix))) if matrix.size else 1.0
    tau = shift_start * max(scale, 1.0)
    eye = np.eye(matrix.shape[0])
    for _ in range(max_shifts):
        LOG.warning(
            "Factorization failed (pivot ratio %.3e), shifting diagonal by %.3e.",
            factors.condition,
            tau,
        )
        factors = factorize(matrix + tau * eye)
        if factors.condition <= condition_limit:
            return factors
        tau *= 10.0
    return factors
