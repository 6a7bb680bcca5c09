"""Polar decomposition A = RS by scaled Newton iteration."""
from dataclasses import dataclass
from logging import getLogger
from typing import Tuple

import numpy as np
from numba import njit

from ..errors import InvertedOrDegenerate

LOG = getLogger(__name__)

POLAR_TOLERANCE = 1e-14
POLAR_MAX_ITER = 64
DET_EPSILON = 1e-10


@dataclass(frozen=True)
class PolarPair:
    """
    Rotation and stretch factors of a covariance matrix.

    Attributes
    ----------
    r_mat : np.ndarray
        Proper rotation R (d x d).
    s_mat : np.ndarray
        Symmetric stretch S (d x d) with R S = A.
    g_mat : np.ndarray
        G = (tr(S) I - S) R^T, the operator of the rotation derivative solves.
    """

    r_mat: np.ndarray
    s_mat: np.ndarray
    g_mat: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.r_mat.shape[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.s_mat))


@njit
def scaled_newton_polar(
    a: np.ndarray, tol: float, max_iter: int
) -> Tuple[np.ndarray, int, bool]:
    """
    Scaled Newton iteration for the orthogonal polar factor

    Iterates X <- (zeta X + X^-T / zeta) / 2 starting at X = a, with the
    Frobenius-norm scaling zeta = sqrt(|X^-1| / |X|). Scaling is switched off
    once consecutive iterates are close, which restores the quadratic
    convergence of the plain iteration near the fixed point.

    Parameters
    ----------
    a : np.ndarray
        Non-singular square matrix (C-contiguous float64).
    tol : float
        Relative Frobenius change |X_{k+1} - X_k| / |X_k| to stop at.
    max_iter : int
        Maximum number of iterations.

    Returns
    -------
    Tuple[np.ndarray, int, bool]
        The orthogonal factor, iterations used, converged flag.

    """
    x = a.copy()
    scaled = True
    for it in range(max_iter):
        x_inv = np.linalg.inv(x)
        norm = np.sqrt(np.sum(x * x))
        zeta = 1.0
        if scaled:
            zeta = np.sqrt(np.sqrt(np.sum(x_inv * x_inv)) / norm)
        x_next = 0.5 * (zeta * x + x_inv.T / zeta)
        diff = np.sqrt(np.sum((x_next - x) ** 2))
        x = x_next
        if diff <= 1e-2 * norm:
            scaled = False
        if diff <= tol * norm:
            return x, it + 1, True
    return x, max_iter, False


def polar_decompose(a: np.ndarray) -> PolarPair:
    """
    Polar decomposition

    Factorizes a = R S into a proper rotation R and a symmetric S. The same
    input bits always give the same output bits.

    Parameters
    ----------
    a : np.ndarray
        Square 2x2 or 3x3 matrix with det(a) > 1e-10 * |a|_F^d.

    Returns
    -------
    PolarPair
        R, S and G = (tr(S) I - S) R^T.

    Raises
    ------
    InvertedOrDegenerate
        If det(a) does not exceed the threshold (inverted or flat
        configuration).

    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    dim = a.shape[0]
    if a.shape not in ((2, 2), (3, 3)):
        raise ValueError(f"Expected a 2x2 or 3x3 matrix, got {a.shape}.")
    if not np.all(np.isfinite(a)):
        raise InvertedOrDegenerate("Covariance matrix has non-finite entries.")

    det = float(np.linalg.det(a))
    threshold = DET_EPSILON * float(np.linalg.norm(a)) ** dim
    if not det > threshold:
        raise InvertedOrDegenerate(
            f"det(A_a) = {det:.6e} does not exceed {threshold:.6e}; "
            "the configuration is inverted or degenerate."
        )

    r_mat, iterations, converged = scaled_newton_polar(
        a, POLAR_TOLERANCE, POLAR_MAX_ITER
    )
    if not converged:
        LOG.warning(
            "Polar iteration stopped after %s iterations without converging.",
            iterations,
        )
    LOG.debug("Polar iteration converged in %s iterations.", iterations)

    s_mat = r_mat.T @ a
    s_mat = 0.5 * (s_mat + s_mat.T)
    g_mat = (np.trace(s_mat) * np.eye(dim) - s_mat) @ r_mat.T
    for arr in (r_mat, s_mat, g_mat):
        arr.setflags(write=False)
    return PolarPair(r_mat=r_mat, s_mat=s_mat, g_mat=g_mat)
