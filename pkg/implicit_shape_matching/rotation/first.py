"""First-order derivatives of the polar rotation with respect to coordinates."""
from dataclasses import dataclass
from functools import cached_property
from logging import getLogger
from typing import Optional

import numpy as np

from ..errors import SingularG
from ..kinematics.algebra import hat
from ..kinematics.algebra import rotate_coefficients
from ..kinematics.algebra import skew_vec
from ..kinematics.polar import PolarPair
from ..kinematics.shape import RestShape
from ..utils.linalg import factorize

LOG = getLogger(__name__)

CONDITION_LIMIT = 1e12


class GFactor:
    """
    Factorization of G = (tr(S) I - S) R^T, computed once per state.

    In 2D the operator acts on scalar rotation coefficients as multiplication
    by tr(S), so the factorization degenerates to the 1x1 system [tr(S)].

    Attributes
    ----------
    CONDITION_LIMIT : float
        Largest accepted pivot ratio of the LU factors before SingularG is
        raised.
    """

    CONDITION_LIMIT = CONDITION_LIMIT

    def __init__(self, polar: PolarPair) -> None:
        self.dim = polar.dim
        self.trace = polar.trace
        if self.dim == 2:
            self._factors = factorize(np.array([[self.trace]]))
            invalid = not self.trace > 0.0
        else:
            self._factors = factorize(polar.g_mat)
            invalid = False
        self.condition = self._factors.condition
        if invalid or not self.condition <= self.CONDITION_LIMIT:
            raise SingularG(
                f"G is singular or ill-conditioned (pivot ratio "
                f"{self.condition:.3e}, tr(S) = {self.trace:.6e})."
            )

    def __repr__(self) -> str:
        return f"GFactor(dim={self.dim}, condition={self.condition:.3e})"

    def solve(self, rhs: np.ndarray, closed_form: bool = True) -> np.ndarray:
        """
        Solves G w = rhs for a stack of right-hand sides.

        Parameters
        ----------
        rhs : np.ndarray
            Rotation coefficients, shape (..., 3) in 3D or (...) in 2D.
        closed_form : bool, default True
            In 2D divide by tr(S) instead of running the generic LU solve.
            Ignored in 3D.

        Returns
        -------
        np.ndarray
            Solutions with the shape of `rhs`.

        """
        rhs = np.asarray(rhs, dtype=np.float64)
        if self.dim == 2:
            if closed_form:
                return rhs / self.trace
            flat = self._factors.solve(rhs.reshape(1, -1))
            return flat.reshape(rhs.shape)
        flat = self._factors.solve(rhs.reshape(-1, 3).T)
        return flat.T.reshape(rhs.shape)


@dataclass(frozen=True)
class OmegaFirst:
    """
    Table of first-order rotation coefficients.

    With the left-multiplied convention dR/dq_ij = hat(w_ij) R, the table
    holds one coefficient per particle i and axis j.

    Attributes
    ----------
    vectors : np.ndarray
        Coefficients w_ij, shape (n, d, 3) in 3D and (n, d) in 2D.
    dim : int
        Spatial dimension.
    """

    vectors: np.ndarray
    dim: int

    @property
    def n_particles(self) -> int:
        return int(self.vectors.shape[0])

    @cached_property
    def matrices(self) -> np.ndarray:
        """hat(w_ij) for every entry, shape (n, d, d, d)."""
        return hat(self.vectors, self.dim)

    def combine(self, direction: np.ndarray) -> np.ndarray:
        """Rotation rate sum_ij direction_ij w_ij of a coordinate direction."""
        direction = np.asarray(direction, dtype=np.float64)
        if self.dim == 2:
            return np.asarray(np.sum(direction * self.vectors))
        return np.einsum("ij,ijk->k", direction, self.vectors)


def first_order_rhs(shape: RestShape, polar: PolarPair) -> np.ndarray:
    """
    Right-hand sides (2 m_i / M) skew(R^T e_j q0_i^T) of the first-order solve.

    Parameters
    ----------
    shape : RestShape
        The rest shape.
    polar : PolarPair
        Polar factors of the current covariance.

    Returns
    -------
    np.ndarray
        Coefficients, shape (n, d, 3) in 3D and (n, d) in 2D.

    """
    outer = np.einsum("jp,iq->ijpq", polar.r_mat, shape.rest_positions)
    weights = 2.0 * shape.mass_fractions
    rhs = skew_vec(outer)
    return rhs * weights.reshape((-1,) + (1,) * (rhs.ndim - 1))


def omega_first(
    shape: RestShape, polar: PolarPair, factor: Optional[GFactor] = None
) -> OmegaFirst:
    """
    First-order rotation coefficients

    Solves G w_ij = (2 m_i / M) skew(R^T e_j q0_i^T) for all particles and
    axes with a single factorization of G. In 2D the solve reduces to a
    division by tr(S).

    Parameters
    ----------
    shape : RestShape
        The rest shape.
    polar : PolarPair
        Polar factors of the current covariance.
    factor : Optional[GFactor]
        A factorization of G to reuse, built from `polar` if omitted.

    Returns
    -------
    OmegaFirst
        The coefficient table.

    Raises
    ------
    SingularG
        If G is numerically singular.

    """
    factor = GFactor(polar) if factor is None else factor
    vectors = factor.solve(first_order_rhs(shape, polar))
    vectors.setflags(write=False)
    LOG.debug("Solved %s first-order rotation coefficients.", vectors.shape[:2])
    return OmegaFirst(vectors=vectors, dim=shape.dim)


def rotation_jacobian_apply(
    omega: OmegaFirst, polar: PolarPair, q0: np.ndarray, i: int
) -> np.ndarray:
    """
    Jacobian of R q0 with respect to the coordinates of particle i.

    Parameters
    ----------
    omega : OmegaFirst
        Coefficients built from `polar`.
    polar : PolarPair
        Polar factors of the current covariance.
    q0 : np.ndarray
        A rest-space vector.
    i : int
        Particle index.

    Returns
    -------
    np.ndarray
        d x d matrix whose column j is hat(w_ij) R q0.

    """
    rotated = polar.r_mat @ np.asarray(q0, dtype=np.float64)
    columns = rotate_coefficients(omega.vectors[i], rotated, omega.dim)
    return np.ascontiguousarray(columns.T)
